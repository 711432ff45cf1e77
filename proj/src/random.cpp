#include "coalflow/random.hpp"

#include <stdexcept>

namespace coalflow {

namespace {

constexpr std::uint32_t kMul0 = 0xD2511F53;
constexpr std::uint32_t kMul1 = 0xCD9E8D57;
constexpr std::uint32_t kWeyl0 = 0x9E3779B9;
constexpr std::uint32_t kWeyl1 = 0xBB67AE85;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    std::uint64_t prod = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(prod >> 32);
    lo = static_cast<std::uint32_t>(prod);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0, lo0, hi1, lo1;
        mulhilo(kMul0, ctr[0], hi0, lo0);
        mulhilo(kMul1, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += kWeyl0;
        key[1] += kWeyl1;
    }
    return ctr;
}

std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

SeededSource SeededSource::substream(std::uint64_t index) const {
    return {seed, mix64(stream ^ mix64(index + 0x632BE59BD9B4E019ull))};
}

std::uint64_t SeededSource::bits(std::uint64_t hi, std::uint64_t lo) const {
    // stream and hi share the upper counter words; fold them first
    std::uint64_t upper = mix64(stream) ^ hi;
    auto out = philox4x32({static_cast<std::uint32_t>(lo), static_cast<std::uint32_t>(lo >> 32),
                           static_cast<std::uint32_t>(upper), static_cast<std::uint32_t>(upper >> 32)},
                          {static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)});
    return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

double SeededSource::uniform(std::uint64_t hi, std::uint64_t lo) const {
    return static_cast<double>(bits(hi, lo) >> 11) * 0x1.0p-53;
}

std::uint64_t DrawStream::next_bits() { return src_.bits(0, index_++); }

double DrawStream::next_uniform() { return static_cast<double>(next_u53()) * 0x1.0p-53; }

std::uint64_t DrawStream::next_below(std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("next_below: empty range");
    if (bound == 1) return 0;
    std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
        unsigned __int128 m = static_cast<unsigned __int128>(next_bits()) * bound;
        if (static_cast<std::uint64_t>(m) >= threshold) return static_cast<std::uint64_t>(m >> 64);
    }
}

int DrawStream::next_sign() {
    if (cached_bits_ == 0) {
        cached_ = next_bits();
        cached_bits_ = 64;
    }
    int s = (cached_ & 1u) ? -1 : 1;
    cached_ >>= 1;
    --cached_bits_;
    return s;
}

}  // namespace coalflow
