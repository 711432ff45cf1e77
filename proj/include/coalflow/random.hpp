#pragma once

#include <array>
#include <cstdint>

namespace coalflow {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection
/// on 128-bit counters. Pure, so any draw can be recomputed from its index.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// Identifies an independent stream of draws. Every draw is a pure function
/// of (seed, stream, index), so results do not depend on scheduling.
struct SeededSource {
    std::uint64_t seed = 0;
    std::uint64_t stream = 0;

    /// Child stream for item `index` of a batch.
    SeededSource substream(std::uint64_t index) const;

    /// 64 random bits for (stream, hi, lo).
    std::uint64_t bits(std::uint64_t hi, std::uint64_t lo) const;
    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform(std::uint64_t hi, std::uint64_t lo) const;

    friend bool operator==(SeededSource const&, SeededSource const&) = default;
};

/// Sequential reader over one SeededSource.
class DrawStream {
  public:
    explicit DrawStream(SeededSource src) : src_(src) {}

    std::uint64_t next_bits();
    /// 53-bit numerator k of the uniform draw k / 2^53.
    std::uint64_t next_u53() { return next_bits() >> 11; }
    double next_uniform();
    /// Unbiased integer in [0, bound) (Lemire's multiply-shift with rejection).
    /// Throws std::invalid_argument for bound 0.
    std::uint64_t next_below(std::uint64_t bound);
    /// +1 or -1 with equal probability.
    int next_sign();

    std::uint64_t position() const { return index_; }

  private:
    SeededSource src_;
    std::uint64_t index_ = 0;
    std::uint64_t cached_ = 0;
    int cached_bits_ = 0;
};

}  // namespace coalflow
