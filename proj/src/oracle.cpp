#include "coalflow/oracle.hpp"

#include <bit>
#include <stdexcept>
#include <string>

namespace coalflow {

namespace {

void check_packed(int n) {
    if (n < 1 || index_set_size(n) > 64) {
        throw std::invalid_argument("packed sign arrays need 1 <= n <= 10");
    }
}

}  // namespace

Site site_at(int index) {
    int x = 0;
    while (index_set_size(x + 1) <= index) ++x;
    int offset = index - index_set_size(x);
    return {x, 2 * offset - x};
}

std::vector<Site> sites_of_mask(std::uint64_t mask) {
    std::vector<Site> sites;
    while (mask != 0) {
        int i = std::countr_zero(mask);
        sites.push_back(site_at(i));
        mask &= mask - 1;
    }
    return sites;
}

std::uint64_t mask_of_sites(std::span<Site const> sites) {
    std::uint64_t mask = 0;
    for (auto const& s : sites) {
        if (!s.on_lattice() || index_set_size(s.x + 1) > 64) {
            throw std::invalid_argument("site cannot be encoded in a 64-bit mask");
        }
        mask |= std::uint64_t{1} << site_index(s.x, s.y);
    }
    return mask;
}

SignArray::SignArray(int n) : n_(n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    words_.assign(static_cast<std::size_t>((index_set_size(n) + 63) / 64), 0);
}

SignArray SignArray::from_mask(int n, std::uint64_t packed) {
    check_packed(n);
    SignArray tau(n);
    int bits = index_set_size(n);
    tau.words_[0] = bits == 64 ? packed : packed & ((std::uint64_t{1} << bits) - 1);
    return tau;
}

int SignArray::sign(int x, int y) const { return bit(site_index(x, y)) ? -1 : 1; }

void SignArray::set_sign(int x, int y, int value) {
    int i = site_index(x, y);
    if ((value < 0) != bit(i)) flip(i);
}

int walk_endpoint(SignArray const& tau) {
    int w = 0;
    for (int x = 0; x < tau.horizon(); ++x) w += tau.sign(x, w);
    return w;
}

int walk_endpoint_packed(int n, std::uint64_t packed) {
    int w = 0;
    for (int x = 0; x < n; ++x) {
        w += ((packed >> site_index(x, w)) & 1u) ? -1 : 1;
    }
    return w;
}

void walsh_hadamard(std::span<std::int64_t> values) {
    std::size_t size = values.size();
    if (!std::has_single_bit(size)) throw std::invalid_argument("transform length must be a power of two");
    for (std::size_t half = 1; half < size; half <<= 1) {
        for (std::size_t block = 0; block < size; block += 2 * half) {
            for (std::size_t i = block; i < block + half; ++i) {
                std::int64_t a = values[i];
                std::int64_t b = values[i + half];
                values[i] = a + b;
                values[i + half] = a - b;
            }
        }
    }
}

std::uint64_t transform_memory_bytes(int n) {
    return (std::uint64_t{1} << index_set_size(n)) * sizeof(std::int64_t);
}

FullTransform brute_force_transform(int n, int max_n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (n > max_n || n > kOracleHardLimit) {
        throw std::invalid_argument("brute-force transform refused for n=" + std::to_string(n) +
                                    ": needs " + std::to_string(transform_memory_bytes(n) >> 20) +
                                    " MiB and 2^" + std::to_string(index_set_size(n)) +
                                    " walk evaluations (limit n <= " + std::to_string(max_n) + ")");
    }
    FullTransform out;
    out.n = n;
    out.raw.resize(std::size_t{1} << index_set_size(n));
    for (std::uint64_t t = 0; t < out.raw.size(); ++t) out.raw[t] = walk_endpoint_packed(n, t);
    walsh_hadamard(out.raw);
    return out;
}

Dyadic conditional_oracle(SpectralSet const& set, int k, SignArray const& prefix) {
    int n = set.horizon();
    if (prefix.horizon() != n) throw std::invalid_argument("prefix horizon does not match the set");
    if (k < 0 || k > n - 2) throw std::invalid_argument("k must lie in [0, n-2]");
    if (set.front().x <= k) throw std::invalid_argument("set intersects the conditioned rows x <= k");
    check_packed(n);

    int offset = index_set_size(k + 1);
    int free_bits = index_set_size(n) - offset;
    std::uint64_t fixed = 0;
    for (int i = 0; i < offset; ++i) {
        if (prefix.bit(i)) fixed |= std::uint64_t{1} << i;
    }
    std::uint64_t set_mask = mask_of_sites(set.sites());

    std::int64_t sum = 0;
    for (std::uint64_t c = 0; c < (std::uint64_t{1} << free_bits); ++c) {
        std::uint64_t tau = fixed | (c << offset);
        int parity = std::popcount(tau & set_mask) & 1;
        int w = walk_endpoint_packed(n, tau);
        sum += parity ? -w : w;
    }
    return Dyadic(mpz_class(static_cast<long>(sum)), static_cast<std::uint64_t>(free_bits));
}

ConditionalTransform conditional_transform(int n, int k, std::uint64_t prefix_mask) {
    check_packed(n);
    if (n > kOracleHardLimit) throw std::invalid_argument("conditional transform limited to n <= 7");
    if (k < 0 || k > n - 2) throw std::invalid_argument("k must lie in [0, n-2]");
    ConditionalTransform out;
    out.n = n;
    out.k = k;
    int offset = out.offset();
    std::uint64_t fixed = prefix_mask & ((std::uint64_t{1} << offset) - 1);

    int w = 0;
    for (int x = 0; x <= k; ++x) w += ((fixed >> site_index(x, w)) & 1u) ? -1 : 1;
    out.walk_position = w;

    out.raw.resize(std::size_t{1} << out.exponent());
    for (std::uint64_t c = 0; c < out.raw.size(); ++c) {
        out.raw[c] = walk_endpoint_packed(n, fixed | (c << offset));
    }
    walsh_hadamard(out.raw);
    return out;
}

}  // namespace coalflow
