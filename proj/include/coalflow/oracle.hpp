#pragma once

#include <cstdint>
#include <vector>

#include "coalflow/dyadic.hpp"
#include "coalflow/kernel.hpp"
#include "coalflow/spectral.hpp"

namespace coalflow {

/// Default bound on n for the brute-force transform (2^21 table entries).
inline constexpr int kOracleLimit = 6;
/// Upper bound accepted even with an explicit override (2^28 entries, 2 GiB).
inline constexpr int kOracleHardLimit = 7;

/// Number of sites in the triangular index set: n(n+1)/2.
constexpr int index_set_size(int n) { return n * (n + 1) / 2; }

/// Row-major site ordering: x ascending, then y ascending.
/// (x, y) -> x(x+1)/2 + (x+y)/2.
constexpr int site_index(int x, int y) { return x * (x + 1) / 2 + (x + y) / 2; }
Site site_at(int index);

/// Sites selected by a subset bitmask under the row-major ordering.
std::vector<Site> sites_of_mask(std::uint64_t mask);
std::uint64_t mask_of_sites(std::span<Site const> sites);

/// One realization of the triangular sign array. A set bit means the sign is -1.
class SignArray {
  public:
    explicit SignArray(int n);
    /// Low index_set_size(n) bits of `packed`; requires n <= 10.
    static SignArray from_mask(int n, std::uint64_t packed);

    int horizon() const { return n_; }
    int size() const { return index_set_size(n_); }

    int sign(int x, int y) const;
    void set_sign(int x, int y, int value);
    bool bit(int index) const { return (words_[index / 64] >> (index % 64)) & 1u; }
    void flip(int index) { words_[index / 64] ^= std::uint64_t{1} << (index % 64); }

    friend bool operator==(SignArray const&, SignArray const&) = default;

  private:
    int n_;
    std::vector<std::uint64_t> words_;
};

/// W(n): the walk from the origin reads the sign at its own current site.
int walk_endpoint(SignArray const& tau);
/// W(n) for an array packed into one word (n <= 10).
int walk_endpoint_packed(int n, std::uint64_t packed);

/// In-place Walsh-Hadamard butterfly: out[s] = sum_t (-1)^{|s & t|} in[t].
void walsh_hadamard(std::span<std::int64_t> values);

/// Every Fourier-Walsh coefficient of W(n) / sqrt(n), stored as integer
/// numerators over the common denominator 2^|I|; the coefficient of the
/// site set selected by `mask` is raw[mask] / 2^|I| / sqrt(n).
struct FullTransform {
    int n = 1;
    std::vector<std::int64_t> raw;

    int exponent() const { return index_set_size(n); }
    std::size_t size() const { return raw.size(); }
    Dyadic coefficient(std::uint64_t mask) const {
        return Dyadic(mpz_class(static_cast<long>(raw[mask])), static_cast<std::uint64_t>(exponent()));
    }
};

/// Bytes needed for the table at horizon n.
std::uint64_t transform_memory_bytes(int n);

/// Evaluates W(n) on all 2^|I| sign arrays and applies the fast
/// Walsh-Hadamard transform. Exact integer arithmetic throughout. Throws
/// std::invalid_argument for n > max_n or n > kOracleHardLimit.
FullTransform brute_force_transform(int n, int max_n = kOracleLimit);

/// sqrt(n) E[tau(S) xi | signs at times <= k], by exhaustive averaging over
/// all completions of `prefix` (only its rows x <= k are read). Throws
/// std::invalid_argument if S has a site at time <= k.
Dyadic conditional_oracle(SpectralSet const& set, int k, SignArray const& prefix);

/// All conditional coefficients at once: for a fixed prefix, the transform
/// over the free signs at times > k. Masks index the free sites in row-major
/// order starting at site_index(k + 1, -(k + 1)).
struct ConditionalTransform {
    int n = 1;
    int k = 0;
    int walk_position = 0;  // W(k + 1) under the prefix
    std::vector<std::int64_t> raw;

    int offset() const { return index_set_size(k + 1); }
    int exponent() const { return index_set_size(n) - offset(); }
    Dyadic coefficient(std::uint64_t free_mask) const {
        return Dyadic(mpz_class(static_cast<long>(raw[free_mask])), static_cast<std::uint64_t>(exponent()));
    }
};

ConditionalTransform conditional_transform(int n, int k, std::uint64_t prefix_mask);

}  // namespace coalflow
