#pragma once

#include <compare>
#include <cstdint>
#include <vector>

#include <gmpxx.h>

#include "coalflow/dyadic.hpp"

namespace coalflow {

/// Lattice point of the triangular index set: time x, space y.
struct Site {
    int x = 0;
    int y = 0;

    /// |y| <= x and x + y even.
    bool on_lattice() const;
    /// on_lattice() and x < n.
    bool in_index_set(int n) const;

    friend auto operator<=>(Site const&, Site const&) = default;
};

/// C(a, b); zero outside 0 <= b <= a.
mpz_class binomial(long a, long b);

/// Position law of a simple random walk after x steps: 2^{-x} C(x, (x+y)/2).
/// Total: zero when |y| > x or x + y is odd.
Dyadic p(long x, long y);

/// p(2k, 0).
Dyadic return_prob(long k);

/// g(j) = p(2j-2, 0) - p(2j, 0) for j >= 1: the law of the gap between
/// consecutive elements of the time projection.
Dyadic gap_prob(long j);

/// Floating-point p(2k, 0) for k = 0..count-1, by the ratio recurrence
/// p(2k,0) = p(2k-2,0) (2k-1)/(2k).
std::vector<double> return_prob_table(std::size_t count);

}  // namespace coalflow
