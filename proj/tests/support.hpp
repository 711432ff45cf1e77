#pragma once

// Test-side reference implementations. Deliberately naive and independent of
// the library code paths they are compared against.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "coalflow/dyadic.hpp"
#include "coalflow/kernel.hpp"

namespace testing_support {

inline mpq_class q(long num, long den = 1) {
    mpq_class r(num, den);
    r.canonicalize();
    return r;
}

inline mpq_class rat(coalflow::Dyadic const& d) { return d.to_rational(); }

// Binomial by Pascal's triangle.
class Pascal {
  public:
    explicit Pascal(int rows) : rows_(rows + 1) {
        for (int a = 0; a <= rows; ++a) {
            rows_[a].assign(a + 1, 1);
            for (int b = 1; b < a; ++b) rows_[a][b] = rows_[a - 1][b - 1] + rows_[a - 1][b];
        }
    }
    mpz_class operator()(int a, int b) const {
        if (a < 0 || b < 0 || b > a) return 0;
        return rows_[a][b];
    }

  private:
    std::vector<std::vector<mpz_class>> rows_;
};

// p(x, y) as a rational: C(x, (x+y)/2) / 2^x.
inline mpq_class naive_p(Pascal const& c, int x, int y) {
    if (x < 0 || (x + y) % 2 != 0 || y > x || y < -x) return 0;
    mpz_class den = 1;
    den <<= x;
    mpq_class r(c(x, (x + y) / 2), den);
    r.canonicalize();
    return r;
}

// W(n) from a packed word; bit (x(x+1)/2 + (x+y)/2) set means sign -1.
inline int naive_endpoint(int n, std::uint64_t bits) {
    int y = 0;
    for (int x = 0; x < n; ++x) {
        int row_start = x * (x + 1) / 2;
        int slot = (x + y) / 2;
        y += ((bits >> (row_start + slot)) & 1u) ? -1 : 1;
    }
    return y;
}

// sqrt(n) * E[tau(S) W(n)/sqrt(n)] = E[tau(S) W(n)], by direct summation.
inline mpq_class naive_coefficient(int n, std::uint64_t mask) {
    int sites = n * (n + 1) / 2;
    long total = 0;
    for (std::uint64_t t = 0; t < (std::uint64_t{1} << sites); ++t) {
        int parity = __builtin_popcountll(t & mask) & 1;
        total += (parity ? -1 : 1) * naive_endpoint(n, t);
    }
    mpz_class den = 1;
    den <<= sites;
    mpq_class r(total, den);
    r.canonicalize();
    return r;
}

inline std::mt19937_64 rng(std::uint64_t salt = 0) { return std::mt19937_64(0x5eed0000u + salt); }

inline long uniform_int(std::mt19937_64& g, long lo, long hi) {
    return std::uniform_int_distribution<long>(lo, hi)(g);
}

}  // namespace testing_support
