#include "coalflow/kernel.hpp"

#include <cstdlib>

namespace coalflow {

bool Site::on_lattice() const {
    return x >= 0 && std::abs(y) <= x && (x + y) % 2 == 0;
}

bool Site::in_index_set(int n) const { return on_lattice() && x < n; }

mpz_class binomial(long a, long b) {
    if (a < 0 || b < 0 || b > a) return 0;
    if (b > a - b) b = a - b;
    // running product stays integral: result_i = C(a - b + i, i)
    mpz_class result = 1;
    for (long i = 1; i <= b; ++i) {
        result *= a - b + i;
        mpz_divexact_ui(result.get_mpz_t(), result.get_mpz_t(), static_cast<unsigned long>(i));
    }
    return result;
}

Dyadic p(long x, long y) {
    if (x < 0 || std::labs(y) > x || ((x + y) & 1) != 0) return Dyadic{};
    return Dyadic(binomial(x, (x + y) / 2), static_cast<std::uint64_t>(x));
}

Dyadic return_prob(long k) { return p(2 * k, 0); }

Dyadic gap_prob(long j) { return return_prob(j - 1) - return_prob(j); }

std::vector<double> return_prob_table(std::size_t count) {
    std::vector<double> table(count);
    double value = 1.0;
    for (std::size_t k = 0; k < count; ++k) {
        if (k > 0) value *= static_cast<double>(2 * k - 1) / static_cast<double>(2 * k);
        table[k] = value;
    }
    return table;
}

}  // namespace coalflow
