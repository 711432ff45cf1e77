#pragma once

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include <gmpxx.h>

#include "coalflow/dyadic.hpp"
#include "coalflow/kernel.hpp"

namespace coalflow {

/// Exact rationals up to this horizon, doubles above.
inline constexpr int kExactHorizonLimit = 64;
/// Default bound on n for exhaustive enumeration of admissible sets.
inline constexpr int kEnumerationLimit = 8;

enum class Arithmetic { exact, floating };

char const* to_string(Arithmetic mode);
Arithmetic arithmetic_for(int n);

/// A value produced in either arithmetic mode. `value` is always populated;
/// `exact` only in exact mode.
struct Quantity {
    Arithmetic mode = Arithmetic::exact;
    std::optional<mpq_class> exact;
    double value = 0.0;
};

/// Admissible site list for horizon n, sorted by time.
///
/// Admissible means: nonempty, strictly increasing times below n, every
/// site on the lattice, |y1| <= x1 and |y_{k+1} - y_k| <= x_{k+1} - x_k.
class SpectralSet {
  public:
    /// Sorts by x; throws std::invalid_argument unless admissible.
    static SpectralSet make(std::vector<Site> sites, int n);

    std::vector<Site> const& sites() const { return sites_; }
    int horizon() const { return n_; }
    std::size_t size() const { return sites_.size(); }
    Site const& front() const { return sites_.front(); }

    friend bool operator==(SpectralSet const&, SpectralSet const&) = default;

  private:
    SpectralSet(std::vector<Site> sites, int n) : sites_(std::move(sites)), n_(n) {}

    std::vector<Site> sites_;
    int n_ = 1;
};

/// Nonempty strictly ascending set of times in [0, n).
class TimeSet {
  public:
    /// Sorts; throws std::invalid_argument on duplicates or out-of-range times.
    static TimeSet make(std::vector<int> xs, int n);

    std::vector<int> const& times() const { return xs_; }
    int horizon() const { return n_; }
    std::size_t size() const { return xs_.size(); }

    friend bool operator==(TimeSet const&, TimeSet const&) = default;
    friend auto operator<=>(TimeSet const& a, TimeSet const& b) { return a.xs_ <=> b.xs_; }

  private:
    TimeSet(std::vector<int> xs, int n) : xs_(std::move(xs)), n_(n) {}

    std::vector<int> xs_;
    int n_ = 1;
};

/// Coefficient numerator d, with the Fourier-Walsh coefficient equal to d / sqrt(n).
struct SpectralWeight {
    Dyadic d;
    int n = 1;

    /// d^2 / n, the mass of the set under the spectral measure.
    mpq_class squared() const;
    double coefficient_value() const;
};

bool is_admissible(std::span<Site const> sites, int n);

/// Product over consecutive sites of (p(dx-1, dy-1) - p(dx-1, dy+1)) / 2.
Dyadic q(SpectralSet const& set);
/// Same product on a sorted site list, without the admissibility check.
Dyadic q_of_chain(std::span<Site const> sites);

/// Closed-form coefficient numerator: p(x1, y1) q(S) for admissible sets,
/// exactly zero otherwise (including the empty set). Throws
/// std::invalid_argument if any site lies outside the index set.
SpectralWeight coefficient(std::span<Site const> sites, int n);

/// sqrt(n) times the conditional expectation of tau(S) xi given every sign at
/// times <= k, when the walk sits at `position` at time k + 1:
/// p(x1 - k - 1, y1 - position) q(S). Requires x1 > k.
Dyadic conditional_coefficient(SpectralSet const& set, int k, int position);

/// Visits every admissible set exactly once, in lexicographic order of the
/// (x, y) site lists. Throws std::invalid_argument when n > max_n.
void for_each_admissible(int n, std::function<void(std::span<Site const>)> const& visit,
                         int max_n = kEnumerationLimit);
std::vector<SpectralSet> enumerate_admissible(int n, int max_n = kEnumerationLimit);

/// Law of the time projection: (1/n) p(2x1, 0) prod_k g(x_{k+1} - x_k).
mpq_class r_distribution(TimeSet const& times);
/// P[projection within [0, k]] = (k + 1) / n.
mpq_class r_cumulative(int k, int n);

struct SizeDistribution {
    int n = 1;
    Arithmetic mode = Arithmetic::exact;
    /// Index m - 1 holds P(|R| = m). `exact` is empty in floating mode.
    std::vector<mpq_class> exact;
    std::vector<double> values;
};

/// Distribution of |R| by the renewal DP: the top element is uniform, gaps
/// are independent with law g and the chain terminates from x with weight
/// p(2x, 0). Floating mode drops the tail once it falls below double range
/// relevance (entries past the cutoff are reported as zero).
SizeDistribution size_distribution(int n);

/// E|R| = (1/n) sum_{j<n} (n - j) p(2j, 0).
Quantity expected_size(int n);

/// E[xi xi_eps] = E[(1 - 2 eps)^{|R|}] by the renewal DP. Throws
/// std::invalid_argument when eps is outside [0, 1/2].
Quantity noise_correlation_exact(int n, double eps);
Quantity noise_correlation_exact(int n, mpq_class const& eps);

}  // namespace coalflow
