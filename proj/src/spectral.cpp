#include "coalflow/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace coalflow {

namespace {

bool sorted_admissible(std::span<Site const> sites, int n) {
    if (sites.empty()) return false;
    for (auto const& s : sites) {
        if (!s.in_index_set(n)) return false;
    }
    for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
        int dx = sites[k + 1].x - sites[k].x;
        if (dx <= 0) return false;
        if (std::abs(sites[k + 1].y - sites[k].y) > dx) return false;
    }
    return true;
}

void check_horizon(int n) {
    if (n < 1) throw std::invalid_argument("horizon must be >= 1, got " + std::to_string(n));
}

// Increment factor (p(dx-1, dy-1) - p(dx-1, dy+1)) / 2.
Dyadic step_factor(int dx, int dy) {
    return (p(dx - 1, dy - 1) - p(dx - 1, dy + 1)).halved();
}

mpq_class lambda_for(mpq_class const& eps) {
    if (eps < 0 || eps > mpq_class(1, 2)) {
        throw std::invalid_argument("eps must lie in [0, 1/2], got " + eps.get_str());
    }
    return 1 - 2 * eps;
}

}  // namespace

char const* to_string(Arithmetic mode) {
    return mode == Arithmetic::exact ? "exact" : "float";
}

Arithmetic arithmetic_for(int n) {
    return n <= kExactHorizonLimit ? Arithmetic::exact : Arithmetic::floating;
}

SpectralSet SpectralSet::make(std::vector<Site> sites, int n) {
    std::sort(sites.begin(), sites.end());
    if (!sorted_admissible(sites, n)) {
        throw std::invalid_argument("site list is not admissible for horizon " + std::to_string(n));
    }
    return SpectralSet(std::move(sites), n);
}

TimeSet TimeSet::make(std::vector<int> xs, int n) {
    check_horizon(n);
    std::sort(xs.begin(), xs.end());
    if (xs.empty()) throw std::invalid_argument("time set must be nonempty");
    if (std::adjacent_find(xs.begin(), xs.end()) != xs.end()) {
        throw std::invalid_argument("time set has duplicate entries");
    }
    if (xs.front() < 0 || xs.back() >= n) {
        throw std::invalid_argument("time set entries must lie in [0, n)");
    }
    return TimeSet(std::move(xs), n);
}

mpq_class SpectralWeight::squared() const {
    mpq_class v = d.to_rational();
    mpq_class r = v * v / n;
    r.canonicalize();
    return r;
}

double SpectralWeight::coefficient_value() const {
    return d.to_double() / std::sqrt(static_cast<double>(n));
}

bool is_admissible(std::span<Site const> sites, int n) {
    std::vector<Site> sorted(sites.begin(), sites.end());
    std::sort(sorted.begin(), sorted.end());
    return sorted_admissible(sorted, n);
}

Dyadic q_of_chain(std::span<Site const> sites) {
    Dyadic result{1};
    for (std::size_t k = 0; k + 1 < sites.size(); ++k) {
        result *= step_factor(sites[k + 1].x - sites[k].x, sites[k + 1].y - sites[k].y);
        if (result.is_zero()) break;
    }
    return result;
}

Dyadic q(SpectralSet const& set) { return q_of_chain(set.sites()); }

SpectralWeight coefficient(std::span<Site const> sites, int n) {
    check_horizon(n);
    for (auto const& s : sites) {
        if (!s.in_index_set(n)) {
            throw std::invalid_argument("site (" + std::to_string(s.x) + "," + std::to_string(s.y) +
                                        ") is outside the index set for n=" + std::to_string(n));
        }
    }
    std::vector<Site> sorted(sites.begin(), sites.end());
    std::sort(sorted.begin(), sorted.end());
    if (!sorted_admissible(sorted, n)) return {Dyadic{}, n};
    return {p(sorted.front().x, sorted.front().y) * q_of_chain(sorted), n};
}

Dyadic conditional_coefficient(SpectralSet const& set, int k, int position) {
    auto const& first = set.front();
    if (first.x <= k) throw std::invalid_argument("set must lie strictly after time k");
    return p(first.x - (k + 1), first.y - position) * q(set);
}

void for_each_admissible(int n, std::function<void(std::span<Site const>)> const& visit, int max_n) {
    check_horizon(n);
    if (n > max_n) {
        throw std::invalid_argument("enumeration of admissible sets is limited to n <= " +
                                    std::to_string(max_n) + ", got " + std::to_string(n));
    }
    std::vector<Site> chain;
    chain.reserve(static_cast<std::size_t>(n));
    // Preorder DFS: a chain precedes its extensions, extensions go in (x, y) order.
    std::function<void()> extend = [&] {
        visit(chain);
        Site last = chain.back();
        for (int x = last.x + 1; x < n; ++x) {
            int dx = x - last.x;
            for (int y = last.y - dx; y <= last.y + dx; y += 2) {
                chain.push_back({x, y});
                extend();
                chain.pop_back();
            }
        }
    };
    for (int x = 0; x < n; ++x) {
        for (int y = -x; y <= x; y += 2) {
            chain.push_back({x, y});
            extend();
            chain.pop_back();
        }
    }
}

std::vector<SpectralSet> enumerate_admissible(int n, int max_n) {
    std::vector<SpectralSet> out;
    for_each_admissible(
        n,
        [&](std::span<Site const> sites) {
            out.push_back(SpectralSet::make({sites.begin(), sites.end()}, n));
        },
        max_n);
    return out;
}

mpq_class r_distribution(TimeSet const& times) {
    auto const& xs = times.times();
    Dyadic mass = return_prob(xs.front());
    for (std::size_t k = 0; k + 1 < xs.size(); ++k) mass *= gap_prob(xs[k + 1] - xs[k]);
    mpq_class r = mass.to_rational() / times.horizon();
    r.canonicalize();
    return r;
}

mpq_class r_cumulative(int k, int n) {
    check_horizon(n);
    if (k < 0 || k >= n) throw std::invalid_argument("k must lie in [0, n)");
    mpq_class r(k + 1, n);
    r.canonicalize();
    return r;
}

SizeDistribution size_distribution(int n) {
    check_horizon(n);
    SizeDistribution out;
    out.n = n;
    out.mode = arithmetic_for(n);
    auto const un = static_cast<std::size_t>(n);

    if (out.mode == Arithmetic::exact) {
        std::vector<Dyadic> ret(un), gap(un);
        for (int j = 0; j < n; ++j) ret[j] = return_prob(j);
        for (int j = 1; j < n; ++j) gap[j] = ret[j - 1] - ret[j];

        // chain[x] = total weight of chains with m elements whose top is x
        std::vector<Dyadic> chain = ret;
        for (int m = 1; m <= n; ++m) {
            if (m > 1) {
                std::vector<Dyadic> next(un);
                for (int x = m - 1; x < n; ++x) {
                    Dyadic acc;
                    for (int j = 1; j <= x - (m - 2); ++j) acc += gap[j] * chain[x - j];
                    next[x] = std::move(acc);
                }
                chain = std::move(next);
            }
            Dyadic total;
            for (int x = m - 1; x < n; ++x) total += chain[x];
            mpq_class prob = total.to_rational() / n;
            prob.canonicalize();
            out.values.push_back(prob.get_d());
            out.exact.push_back(std::move(prob));
        }
        return out;
    }

    auto ret = return_prob_table(un);
    std::vector<double> gap(un, 0.0);
    for (std::size_t j = 1; j < un; ++j) gap[j] = ret[j - 1] - ret[j];
    out.values.assign(un, 0.0);
    std::vector<double> chain = ret;
    double peak = 0.0;
    for (int m = 1; m <= n; ++m) {
        if (m > 1) {
            std::vector<double> next(un, 0.0);
            for (int x = m - 1; x < n; ++x) {
                double acc = 0.0;
                for (int j = 1; j <= x - (m - 2); ++j) acc += gap[j] * chain[x - j];
                next[x] = acc;
            }
            chain = std::move(next);
        }
        double total = 0.0;
        for (int x = m - 1; x < n; ++x) total += chain[x];
        double prob = total / n;
        out.values[m - 1] = prob;
        peak = std::max(peak, prob);
        // past the mode the tail decays faster than geometrically
        if (prob < peak * 1e-18) break;
    }
    return out;
}

Quantity expected_size(int n) {
    check_horizon(n);
    Quantity out;
    out.mode = arithmetic_for(n);
    if (out.mode == Arithmetic::exact) {
        Dyadic sum;
        for (int j = 0; j < n; ++j) sum += return_prob(j) * Dyadic(n - j);
        mpq_class r = sum.to_rational() / n;
        r.canonicalize();
        out.value = r.get_d();
        out.exact = std::move(r);
        return out;
    }
    auto ret = return_prob_table(static_cast<std::size_t>(n));
    // smallest terms first
    double sum = 0.0;
    for (int j = n - 1; j >= 0; --j) sum += static_cast<double>(n - j) * ret[j];
    out.value = sum / n;
    return out;
}

Quantity noise_correlation_exact(int n, mpq_class const& eps) {
    check_horizon(n);
    mpq_class lambda = lambda_for(eps);
    Quantity out;
    out.mode = arithmetic_for(n);
    auto const un = static_cast<std::size_t>(n);

    if (out.mode == Arithmetic::exact) {
        std::vector<mpq_class> ret(un), gap(un), h(un);
        for (int j = 0; j < n; ++j) ret[j] = return_prob(j).to_rational();
        for (int j = 1; j < n; ++j) gap[j] = ret[j - 1] - ret[j];
        mpq_class total = 0;
        for (int x = 0; x < n; ++x) {
            mpq_class acc = ret[x];
            for (int j = 1; j <= x; ++j) acc += gap[j] * h[x - j];
            h[x] = lambda * acc;
            total += h[x];
        }
        total /= n;
        total.canonicalize();
        out.value = total.get_d();
        out.exact = std::move(total);
        return out;
    }

    double lam = lambda.get_d();
    auto ret = return_prob_table(un);
    std::vector<double> gap(un, 0.0), h(un, 0.0);
    for (std::size_t j = 1; j < un; ++j) gap[j] = ret[j - 1] - ret[j];
    double total = 0.0;
    for (int x = 0; x < n; ++x) {
        double acc = ret[x];
        for (int j = 1; j <= x; ++j) acc += gap[j] * h[x - j];
        h[x] = lam * acc;
        total += h[x];
    }
    out.value = total / n;
    return out;
}

Quantity noise_correlation_exact(int n, double eps) {
    if (!(eps >= 0.0 && eps <= 0.5)) {
        throw std::invalid_argument("eps must lie in [0, 1/2], got " + std::to_string(eps));
    }
    return noise_correlation_exact(n, mpq_class(eps));
}

}  // namespace coalflow
