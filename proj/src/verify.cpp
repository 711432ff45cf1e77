#include "coalflow/verify.hpp"

#include <map>
#include <sstream>
#include <stdexcept>

#include "coalflow/sampler.hpp"
#include "coalflow/spectral.hpp"

namespace coalflow {

namespace {

CheckResult pass(std::string name, std::string detail = {}) { return {std::move(name), true, std::move(detail)}; }
CheckResult fail(std::string name, std::string detail) { return {std::move(name), false, std::move(detail)}; }

std::string describe(std::span<Site const> sites) {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < sites.size(); ++i) out << (i ? "," : "") << '(' << sites[i].x << ',' << sites[i].y << ')';
    out << '}';
    return out.str();
}

std::string describe(std::vector<int> const& xs) {
    std::ostringstream out;
    out << '{';
    for (std::size_t i = 0; i < xs.size(); ++i) out << (i ? "," : "") << xs[i];
    out << '}';
    return out.str();
}

// Squared coefficient numerators d^2 summed by time projection.
using ProjectionMass = std::map<std::vector<int>, Dyadic>;

CheckResult compare_projection(std::string name, ProjectionMass const& mass, int n) {
    std::size_t expected_sets = (std::size_t{1} << n) - 1;
    if (mass.size() != expected_sets) {
        return fail(name, "projection covers " + std::to_string(mass.size()) + " time sets, expected " +
                              std::to_string(expected_sets));
    }
    for (auto const& [xs, d2] : mass) {
        mpq_class projected = d2.to_rational() / n;
        projected.canonicalize();
        mpq_class formula = r_distribution(TimeSet::make(xs, n));
        if (projected != formula) {
            return fail(name, "R=" + describe(xs) + ": projected " + projected.get_str() + " vs " + formula.get_str());
        }
    }
    return pass(name, std::to_string(mass.size()) + " time sets");
}

}  // namespace

CheckResult check_oracle_matches_formula(FullTransform const& transform) {
    std::string const name = "oracle_matches_formula";
    int n = transform.n;
    std::size_t admissible = 0;
    for (std::uint64_t mask = 0; mask < transform.size(); ++mask) {
        auto sites = sites_of_mask(mask);
        if (!is_admissible(sites, n)) {
            if (transform.raw[mask] != 0) {
                return fail(name, "non-admissible " + describe(sites) + " has nonzero oracle coefficient");
            }
            continue;
        }
        ++admissible;
        Dyadic formula = coefficient(sites, n).d;
        Dyadic oracle = transform.coefficient(mask);
        if (formula != oracle) {
            return fail(name, describe(sites) + ": oracle " + oracle.to_string() + " vs formula " + formula.to_string());
        }
    }
    return pass(name, std::to_string(transform.size()) + " masks, " + std::to_string(admissible) + " admissible");
}

CheckResult check_parseval_oracle(FullTransform const& transform) {
    __int128 sum = 0;
    for (auto v : transform.raw) sum += static_cast<__int128>(v) * v;
    // sum (raw / 2^L)^2 / n = 1  <=>  sum raw^2 = n 4^L
    __int128 target = static_cast<__int128>(transform.n) << (2 * transform.exponent());
    if (sum != target) return fail("parseval_oracle", "sum of squares differs from n 4^|I|");
    return pass("parseval_oracle");
}

CheckResult check_parseval_formula(int n) {
    Dyadic sum;
    std::size_t count = 0;
    for_each_admissible(n, [&](std::span<Site const> sites) {
        Dyadic d = p(sites.front().x, sites.front().y) * q_of_chain(sites);
        sum += d * d;
        ++count;
    });
    if (sum != Dyadic(n)) return fail("parseval_formula", "sum d^2 = " + sum.to_string() + ", expected " + std::to_string(n));
    return pass("parseval_formula", std::to_string(count) + " admissible sets");
}

CheckResult check_projection(int n) {
    ProjectionMass mass;
    for_each_admissible(n, [&](std::span<Site const> sites) {
        Dyadic d = p(sites.front().x, sites.front().y) * q_of_chain(sites);
        std::vector<int> xs;
        for (auto const& s : sites) xs.push_back(s.x);
        mass[xs] += d * d;
    });
    return compare_projection("projection_formula", mass, n);
}

CheckResult check_oracle_projection(FullTransform const& transform) {
    ProjectionMass mass;
    for (std::uint64_t mask = 1; mask < transform.size(); ++mask) {
        if (transform.raw[mask] == 0) continue;
        auto sites = sites_of_mask(mask);
        std::vector<int> xs;
        for (auto const& s : sites) xs.push_back(s.x);
        Dyadic d = transform.coefficient(mask);
        mass[xs] += d * d;
    }
    return compare_projection("projection_oracle", mass, transform.n);
}

CheckResult check_cumulative(int n) {
    for (int k = 0; k < n; ++k) {
        mpq_class total = 0;
        for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << (k + 1)); ++subset) {
            std::vector<int> xs;
            for (int x = 0; x <= k; ++x) {
                if ((subset >> x) & 1u) xs.push_back(x);
            }
            total += r_distribution(TimeSet::make(std::move(xs), n));
        }
        total.canonicalize();
        if (total != r_cumulative(k, n)) {
            return fail("cumulative", "k=" + std::to_string(k) + ": " + total.get_str() + " vs " +
                                          r_cumulative(k, n).get_str());
        }
    }
    return pass("cumulative", std::to_string(n) + " values of k");
}

CheckResult check_conditional_closed_form(int n) {
    std::string const name = "conditional_closed_form";
    std::size_t checked = 0;
    for (int k = 0; k + 2 <= n; ++k) {
        int offset = index_set_size(k + 1);
        for (std::uint64_t prefix = 0; prefix < (std::uint64_t{1} << offset); ++prefix) {
            auto ct = conditional_transform(n, k, prefix);
            // empty set: E[W(n) | prefix] = W(k + 1)
            if (ct.coefficient(0) != Dyadic(ct.walk_position)) {
                return fail(name, "E[W(n) | prefix] != W(k+1) at k=" + std::to_string(k));
            }
            for (std::uint64_t free_mask = 1; free_mask < ct.raw.size(); ++free_mask) {
                auto sites = sites_of_mask(free_mask << offset);
                ++checked;
                if (!is_admissible(sites, n)) {
                    if (ct.raw[free_mask] != 0) {
                        return fail(name, "non-admissible " + describe(sites) + " has nonzero conditional coefficient");
                    }
                    continue;
                }
                auto set = SpectralSet::make(sites, n);
                Dyadic closed = conditional_coefficient(set, k, ct.walk_position);
                if (closed != ct.coefficient(free_mask)) {
                    return fail(name, describe(sites) + " k=" + std::to_string(k) + ": oracle " +
                                          ct.coefficient(free_mask).to_string() + " vs closed form " + closed.to_string());
                }
            }
        }
    }
    return pass(name, std::to_string(checked) + " (set, k, prefix) triples");
}

CheckResult check_walk_zero_law(int n) {
    auto law = walk_zero_mixture(n);
    std::size_t expected_sets = (std::size_t{1} << n) - 1;
    if (law.size() != expected_sets) {
        return fail("walk_zero_law", "walk reaches " + std::to_string(law.size()) + " time sets, expected " +
                                         std::to_string(expected_sets));
    }
    for (auto const& [set, prob] : law) {
        mpq_class formula = r_distribution(set);
        if (prob != formula) {
            return fail("walk_zero_law", "R=" + describe(set.times()) + ": walk " + prob.get_str() + " vs " + formula.get_str());
        }
    }
    return pass("walk_zero_law", std::to_string(law.size()) + " time sets");
}

CheckResult check_size_dp(int n) {
    std::vector<Dyadic> by_size(static_cast<std::size_t>(n));
    for_each_admissible(n, [&](std::span<Site const> sites) {
        Dyadic d = p(sites.front().x, sites.front().y) * q_of_chain(sites);
        by_size[sites.size() - 1] += d * d;
    });
    auto dist = size_distribution(n);
    mpq_class mean = 0;
    for (int m = 1; m <= n; ++m) {
        mpq_class enumerated = by_size[m - 1].to_rational() / n;
        enumerated.canonicalize();
        if (enumerated != dist.exact[m - 1]) {
            return fail("size_dp", "m=" + std::to_string(m) + ": enumeration " + enumerated.get_str() + " vs DP " +
                                       dist.exact[m - 1].get_str());
        }
        mean += enumerated * m;
    }
    mean.canonicalize();
    if (mean != *expected_size(n).exact) return fail("size_dp", "mean size " + mean.get_str() + " vs closed form");
    return pass("size_dp");
}

CheckResult check_noise_dp(int n) {
    std::vector<Dyadic> by_size(static_cast<std::size_t>(n));
    for_each_admissible(n, [&](std::span<Site const> sites) {
        Dyadic d = p(sites.front().x, sites.front().y) * q_of_chain(sites);
        by_size[sites.size() - 1] += d * d;
    });
    for (mpq_class eps : {mpq_class(0), mpq_class(1, 10), mpq_class(1, 4), mpq_class(3, 8), mpq_class(1, 2)}) {
        mpq_class lambda = 1 - 2 * eps;
        mpq_class spectral_sum = 0;
        mpq_class power = lambda;
        for (int m = 1; m <= n; ++m) {
            spectral_sum += by_size[m - 1].to_rational() * power;
            power *= lambda;
        }
        spectral_sum /= n;
        spectral_sum.canonicalize();
        mpq_class dp = *noise_correlation_exact(n, eps).exact;
        if (dp != spectral_sum) {
            return fail("noise_dp", "eps=" + eps.get_str() + ": DP " + dp.get_str() + " vs spectral sum " + spectral_sum.get_str());
        }
    }
    return pass("noise_dp", "5 flip rates");
}

CheckResult check_gap_normalization(int max_gap) {
    for (int gap = 1; gap <= max_gap; ++gap) {
        auto law = increment_law(gap);
        if (law.total() != gap_prob(gap)) return fail("gap_normalization", "gap " + std::to_string(gap));
    }
    for (int x = 0; x <= max_gap; ++x) {
        if (start_law(x).total() != return_prob(x)) return fail("gap_normalization", "start law at x=" + std::to_string(x));
    }
    return pass("gap_normalization", "gaps 1.." + std::to_string(max_gap));
}

std::vector<CheckResult> run_certification(VerifyOptions const& options) {
    int n = options.n;
    if (n < 1) throw std::invalid_argument("horizon must be >= 1");
    if (n > kVerifyWalkLimit) {
        throw std::invalid_argument("exact certification is limited to n <= " + std::to_string(kVerifyWalkLimit) +
                                    " (walk-zero enumeration and admissible-set enumeration grow exponentially)");
    }
    std::vector<CheckResult> results;
    if (options.oracle) {
        // refuses with a cost message above the limit
        auto transform = brute_force_transform(n, options.oracle_limit);
        results.push_back(check_oracle_matches_formula(transform));
        results.push_back(check_parseval_oracle(transform));
        results.push_back(check_oracle_projection(transform));
        if (n <= kOracleLimit) results.push_back(check_conditional_closed_form(n));
    }
    results.push_back(check_parseval_formula(n));
    results.push_back(check_projection(n));
    results.push_back(check_cumulative(n));
    results.push_back(check_walk_zero_law(n));
    results.push_back(check_size_dp(n));
    results.push_back(check_noise_dp(n));
    results.push_back(check_gap_normalization(30));
    return results;
}

}  // namespace coalflow
