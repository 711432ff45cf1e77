#include <doctest.h>

#include <cmath>
#include <map>

#include "coalflow/oracle.hpp"
#include "coalflow/spectral.hpp"
#include "support.hpp"

using namespace coalflow;
using namespace testing_support;

namespace {

// Frozen from an exhaustive direct-expectation computation over all 2^6 sign
// arrays at n = 3. Every admissible set missing here has coefficient zero.
std::map<std::vector<Site>, mpq_class> const& table_n3() {
    static std::map<std::vector<Site>, mpq_class> const table{
        {{{0, 0}}, q(1)},
        {{{0, 0}, {1, -1}}, q(-1, 2)},
        {{{0, 0}, {1, -1}, {2, -2}}, q(1, 4)},
        {{{0, 0}, {1, -1}, {2, 0}}, q(-1, 4)},
        {{{0, 0}, {1, 1}}, q(1, 2)},
        {{{0, 0}, {1, 1}, {2, 0}}, q(-1, 4)},
        {{{0, 0}, {1, 1}, {2, 2}}, q(1, 4)},
        {{{0, 0}, {2, -2}}, q(-1, 4)},
        {{{0, 0}, {2, 2}}, q(1, 4)},
        {{{1, -1}}, q(1, 2)},
        {{{1, -1}, {2, -2}}, q(-1, 4)},
        {{{1, -1}, {2, 0}}, q(1, 4)},
        {{{1, 1}}, q(1, 2)},
        {{{1, 1}, {2, 0}}, q(-1, 4)},
        {{{1, 1}, {2, 2}}, q(1, 4)},
        {{{2, -2}}, q(1, 4)},
        {{{2, 0}}, q(1, 2)},
        {{{2, 2}}, q(1, 4)},
    };
    return table;
}

std::vector<int> times_of(std::span<Site const> sites) {
    std::vector<int> xs;
    for (auto const& s : sites) xs.push_back(s.x);
    return xs;
}

}  // namespace

TEST_SUITE("spectral") {
    TEST_CASE("admissibility") {
        std::vector<Site> ok{{0, 0}, {1, 1}, {3, -1}};
        CHECK(is_admissible(ok, 4));
        CHECK_FALSE(is_admissible(ok, 3));
        std::vector<Site> jump{{1, 1}, {2, -2}};
        CHECK_FALSE(is_admissible(jump, 3));
        std::vector<Site> same_time{{2, 0}, {2, 2}};
        CHECK_FALSE(is_admissible(same_time, 3));
        CHECK_FALSE(is_admissible(std::vector<Site>{}, 3));
        CHECK_THROWS_AS(SpectralSet::make(jump, 3), std::invalid_argument);
        auto unsorted = SpectralSet::make({{2, 0}, {0, 0}}, 3);
        CHECK(unsorted.front() == Site{0, 0});
    }

    TEST_CASE("coefficient examples") {
        std::vector<Site> origin{{0, 0}};
        CHECK(coefficient(origin, 1).d == Dyadic(1));
        CHECK(coefficient(origin, 5).d == Dyadic(1));
        std::vector<Site> pair{{0, 0}, {1, 1}};
        CHECK(coefficient(pair, 2).d == Dyadic::from_ratio(1, 1));
        CHECK(coefficient(pair, 2).squared() == q(1, 8));
        std::vector<Site> zero_gap{{0, 0}, {2, 0}};
        CHECK(coefficient(zero_gap, 3).d.is_zero());
        CHECK(coefficient(std::vector<Site>{}, 3).d.is_zero());
        std::vector<Site> far{{1, 1}, {2, -2}};
        CHECK(coefficient(far, 3).d.is_zero());
        CHECK(coefficient(origin, 4).coefficient_value() == doctest::Approx(0.5));
    }

    TEST_CASE("sites outside the index set are rejected") {
        CHECK_THROWS_AS(coefficient(std::vector<Site>{{0, 1}}, 3), std::invalid_argument);
        CHECK_THROWS_AS(coefficient(std::vector<Site>{{3, 1}}, 3), std::invalid_argument);
        CHECK_THROWS_AS(coefficient(std::vector<Site>{{1, 0}}, 3), std::invalid_argument);
        CHECK_THROWS_AS(coefficient(std::vector<Site>{{-1, 1}}, 3), std::invalid_argument);
    }

    TEST_CASE("frozen n = 2 table") {
        CHECK(coefficient(std::vector<Site>{{1, -1}}, 2).d == Dyadic::from_ratio(1, 1));
        CHECK(coefficient(std::vector<Site>{{0, 0}, {1, -1}}, 2).d == Dyadic::from_ratio(-1, 1));
        CHECK(coefficient(std::vector<Site>{{0, 0}, {1, 1}}, 2).d == Dyadic::from_ratio(1, 1));
        CHECK(enumerate_admissible(2).size() == 5);
    }

    TEST_CASE("frozen n = 3 table") {
        auto const& table = table_n3();
        std::size_t nonzero = 0;
        for (auto const& set : enumerate_admissible(3)) {
            Dyadic d = coefficient(set.sites(), 3).d;
            auto it = table.find(set.sites());
            if (it == table.end()) {
                CHECK(d.is_zero());
            } else {
                CHECK(rat(d) == it->second);
                ++nonzero;
            }
        }
        CHECK(nonzero == table.size());
    }

    TEST_CASE("closed form matches direct expectation for n <= 4") {
        for (int n = 1; n <= 4; ++n) {
            int sites = index_set_size(n);
            for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << sites); ++mask) {
                auto set = sites_of_mask(mask);
                CHECK(rat(coefficient(set, n).d) == naive_coefficient(n, mask));
            }
        }
    }

    TEST_CASE("admissible counts") {
        std::vector<std::size_t> const frozen{1, 5, 19, 67, 231, 791, 2703, 9231};
        for (int n = 1; n <= 8; ++n) {
            std::size_t count = 0;
            std::vector<Site> previous;
            bool ordered = true;
            for_each_admissible(n, [&](std::span<Site const> s) {
                std::vector<Site> current(s.begin(), s.end());
                if (count > 0 && !(previous < current)) ordered = false;
                if (!is_admissible(current, n)) ordered = false;
                previous = std::move(current);
                ++count;
            });
            CHECK(count == frozen[n - 1]);
            CHECK(ordered);
        }
        CHECK_THROWS_AS(enumerate_admissible(9), std::invalid_argument);
        CHECK(enumerate_admissible(9, 9).size() > 9231);
    }

    TEST_CASE("Parseval and projection by enumeration") {
        for (int n = 1; n <= 7; ++n) {
            Dyadic total;
            std::map<std::vector<int>, Dyadic> mass;
            for_each_admissible(n, [&](std::span<Site const> s) {
                Dyadic d = coefficient(s, n).d;
                total += d * d;
                mass[times_of(s)] += d * d;
            });
            CHECK(total == Dyadic(n));
            CHECK(mass.size() == (std::size_t{1} << n) - 1);
            for (auto const& [xs, m] : mass) CHECK(rat(m) / n == r_distribution(TimeSet::make(xs, n)));
        }
    }

    TEST_CASE("time projection examples") {
        CHECK(r_distribution(TimeSet::make({0}, 2)) == q(1, 2));
        CHECK(r_distribution(TimeSet::make({1}, 2)) == q(1, 4));
        CHECK(r_distribution(TimeSet::make({0, 1}, 2)) == q(1, 4));
        std::map<std::vector<int>, mpq_class> const n3{{{0}, q(1, 3)},     {{0, 1}, q(1, 6)}, {{0, 1, 2}, q(1, 12)},
                                                       {{0, 2}, q(1, 24)}, {{1}, q(1, 6)},    {{1, 2}, q(1, 12)},
                                                       {{2}, q(1, 8)}};
        for (auto const& [xs, prob] : n3) CHECK(r_distribution(TimeSet::make(xs, 3)) == prob);
        CHECK_THROWS_AS(TimeSet::make({0, 0}, 3), std::invalid_argument);
        CHECK_THROWS_AS(TimeSet::make({3}, 3), std::invalid_argument);
        CHECK_THROWS_AS(TimeSet::make({}, 3), std::invalid_argument);
    }

    TEST_CASE("projection law sums to one and has uniform top") {
        for (int n = 1; n <= 12; ++n) {
            mpq_class total = 0;
            std::vector<mpq_class> by_top(n);
            for (std::uint64_t subset = 1; subset < (std::uint64_t{1} << n); ++subset) {
                std::vector<int> xs;
                for (int x = 0; x < n; ++x) {
                    if ((subset >> x) & 1u) xs.push_back(x);
                }
                auto prob = r_distribution(TimeSet::make(xs, n));
                total += prob;
                by_top[xs.back()] += prob;
            }
            CHECK(total == 1);
            for (auto const& t : by_top) CHECK(t == q(1, n));
        }
    }

    TEST_CASE("cumulative law") {
        CHECK(r_cumulative(0, 4) == q(1, 4));
        CHECK(r_cumulative(3, 4) == 1);
        CHECK_THROWS_AS(r_cumulative(4, 4), std::invalid_argument);
        CHECK_THROWS_AS(r_cumulative(-1, 4), std::invalid_argument);
    }

    TEST_CASE("q depends only on increments") {
        auto g = rng(10);
        for (int trial = 0; trial < 300; ++trial) {
            std::vector<Site> chain;
            int x = static_cast<int>(uniform_int(g, 0, 5)), y = 0;
            int len = static_cast<int>(uniform_int(g, 1, 6));
            for (int i = 0; i < len; ++i) {
                chain.push_back({x, y});
                int dx = static_cast<int>(uniform_int(g, 1, 5));
                y += static_cast<int>(uniform_int(g, -dx, dx));
                x += dx;
            }
            int dx = static_cast<int>(uniform_int(g, 0, 7));
            int dy = static_cast<int>(uniform_int(g, -9, 9));
            std::vector<Site> shifted;
            for (auto const& s : chain) shifted.push_back({s.x + dx, s.y + dy});
            CHECK(q_of_chain(chain) == q_of_chain(shifted));
        }
    }

    TEST_CASE("conditional closed form at k = -1 reduces to the coefficient") {
        for (auto const& set : enumerate_admissible(5)) {
            CHECK(conditional_coefficient(set, -1, 0) == coefficient(set.sites(), 5).d);
        }
    }
}

TEST_SUITE("spectral.size") {
    TEST_CASE("frozen size distributions") {
        auto d1 = size_distribution(1);
        REQUIRE(d1.exact.size() == 1);
        CHECK(d1.exact[0] == 1);
        auto d2 = size_distribution(2);
        CHECK(d2.exact == std::vector<mpq_class>{q(3, 4), q(1, 4)});
        auto d3 = size_distribution(3);
        CHECK(d3.exact == std::vector<mpq_class>{q(5, 8), q(7, 24), q(1, 12)});
        CHECK(*expected_size(1).exact == 1);
        CHECK(*expected_size(2).exact == q(5, 4));
        CHECK(*expected_size(3).exact == q(35, 24));
        CHECK(*expected_size(5).exact == q(231, 128));
    }

    TEST_CASE("DP matches enumeration") {
        for (int n = 1; n <= 7; ++n) {
            std::vector<mpq_class> by_size(n);
            for_each_admissible(n, [&](std::span<Site const> s) {
                Dyadic d = coefficient(s, n).d;
                by_size[s.size() - 1] += rat(d * d) / n;
            });
            auto dist = size_distribution(n);
            for (int m = 0; m < n; ++m) CHECK(dist.exact[m] == by_size[m]);
        }
    }

    TEST_CASE("exact and floating modes") {
        CHECK(arithmetic_for(64) == Arithmetic::exact);
        CHECK(arithmetic_for(65) == Arithmetic::floating);
        auto exact = size_distribution(64);
        mpq_class total = 0;
        for (auto const& v : exact.exact) total += v;
        CHECK(total == 1);
        auto floating = size_distribution(300);
        CHECK(floating.exact.empty());
        double sum = 0.0, mean = 0.0;
        for (std::size_t i = 0; i < floating.values.size(); ++i) {
            sum += floating.values[i];
            mean += static_cast<double>(i + 1) * floating.values[i];
        }
        CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
        CHECK(mean == doctest::Approx(expected_size(300).value).epsilon(1e-10));
    }

    TEST_CASE("large-n mean") {
        auto e = expected_size(10'000);
        CHECK_FALSE(e.exact.has_value());
        // independent evaluation through lgamma
        double reference = 0.0;
        int n = 10'000;
        for (int j = 0; j < n; ++j) {
            double pj = std::exp(std::lgamma(2.0 * j + 1) - 2 * std::lgamma(j + 1.0) - 2.0 * j * std::log(2.0));
            reference += (n - j) * pj;
        }
        reference /= n;
        CHECK(e.value == doctest::Approx(reference).epsilon(1e-9));
        CHECK(std::abs(e.value / 100.0 - 4.0 / (3.0 * std::sqrt(M_PI))) < 0.05);
    }
}

TEST_SUITE("spectral.noise") {
    TEST_CASE("frozen values") {
        CHECK(*noise_correlation_exact(2, q(1, 4)).exact == q(7, 16));
        CHECK(*noise_correlation_exact(3, q(1, 10)).exact == q(547, 750));
        for (int n : {1, 5, 40}) {
            CHECK(*noise_correlation_exact(n, mpq_class(0)).exact == 1);
            CHECK(*noise_correlation_exact(n, q(1, 2)).exact == 0);
        }
    }

    TEST_CASE("agrees with the size distribution") {
        for (int n = 1; n <= 30; ++n) {
            auto dist = size_distribution(n);
            for (mpq_class eps : {q(1, 10), q(1, 3), q(2, 5)}) {
                mpq_class lambda = 1 - 2 * eps, power = lambda, sum = 0;
                for (int m = 0; m < n; ++m) {
                    sum += dist.exact[m] * power;
                    power *= lambda;
                }
                CHECK(*noise_correlation_exact(n, eps).exact == sum);
            }
        }
    }

    TEST_CASE("double overload and floating mode") {
        CHECK(noise_correlation_exact(3, 0.1).value == doctest::Approx(547.0 / 750.0));
        double previous = 1.0;
        for (double eps : {0.005, 0.01, 0.025, 0.05, 0.1, 0.2, 0.3, 0.5}) {
            auto v = noise_correlation_exact(500, eps);
            CHECK(v.mode == Arithmetic::floating);
            CHECK(v.value <= previous);
            previous = v.value;
        }
        CHECK(previous == doctest::Approx(0.0));
    }

    TEST_CASE("rejects flip rates outside [0, 1/2]") {
        CHECK_THROWS_AS(noise_correlation_exact(3, 0.6), std::invalid_argument);
        CHECK_THROWS_AS(noise_correlation_exact(3, -0.1), std::invalid_argument);
        CHECK_THROWS_AS(noise_correlation_exact(3, q(3, 5)), std::invalid_argument);
    }
}
