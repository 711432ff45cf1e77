#include "coalflow/stats.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/chi_squared.hpp>

namespace coalflow {

ChiSquareResult chi_square_gof(std::span<std::uint64_t const> counts, std::span<double const> probs,
                               double min_expected) {
    if (counts.size() != probs.size()) throw std::invalid_argument("counts and probs differ in length");
    double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}));
    if (total <= 0) throw std::invalid_argument("no observations");

    struct Cell {
        double observed = 0;
        double expected = 0;
    };
    std::vector<Cell> cells;
    Cell pooled;
    for (std::size_t i = 0; i < counts.size(); ++i) {
        double expected = probs[i] * total;
        auto observed = static_cast<double>(counts[i]);
        if (probs[i] <= 0.0) {
            if (counts[i] > 0) {
                return {std::numeric_limits<double>::infinity(), 0, 0.0, counts.size()};
            }
            continue;
        }
        if (expected < min_expected) {
            pooled.observed += observed;
            pooled.expected += expected;
        } else {
            cells.push_back({observed, expected});
        }
    }
    if (pooled.expected > 0) {
        if (pooled.expected >= min_expected || cells.empty()) {
            cells.push_back(pooled);
        } else {
            auto smallest = std::min_element(cells.begin(), cells.end(),
                                             [](Cell const& a, Cell const& b) { return a.expected < b.expected; });
            smallest->observed += pooled.observed;
            smallest->expected += pooled.expected;
        }
    }

    ChiSquareResult result;
    result.bins = cells.size();
    for (auto const& c : cells) {
        double diff = c.observed - c.expected;
        result.statistic += diff * diff / c.expected;
    }
    result.dof = static_cast<int>(cells.size()) - 1;
    if (result.dof < 1) {
        result.p_value = 1.0;
        return result;
    }
    boost::math::chi_squared dist(result.dof);
    result.p_value = boost::math::cdf(boost::math::complement(dist, result.statistic));
    return result;
}

}  // namespace coalflow
