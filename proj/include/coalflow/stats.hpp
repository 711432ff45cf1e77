#pragma once

#include <cstdint>
#include <span>

namespace coalflow {

struct ChiSquareResult {
    double statistic = 0.0;
    int dof = 0;
    double p_value = 1.0;
    std::size_t bins = 0;
};

/// Pearson goodness-of-fit of `counts` against `probs` (same indexing).
/// Cells with expected count below `min_expected` are pooled into one cell;
/// if that pooled cell is still too small it is merged into the smallest
/// regular cell. A positive count on a zero-probability cell gives p = 0.
ChiSquareResult chi_square_gof(std::span<std::uint64_t const> counts, std::span<double const> probs,
                               double min_expected = 5.0);

}  // namespace coalflow
