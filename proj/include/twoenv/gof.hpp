#pragma once

#include <cstddef>
#include <span>

namespace twoenv {

/// Pearson chi-square goodness-of-fit result.
struct ChiSquareResult {
  double statistic = 0.0;
  std::size_t degrees_of_freedom = 0;
  double p_value = 1.0;
  std::size_t pooled_bins = 0;
};

/// Tests observed counts against expected probabilities. Bins with expected
/// count below `min_expected` are pooled with their neighbours (in index
/// order) so the asymptotic chi-square law applies; zero-probability bins must
/// have zero counts (otherwise the p-value is 0).
ChiSquareResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs,
                               double min_expected = 5.0);

}  // namespace twoenv
