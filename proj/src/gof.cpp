#include "twoenv/gof.hpp"

#include <boost/math/distributions/chi_squared.hpp>
#include <vector>

#include "twoenv/error.hpp"

namespace twoenv {

ChiSquareResult chi_square_gof(std::span<const std::size_t> counts, std::span<const double> probs,
                               double min_expected) {
  if (counts.size() != probs.size()) throw DomainError("chi_square_gof: size mismatch");
  double n = 0.0;
  for (auto c : counts) n += static_cast<double>(c);
  if (n == 0.0) throw DomainError("chi_square_gof: no observations");

  std::vector<double> observed;
  std::vector<double> expected;
  double obs_acc = 0.0;
  double exp_acc = 0.0;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    if (probs[k] == 0.0) {
      if (counts[k] != 0) return {0.0, 0, 0.0, 0};
      continue;
    }
    obs_acc += static_cast<double>(counts[k]);
    exp_acc += n * probs[k];
    if (exp_acc >= min_expected) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
      obs_acc = exp_acc = 0.0;
    }
  }
  if (exp_acc > 0.0 || obs_acc > 0.0) {
    if (expected.empty()) {
      observed.push_back(obs_acc);
      expected.push_back(exp_acc);
    } else {
      observed.back() += obs_acc;
      expected.back() += exp_acc;
    }
  }

  ChiSquareResult r;
  r.pooled_bins = expected.size();
  for (std::size_t k = 0; k < expected.size(); ++k) {
    const double d = observed[k] - expected[k];
    r.statistic += d * d / expected[k];
  }
  if (expected.size() < 2) {
    r.degrees_of_freedom = 0;
    r.p_value = 1.0;
    return r;
  }
  r.degrees_of_freedom = expected.size() - 1;
  boost::math::chi_squared dist(static_cast<double>(r.degrees_of_freedom));
  r.p_value = boost::math::cdf(boost::math::complement(dist, r.statistic));
  return r;
}

}  // namespace twoenv
