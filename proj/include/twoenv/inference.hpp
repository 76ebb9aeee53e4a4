#pragma once

// State inference from one measured value: Fisher maximum likelihood for pure
// measurements and Bayes posteriors for statistical ones, plus the expected
// switching gain of the envelope game under a prior.

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "twoenv/measure_core.hpp"
#include "twoenv/observable.hpp"

namespace twoenv {

struct MleResult {
  /// Grid points where the normalized likelihood attains 1. Ties are never
  /// broken: several maximizers mean the measurement cannot tell them apart.
  std::vector<PureState> maximizers;
  /// Normalized likelihood f(x, omega_i) in [0, 1], one entry per grid point.
  std::vector<double> likelihood;

  /// States with zero likelihood cannot have produced the measured value.
  bool is_excluded(std::size_t i) const { return likelihood[i] == 0.0; }
};

/// f(x, omega_i) = effect(i, x) / max_j effect(j, x). With a finite alphabet
/// the limit over shrinking events is exact at the singleton {x}. Throws
/// DomainError when no state can produce x.
MleResult fisher_mle(const Observable& o, const Outcome& x);

/// posterior_i = prior_i * effect(i, x) / sum_j prior_j * effect(j, x).
/// Throws DomainError (naming x) when the evidence is zero.
MixedState bayes_posterior(const Observable& o, const MixedState& prior, const Outcome& x);

/// Evidence sum_i prior_i * effect(i, x).
double evidence(const Observable& o, const MixedState& prior, const Outcome& x);

/// Whether the prior mean is known to be finite. The grid alone cannot tell a
/// bounded support from a heavy tail, so callers that know the density say so.
enum class PriorTail { finite_mean, infinite_mean };

/// Switching gain for the envelope pair observable (outcomes are (you, other)
/// pairs) after seeing your own amount alpha.
struct ConditionalGain {
  double alpha = 0.0;
  double p_alpha = 0.0;  // probability of observing alpha
  /// Posterior over grid points given alpha, as (point index, weight).
  std::vector<std::pair<std::size_t, double>> posterior;
  /// E[other - alpha | you observed alpha].
  double gain = 0.0;
};

ConditionalGain conditional_switch_gain(const Observable& pair_observable,
                                        const MixedState& prior, double alpha);

struct SwitchGain {
  /// Integral over alpha of the conditional gain against the law of alpha.
  double value = 0.0;
  /// Floating-point error bound of the grid sum (the exact grid value is 0).
  double error_bound = 0.0;
  /// Set when the prior has infinite mean; the zero-gain identity does not
  /// apply then even though a finite grid value is still reported.
  bool divergence_warning = false;
  std::string warning;
};

/// Unconditional expected switching gain: the posterior-weighted gain at each
/// observable alpha, aggregated under the law of alpha.
SwitchGain posterior_switch_gain(const Observable& pair_observable, const MixedState& prior,
                                 PriorTail tail = PriorTail::finite_mean);

}  // namespace twoenv
