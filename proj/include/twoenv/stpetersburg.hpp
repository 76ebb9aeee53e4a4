#pragma once

// The St. Petersburg two-envelope game, truncated at k_max coin flips.
//
// Three equivalent parameterizations produce the same law of the envelope
// amount (2^k with probability 2^-k):
//   pure         one-point state space, the effect of 2^k is 2^-k;
//   statistical  state space {2^1, ..., 2^k_max} with counting measure, an
//                identity observable, and prior mass 2^-m on 2^m;
//   pins         the unit interval cut into pins (2^-k, 2^(1-k)] worth 2^k,
//                with the uniform prior.
// Truncation drops the tail mass 2^-k_max; the kept masses are renormalized
// and the pre-normalization masses stay available as exact dyadics.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "twoenv/measure_core.hpp"
#include "twoenv/measurement.hpp"
#include "twoenv/observable.hpp"

namespace twoenv {

enum class StpFormulation { pure, statistical, pins };

std::string to_string(StpFormulation f);
StpFormulation parse_formulation(const std::string& name);

/// Largest supported truncation depth (exact dyadic bookkeeping in 64 bits).
inline constexpr int kMaxStpDepth = 60;

struct StPetersburgModel {
  int k_max = 0;
  StpFormulation formulation = StpFormulation::pure;
  Observable observable;
  PureState state;                  // pure formulation
  std::optional<MixedState> prior;  // statistical and pin formulations
  double tail_mass = 0.0;           // 2^-k_max

  /// Pre-normalization mass of 2^k is 2^-k = numerator(k) / 2^k_max.
  std::uint64_t raw_numerator(int k) const;
  /// Exact sum of the pre-normalization masses, over the denominator 2^k_max.
  std::uint64_t raw_numerator_sum() const;
  double raw_mass(int k) const;
};

/// Throws DomainError unless 1 <= k_max <= kMaxStpDepth.
StPetersburgModel build_stp(StpFormulation formulation, int k_max);

/// Law of one envelope's amount.
OutcomeDistribution stp_outcome_distribution(const StPetersburgModel& model);

struct TruncatedExpectation {
  int k_max = 0;
  double partial_sum = 0.0;  // sum over k <= k_max of payoff(2^k) 2^-k
  double normalized = 0.0;   // expectation under the renormalized model
  bool diverges = false;     // the untruncated series diverges
};

/// Truncated expectation of payoff(amount). The divergence flag comes from a
/// ratio test on the untruncated terms payoff(2^k) 2^-k far in the tail:
/// terms that do not shrink mean the full series diverges.
TruncatedExpectation stp_truncated_expectation(
    const StPetersburgModel& model,
    const std::function<double(double)>& payoff = [](double x) { return x; });

struct ProbOtherGreater {
  int m = 0;
  std::uint64_t exact_denominator = 0;  // P(y > 2^m) = 1 / exact_denominator
  double exact = 0.0;
  double truncated = 0.0;  // same probability under the truncated model
};

/// P(y > 2^m) for an independent second envelope y.
ProbOtherGreater stp_prob_other_greater(int m, int k_max);

/// Independent draws (x, y) of both envelopes.
struct StpStratum {
  int m = 0;             // x = 2^m
  std::size_t count = 0;
  double mean_y = 0.0;            // empirical E[y | x = 2^m]
  double frac_y_greater = 0.0;    // empirical P(y > x | x = 2^m)
  double prob_y_greater = 0.0;    // truncated-model value of P(y > 2^m)
};

struct StpRecord {
  std::uint64_t seed = 0;
  std::size_t blocks = 0;  // streams 0 .. blocks-1 were used
  std::size_t trials = 0;
  int k_max = 0;
  double frac_y_greater = 0.0;  // empirical P(y > x)
  double frac_x_greater = 0.0;  // empirical P(x > y)
  double frac_equal = 0.0;
  std::vector<std::size_t> x_counts;  // index k-1 counts x = 2^k
  std::vector<std::size_t> y_counts;
  std::vector<StpStratum> strata;     // only strata with count > 0
  std::string expectation_criterion;
  std::string probability_criterion;
};

StpRecord stp_parallel_experiment(const StPetersburgModel& model, std::size_t trials,
                                  std::uint64_t seed);

/// Empirical frequency of y > 2^m among the y draws of a record.
double empirical_frequency_y_greater(const StpRecord& record, int m);

}  // namespace twoenv
