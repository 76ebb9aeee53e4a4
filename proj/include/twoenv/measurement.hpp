#pragma once

// Executing measurements: exact outcome laws for pure and statistical
// measurements, expectations, seeded sampling and running averages.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "twoenv/measure_core.hpp"
#include "twoenv/observable.hpp"
#include "twoenv/rng.hpp"

namespace twoenv {

/// Law of the measured value, aligned with the observable's alphabet.
struct OutcomeDistribution {
  std::vector<Outcome> outcomes;
  std::vector<double> probs;

  /// Probability of `x`; zero when x is not in the alphabet.
  double prob(const Outcome& x) const;
};

/// Pure measurement at a known point state: probs[x] = effect(s, x).
OutcomeDistribution pure_outcome_distribution(const Observable& o, PureState s);

/// Statistical measurement: probs[x] = sum_i mass_i * effect(i, x).
OutcomeDistribution statistical_outcome_distribution(const Observable& o, const MixedState& rho);

using Payoff = std::function<double(const Outcome&)>;

/// sum_x payoff(x) * probs[x]. Throws DomainError when the payoff is NaN or
/// infinite on an outcome of positive probability.
double expectation(const OutcomeDistribution& d, const Payoff& payoff);

/// Expectation on the extended half-line: +infinity payoffs are allowed and
/// reported through `infinite` rather than as a floating infinity.
struct ExtendedExpectation {
  double finite_part = 0.0;  // contribution of outcomes with finite payoff
  bool infinite = false;
};
ExtendedExpectation expectation_extended(const OutcomeDistribution& d, const Payoff& payoff);

/// n i.i.d. outcome indices (into o.outcomes()) at pure state s.
std::vector<std::size_t> sample(const Observable& o, PureState s, RngStream& rng, std::size_t n);

/// n i.i.d. outcome indices under a mixed state, drawn in two stages: a grid
/// point from rho, then an outcome from that point's effects.
std::vector<std::size_t> sample(const Observable& o, const MixedState& rho, RngStream& rng,
                                std::size_t n);

/// Two-stage sampling that also reports the drawn grid point of every sample.
struct StateOutcomeSample {
  std::vector<std::size_t> states;
  std::vector<std::size_t> outcomes;
};
StateOutcomeSample sample_with_states(const Observable& o, const MixedState& rho, RngStream& rng,
                                      std::size_t n);

/// n i.i.d. indices drawn directly from an outcome law.
std::vector<std::size_t> sample(const OutcomeDistribution& d, RngStream& rng, std::size_t n);

/// Sampler for a finite probability vector by inversion of its cumulative sum.
class DiscreteSampler {
 public:
  explicit DiscreteSampler(std::span<const double> probs);
  std::size_t operator()(double u) const;

 private:
  std::vector<double> cdf_;
};

/// Splits `total` draws into blocks of `block_size`; block b uses stream b of
/// `seed`, so the result does not depend on the number of worker threads.
/// `body(rng, first, count)` is called once per block, possibly concurrently.
void for_each_block(std::uint64_t seed, std::size_t total, std::size_t block_size,
                    const std::function<void(RngStream&, std::size_t, std::size_t)>& body);

/// Prefix means of `samples` (compensated summation). Throws DomainError on
/// empty input.
std::vector<double> lln_running_average(std::span<const double> samples);

/// Occurrence counts of each alphabet index.
std::vector<std::size_t> count_outcomes(std::span<const std::size_t> indices,
                                        std::size_t alphabet_size);

}  // namespace twoenv
