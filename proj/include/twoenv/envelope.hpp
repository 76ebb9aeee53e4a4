#pragma once

// The two-envelope game as a measurement problem.
//
// The state is the amount omega in the smaller envelope (more generally the
// pair of payouts V1(omega), V2(omega)). Opening your envelope is a
// measurement whose effect is 1/2 on each payout; the pair observable records
// (your amount, the host's amount). A pure state models the non-Bayesian
// game, a prior density over omega the Bayesian one.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "twoenv/inference.hpp"
#include "twoenv/measure_core.hpp"
#include "twoenv/observable.hpp"
#include "twoenv/rng.hpp"

namespace twoenv {

struct EnvelopePairModel {
  StateSpace space;
  std::vector<double> v1;  // payout of the first envelope at each grid point
  std::vector<double> v2;  // payout of the second envelope
  Observable observable;   // your amount: 1/2 (V1 + V2) mixture
  Observable quasi;        // (your amount, host's amount) pairs
};

/// General payout maps. Both must be non-negative on the grid.
EnvelopePairModel make_envelope_model(const StateSpace& space,
                                      const std::function<double(double)>& v1,
                                      const std::function<double(double)>& v2);

/// V1(omega) = omega, V2(omega) = 2 omega.
EnvelopePairModel make_doubling_model(const StateSpace& space);

/// One-point game with fixed payouts (v1, v2).
EnvelopePairModel make_fixed_pair_model(double v1, double v2);

/// The fallacious "other envelope" expectation (1/2)(alpha/2) + (1/2)(2 alpha).
struct NaiveExpectation {
  double alpha = 0.0;
  double e_other = 0.0;
  std::string annotation;
};
NaiveExpectation naive_other_expectation(double alpha);

/// Expected gain from switching at a known pure state: the two-term sum
/// (V2 - V1)/2 + (V1 - V2)/2 read off the pair observable's law.
double pure_switch_gain(const EnvelopePairModel& model, PureState s);

/// Repeated play at a fixed pure state: running averages of what you and the
/// host receive.
struct LlnRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
  std::size_t trials = 0;
  double v1 = 0.0;
  double v2 = 0.0;
  double target = 0.0;  // (V1 + V2) / 2
  std::vector<double> avg_you;
  std::vector<double> avg_host;
};
LlnRecord lln_experiment(const EnvelopePairModel& model, PureState s, std::size_t trials,
                         RngStream rng);

/// A named prior density family on (0, infinity).
struct Density {
  std::string name;
  std::vector<double> params;
  std::function<double(double)> pdf;
  double mean = 0.0;  // analytic mean; +infinity when it does not exist
};

/// exp(rate), uniform(a, b), gamma(shape, scale), pareto(x_min, shape).
/// Throws DomainError for unknown names or invalid parameters.
Density make_density(const std::string& name, const std::vector<double>& params);

/// Geometric grid parameters; see make_dyadic_grid.
struct DyadicGrid {
  double hi = 30.0;
  std::size_t n = 30000;
  std::size_t per_octave = 1000;
};

struct BayesianEnvelope {
  Density density;
  DyadicGrid grid;
  EnvelopePairModel model;
  MixedState prior;
  double normalizer = 0.0;      // grid integral of the density before renormalizing
  double truncated_mass = 0.0;  // 1 - normalizer: prior mass outside the grid
  PriorTail tail = PriorTail::finite_mean;
};

/// Doubling model on a dyadic grid with the prior discretized from `density`.
BayesianEnvelope build_bayesian_envelope(const Density& density, const DyadicGrid& grid);

/// Density of the measured value, h(x/2)/4 + h(x)/2, for the prior restricted
/// to the grid's support and renormalized.
double outcome_density(const BayesianEnvelope& env, double x);

/// Grid quadrature of outcome_density over the measured-value alphabet, each
/// value weighted by the width of its cell (the top octave's doubled values
/// have twice the width of their source cells).
double outcome_density_mass(const BayesianEnvelope& env);

/// Expected measured value, sum_x x p(x).
double measured_value_expectation(const BayesianEnvelope& env);

struct BayesianReport {
  double alpha = 0.0;
  double p_alpha = 0.0;            // probability of the grid value alpha
  double p_alpha_density = 0.0;    // outcome density at alpha
  double w_small = 0.0;            // posterior weight of (alpha/2, alpha)
  double w_large = 0.0;            // posterior weight of (alpha, 2 alpha)
  double conditional_gain = 0.0;   // (-alpha/2) w_small + alpha w_large
  SwitchGain unconditional_gain;
  double prior_mean = 0.0;
  double measured_expectation = 0.0;
};

/// Throws DomainError naming the nearest grid values when alpha or alpha/2 is
/// not a grid label.
BayesianReport bayesian_envelope_report(const BayesianEnvelope& env, double alpha);

/// Monte Carlo estimate of the expected switching gain: draw omega from the
/// prior, open an envelope, record other - yours.
struct MonteCarloGain {
  std::size_t trials = 0;
  double mean = 0.0;
  double standard_error = 0.0;
};
MonteCarloGain monte_carlo_switch_gain(const BayesianEnvelope& env, std::size_t trials,
                                       std::uint64_t seed);

}  // namespace twoenv
