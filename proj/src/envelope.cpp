#include "twoenv/envelope.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twoenv/error.hpp"
#include "twoenv/measurement.hpp"

namespace twoenv {

namespace {

constexpr std::size_t kMonteCarloBlock = 1 << 16;

EnvelopePairModel assemble(const StateSpace& space, std::vector<double> v1,
                           std::vector<double> v2) {
  for (std::size_t i = 0; i < space.size(); ++i) {
    if (!(v1[i] >= 0.0) || !(v2[i] >= 0.0) || !std::isfinite(v1[i]) || !std::isfinite(v2[i])) {
      throw DomainError("envelope payouts must be finite and non-negative");
    }
  }
  Observable o1 = deterministic_observable(space, v1);
  Observable o2 = deterministic_observable(space, v2);
  const std::vector<Observable> parts = {o1, o2};
  const std::vector<double> halves = {0.5, 0.5};
  Observable mixed = mix_observables(parts, halves);
  Observable quasi = quasi_product_envelope(o1, o2);
  return {space, std::move(v1), std::move(v2), std::move(mixed), std::move(quasi)};
}

std::string nearest_labels(const StateSpace& space, double x) {
  auto pts = space.points();
  auto it = std::lower_bound(pts.begin(), pts.end(), x);
  std::ostringstream out;
  out.precision(17);
  if (it != pts.begin()) out << *(it - 1);
  if (it != pts.begin() && it != pts.end()) out << " and ";
  if (it != pts.end()) out << *it;
  return out.str();
}

// Ratio test on per-octave contributions x^2 h(x) beyond the grid.
PriorTail classify_tail(const Density& density, double hi) {
  if (!std::isfinite(density.mean)) return PriorTail::infinite_mean;
  double prev = -1.0;
  bool growing = true;
  for (int j = 4; j <= 12; ++j) {
    const double x = std::ldexp(hi, j);
    const double c = x * x * density.pdf(x);
    if (prev >= 0.0 && c < prev * (1.0 - 1e-9)) growing = false;
    prev = c;
  }
  return (growing && prev > 0.0) ? PriorTail::infinite_mean : PriorTail::finite_mean;
}

}  // namespace

EnvelopePairModel make_envelope_model(const StateSpace& space,
                                      const std::function<double(double)>& v1,
                                      const std::function<double(double)>& v2) {
  auto pts = space.points();
  std::vector<double> a(pts.size());
  std::vector<double> b(pts.size());
  std::transform(pts.begin(), pts.end(), a.begin(), v1);
  std::transform(pts.begin(), pts.end(), b.begin(), v2);
  return assemble(space, std::move(a), std::move(b));
}

EnvelopePairModel make_doubling_model(const StateSpace& space) {
  auto pts = space.points();
  std::vector<double> a(pts.begin(), pts.end());
  std::vector<double> b(pts.size());
  std::transform(pts.begin(), pts.end(), b.begin(), [](double w) { return 2.0 * w; });
  return assemble(space, std::move(a), std::move(b));
}

EnvelopePairModel make_fixed_pair_model(double v1, double v2) {
  StateSpace one_point({v1}, {1.0});
  return assemble(one_point, {v1}, {v2});
}

NaiveExpectation naive_other_expectation(double alpha) {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) {
    throw DomainError("naive_other_expectation: alpha must be a non-negative amount");
  }
  NaiveExpectation r;
  r.alpha = alpha;
  r.e_other = 0.5 * (alpha / 2.0) + 0.5 * (2.0 * alpha);
  r.annotation =
      "invalid reasoning: the measured value alpha only narrows the state to (alpha/2, alpha) "
      "or (alpha, 2 alpha); no probability 1/2 is assigned to either, so this expectation is "
      "meaningless";
  return r;
}

double pure_switch_gain(const EnvelopePairModel& model, PureState s) {
  // Only the row at s carries probability; reading it directly avoids copying
  // the whole alphabet per call.
  check_on(model.space, s);
  CompensatedSum gain;
  for (const auto& e : model.quasi.row(s.index)) {
    const Outcome& xy = model.quasi.outcomes()[e.outcome];
    gain.add(e.effect * (xy[1] - xy[0]));
  }
  return gain.value();
}

LlnRecord lln_experiment(const EnvelopePairModel& model, PureState s, std::size_t trials,
                         RngStream rng) {
  if (trials == 0) throw DomainError("lln_experiment: trials must be >= 1");
  check_on(model.space, s);
  LlnRecord r;
  r.seed = rng.seed();
  r.stream = rng.stream();
  r.trials = trials;
  r.v1 = model.v1[s.index];
  r.v2 = model.v2[s.index];
  r.target = (r.v1 + r.v2) / 2.0;

  const auto draws = sample(model.quasi, s, rng, trials);
  std::vector<double> you(trials);
  std::vector<double> host(trials);
  for (std::size_t t = 0; t < trials; ++t) {
    const Outcome& xy = model.quasi.outcomes()[draws[t]];
    you[t] = xy[0];
    host[t] = xy[1];
  }
  r.avg_you = lln_running_average(you);
  r.avg_host = lln_running_average(host);
  return r;
}

Density make_density(const std::string& name, const std::vector<double>& params) {
  auto need = [&](std::size_t k) {
    if (params.size() != k) {
      std::ostringstream msg;
      msg << "density '" << name << "' takes " << k << " parameter(s), got " << params.size();
      throw DomainError(msg.str());
    }
    for (double p : params) {
      if (!std::isfinite(p)) throw DomainError("density parameters must be finite");
    }
  };
  Density d;
  d.name = name;
  d.params = params;
  if (name == "exp") {
    need(1);
    const double rate = params[0];
    if (!(rate > 0.0)) throw DomainError("exp density needs rate > 0");
    d.pdf = [rate](double x) { return x < 0.0 ? 0.0 : rate * std::exp(-rate * x); };
    d.mean = 1.0 / rate;
  } else if (name == "uniform") {
    need(2);
    const double a = params[0];
    const double b = params[1];
    if (!(a >= 0.0 && a < b)) throw DomainError("uniform density needs 0 <= a < b");
    d.pdf = [a, b](double x) { return (x >= a && x <= b) ? 1.0 / (b - a) : 0.0; };
    d.mean = (a + b) / 2.0;
  } else if (name == "gamma") {
    need(2);
    const double shape = params[0];
    const double scale = params[1];
    if (!(shape > 0.0 && scale > 0.0)) throw DomainError("gamma density needs shape, scale > 0");
    const double log_norm = std::lgamma(shape) + shape * std::log(scale);
    d.pdf = [shape, scale, log_norm](double x) {
      if (x <= 0.0) return 0.0;
      return std::exp((shape - 1.0) * std::log(x) - x / scale - log_norm);
    };
    d.mean = shape * scale;
  } else if (name == "pareto") {
    need(2);
    const double x_min = params[0];
    const double shape = params[1];
    if (!(x_min > 0.0 && shape > 0.0)) throw DomainError("pareto density needs x_min, shape > 0");
    d.pdf = [x_min, shape](double x) {
      return x < x_min ? 0.0 : shape * std::pow(x_min, shape) / std::pow(x, shape + 1.0);
    };
    d.mean = shape > 1.0 ? shape * x_min / (shape - 1.0) : std::numeric_limits<double>::infinity();
  } else {
    throw DomainError("unknown density '" + name + "' (expected exp, uniform, gamma, pareto)");
  }
  return d;
}

BayesianEnvelope build_bayesian_envelope(const Density& density, const DyadicGrid& grid) {
  StateSpace space = make_dyadic_grid(grid.hi, grid.n, grid.per_octave);
  DensityState ds = mixed_from_density(space, density.pdf);
  EnvelopePairModel model = make_doubling_model(space);
  const double truncated = 1.0 - ds.normalizer;
  return {density,       grid, std::move(model), std::move(ds.state), ds.normalizer,
          truncated,     classify_tail(density, grid.hi)};
}

double outcome_density(const BayesianEnvelope& env, double x) {
  const StateSpace& space = env.model.space;
  const double step = std::exp2(0.5 / static_cast<double>(env.grid.per_octave));
  const double lower = space.point(0) / step;
  const double upper = space.point(space.size() - 1) * step;
  auto h = [&](double w) {
    return (w >= lower && w <= upper) ? env.density.pdf(w) / env.normalizer : 0.0;
  };
  return h(x / 2.0) / 4.0 + h(x) / 2.0;
}

double outcome_density_mass(const BayesianEnvelope& env) {
  const StateSpace& space = env.model.space;
  CompensatedSum total;
  for (const auto& x : env.model.observable.outcomes()) {
    const double v = x.value();
    std::size_t cell = space.find(v);
    double width = 0.0;
    if (cell < space.size()) {
      width = space.weight(cell);
    } else {
      cell = space.find(v / 2.0);
      if (cell == space.size()) throw DomainError("outcome_density_mass: outcome off the grid");
      width = 2.0 * space.weight(cell);
    }
    total.add(outcome_density(env, v) * width);
  }
  return total.value();
}

double measured_value_expectation(const BayesianEnvelope& env) {
  const OutcomeDistribution d = statistical_outcome_distribution(env.model.observable, env.prior);
  return expectation(d, [](const Outcome& x) { return x.value(); });
}

BayesianReport bayesian_envelope_report(const BayesianEnvelope& env, double alpha) {
  const StateSpace& space = env.model.space;
  const std::size_t large = space.find(alpha);
  const std::size_t small = space.find(alpha / 2.0);
  if (large == space.size() || small == space.size()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "alpha = " << alpha << " needs both alpha and alpha/2 on the grid; ";
    if (large == space.size()) {
      msg << "nearest grid values to alpha: " << nearest_labels(space, alpha);
    } else {
      msg << "alpha/2 = " << alpha / 2.0 << " is off the grid (nearest: "
          << nearest_labels(space, alpha / 2.0) << ")";
    }
    throw DomainError(msg.str());
  }

  BayesianReport r;
  r.alpha = alpha;
  const MixedState post = bayes_posterior(env.model.observable, env.prior, Outcome(alpha));
  r.w_small = post.mass(small);
  r.w_large = post.mass(large);
  r.p_alpha = evidence(env.model.observable, env.prior, Outcome(alpha));
  r.p_alpha_density = outcome_density(env, alpha);
  r.conditional_gain = (-alpha / 2.0) * r.w_small + alpha * r.w_large;
  r.unconditional_gain = posterior_switch_gain(env.model.quasi, env.prior, env.tail);
  r.prior_mean = env.prior.mean();
  r.measured_expectation = measured_value_expectation(env);
  return r;
}

MonteCarloGain monte_carlo_switch_gain(const BayesianEnvelope& env, std::size_t trials,
                                       std::uint64_t seed) {
  if (trials < 2) throw DomainError("monte_carlo_switch_gain: needs at least 2 trials");
  const std::size_t blocks = (trials + kMonteCarloBlock - 1) / kMonteCarloBlock;
  std::vector<double> sums(blocks, 0.0);
  std::vector<double> squares(blocks, 0.0);
  for_each_block(seed, trials, kMonteCarloBlock,
                 [&](RngStream& rng, std::size_t first, std::size_t count) {
                   const auto draws = sample(env.model.quasi, env.prior, rng, count);
                   CompensatedSum s;
                   CompensatedSum q;
                   for (auto k : draws) {
                     const Outcome& xy = env.model.quasi.outcomes()[k];
                     const double gain = xy[1] - xy[0];
                     s.add(gain);
                     q.add(gain * gain);
                   }
                   sums[first / kMonteCarloBlock] = s.value();
                   squares[first / kMonteCarloBlock] = q.value();
                 });
  CompensatedSum s;
  CompensatedSum q;
  for (std::size_t b = 0; b < blocks; ++b) {
    s.add(sums[b]);
    q.add(squares[b]);
  }
  const double n = static_cast<double>(trials);
  MonteCarloGain r;
  r.trials = trials;
  r.mean = s.value() / n;
  const double variance = std::max(0.0, (q.value() - n * r.mean * r.mean) / (n - 1.0));
  r.standard_error = std::sqrt(variance / n);
  return r;
}

}  // namespace twoenv
