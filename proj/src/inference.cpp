#include "twoenv/inference.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

#include "twoenv/error.hpp"

namespace twoenv {

namespace {

std::size_t require_outcome(const Observable& o, const Outcome& x, const char* what) {
  auto idx = o.index_of(x);
  if (!idx) {
    throw DomainError(std::string(what) + ": measured value " + x.to_string() +
                      " cannot be produced by any state");
  }
  return *idx;
}

void require_pairs(const Observable& o) {
  for (const auto& x : o.outcomes()) {
    if (x.arity() != 2) throw DomainError("switching gain needs an observable with pair outcomes");
  }
}

}  // namespace

MleResult fisher_mle(const Observable& o, const Outcome& x) {
  const std::size_t idx = require_outcome(o, x, "fisher_mle");
  const std::size_t n = o.space().size();
  MleResult r;
  r.likelihood.assign(n, 0.0);
  double sup = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    r.likelihood[i] = o.effect_at(i, idx);
    sup = std::max(sup, r.likelihood[i]);
  }
  if (!(sup > 0.0)) {
    throw DomainError("fisher_mle: measured value " + x.to_string() + " has zero likelihood");
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (r.likelihood[i] == sup) {
      r.likelihood[i] = 1.0;
      r.maximizers.push_back({i});
    } else {
      r.likelihood[i] /= sup;
    }
  }
  return r;
}

double evidence(const Observable& o, const MixedState& prior, const Outcome& x) {
  if (!(prior.space() == o.space())) {
    throw DomainError("bayes_posterior: prior and observable spaces differ");
  }
  auto idx = o.index_of(x);
  if (!idx) return 0.0;
  CompensatedSum s;
  for (std::size_t i = 0; i < o.space().size(); ++i) {
    if (prior.mass(i) == 0.0) continue;
    const double e = o.effect_at(i, *idx);
    if (e != 0.0) s.add(prior.mass(i) * e);
  }
  return s.value();
}

MixedState bayes_posterior(const Observable& o, const MixedState& prior, const Outcome& x) {
  const double z = evidence(o, prior, x);
  if (!(z > 0.0)) {
    throw DomainError("bayes_posterior: measured value " + x.to_string() +
                      " has zero evidence under the prior");
  }
  const std::size_t idx = *o.index_of(x);
  std::vector<double> post(o.space().size(), 0.0);
  for (std::size_t i = 0; i < post.size(); ++i) {
    if (prior.mass(i) == 0.0) continue;
    post[i] = prior.mass(i) * o.effect_at(i, idx) / z;
  }
  return MixedState(o.space(), std::move(post));
}

ConditionalGain conditional_switch_gain(const Observable& pair_observable,
                                        const MixedState& prior, double alpha) {
  require_pairs(pair_observable);
  if (!(prior.space() == pair_observable.space())) {
    throw DomainError("conditional_switch_gain: prior and observable spaces differ");
  }
  ConditionalGain r;
  r.alpha = alpha;
  CompensatedSum p;
  CompensatedSum g;
  std::vector<std::pair<std::size_t, double>> joint;
  const auto outcomes = pair_observable.outcomes();
  for (std::size_t i = 0; i < pair_observable.space().size(); ++i) {
    const double m = prior.mass(i);
    if (m == 0.0) continue;
    double a = 0.0;
    for (const auto& e : pair_observable.row(i)) {
      const Outcome& xy = outcomes[e.outcome];
      if (xy[0] != alpha) continue;
      a += m * e.effect;
      g.add(m * e.effect * (xy[1] - xy[0]));
    }
    if (a > 0.0) {
      joint.emplace_back(i, a);
      p.add(a);
    }
  }
  r.p_alpha = p.value();
  if (!(r.p_alpha > 0.0)) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "conditional_switch_gain: measured value " << alpha << " has zero evidence";
    throw DomainError(msg.str());
  }
  for (auto& [i, a] : joint) r.posterior.emplace_back(i, a / r.p_alpha);
  r.gain = g.value() / r.p_alpha;
  return r;
}

SwitchGain posterior_switch_gain(const Observable& pair_observable, const MixedState& prior,
                                 PriorTail tail) {
  require_pairs(pair_observable);
  if (!(prior.space() == pair_observable.space())) {
    throw DomainError("posterior_switch_gain: prior and observable spaces differ");
  }
  // Law of your amount alpha and the joint gain mass, keyed by alpha.
  std::map<double, std::pair<CompensatedSum, CompensatedSum>> by_alpha;
  const auto outcomes = pair_observable.outcomes();
  std::size_t terms = 0;
  double gross = 0.0;  // sum of |mass * effect * gain| over all (state, outcome) pairs
  for (std::size_t i = 0; i < pair_observable.space().size(); ++i) {
    const double m = prior.mass(i);
    if (m == 0.0) continue;
    for (const auto& e : pair_observable.row(i)) {
      const Outcome& xy = outcomes[e.outcome];
      auto& [p, g] = by_alpha[xy[0]];
      p.add(m * e.effect);
      g.add(m * e.effect * (xy[1] - xy[0]));
      gross += std::abs(m * e.effect * (xy[1] - xy[0]));
      ++terms;
    }
  }
  CompensatedSum total;
  double magnitude = 0.0;
  for (const auto& [alpha, pg] : by_alpha) {
    const double p_alpha = pg.first.value();
    if (!(p_alpha > 0.0)) continue;
    const double conditional = pg.second.value() / p_alpha;
    const double term = p_alpha * conditional;
    total.add(term);
    magnitude += std::abs(term);
  }
  SwitchGain r;
  r.value = total.value();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  r.error_bound = 4.0 * static_cast<double>(terms + by_alpha.size()) * eps * (gross + magnitude);
  if (tail == PriorTail::infinite_mean) {
    r.divergence_warning = true;
    r.warning =
        "prior mean is infinite: the zero expected switching gain only holds for priors "
        "with finite mean; the grid value reflects truncation";
  }
  return r;
}

}  // namespace twoenv
