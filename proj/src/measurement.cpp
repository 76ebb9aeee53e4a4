#include "twoenv/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <thread>

#include "twoenv/error.hpp"

namespace twoenv {

double OutcomeDistribution::prob(const Outcome& x) const {
  auto it = std::lower_bound(outcomes.begin(), outcomes.end(), x);
  if (it == outcomes.end() || !(*it == x)) return 0.0;
  return probs[static_cast<std::size_t>(it - outcomes.begin())];
}

OutcomeDistribution pure_outcome_distribution(const Observable& o, PureState s) {
  check_on(o.space(), s);
  OutcomeDistribution d;
  d.outcomes.assign(o.outcomes().begin(), o.outcomes().end());
  d.probs.assign(d.outcomes.size(), 0.0);
  for (const auto& e : o.row(s.index)) d.probs[e.outcome] = e.effect;
  return d;
}

OutcomeDistribution statistical_outcome_distribution(const Observable& o, const MixedState& rho) {
  if (!(rho.space() == o.space())) {
    throw DomainError("statistical measurement: mixed state and observable spaces differ");
  }
  std::vector<CompensatedSum> acc(o.outcome_count());
  for (std::size_t i = 0; i < o.space().size(); ++i) {
    const double m = rho.mass(i);
    if (m == 0.0) continue;
    for (const auto& e : o.row(i)) acc[e.outcome].add(m * e.effect);
  }
  OutcomeDistribution d;
  d.outcomes.assign(o.outcomes().begin(), o.outcomes().end());
  d.probs.resize(acc.size());
  std::transform(acc.begin(), acc.end(), d.probs.begin(),
                 [](const CompensatedSum& s) { return s.value(); });
  return d;
}

double expectation(const OutcomeDistribution& d, const Payoff& payoff) {
  CompensatedSum s;
  for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
    if (d.probs[k] == 0.0) continue;
    const double v = payoff(d.outcomes[k]);
    if (!std::isfinite(v)) {
      std::ostringstream msg;
      msg << "expectation: payoff " << v << " at outcome " << d.outcomes[k].to_string()
          << " is not finite";
      throw DomainError(msg.str());
    }
    s.add(v * d.probs[k]);
  }
  return s.value();
}

ExtendedExpectation expectation_extended(const OutcomeDistribution& d, const Payoff& payoff) {
  ExtendedExpectation r;
  CompensatedSum s;
  for (std::size_t k = 0; k < d.outcomes.size(); ++k) {
    if (d.probs[k] == 0.0) continue;
    const double v = payoff(d.outcomes[k]);
    if (std::isnan(v) || v == -INFINITY) {
      throw DomainError("expectation: payoff at " + d.outcomes[k].to_string() +
                        " is NaN or -infinity");
    }
    if (v == INFINITY) {
      r.infinite = true;
      continue;
    }
    s.add(v * d.probs[k]);
  }
  r.finite_part = s.value();
  return r;
}

DiscreteSampler::DiscreteSampler(std::span<const double> probs) : cdf_(probs.size()) {
  CompensatedSum s;
  for (std::size_t k = 0; k < probs.size(); ++k) {
    s.add(probs[k]);
    cdf_[k] = s.value();
  }
  if (cdf_.empty() || !(cdf_.back() > 0.0)) throw DomainError("sampler: no positive mass");
}

std::size_t DiscreteSampler::operator()(double u) const {
  const double target = u * cdf_.back();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), target);
  if (it != cdf_.end()) return static_cast<std::size_t>(it - cdf_.begin());
  // Rounding pushed u past the total: take the last slot with positive mass.
  std::size_t k = cdf_.size() - 1;
  while (k > 0 && cdf_[k] == cdf_[k - 1]) --k;
  return k;
}

std::vector<std::size_t> sample(const Observable& o, PureState s, RngStream& rng, std::size_t n) {
  check_on(o.space(), s);
  std::vector<std::size_t> out(n);
  for (auto& x : out) x = draw_outcome(o, s.index, rng.uniform());
  return out;
}

StateOutcomeSample sample_with_states(const Observable& o, const MixedState& rho, RngStream& rng,
                                      std::size_t n) {
  if (!(rho.space() == o.space())) {
    throw DomainError("sample: mixed state and observable spaces differ");
  }
  DiscreteSampler pick_state(rho.mass());
  StateOutcomeSample r;
  r.states.resize(n);
  r.outcomes.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t i = pick_state(rng.uniform());
    r.states[t] = i;
    r.outcomes[t] = draw_outcome(o, i, rng.uniform());
  }
  return r;
}

std::vector<std::size_t> sample(const Observable& o, const MixedState& rho, RngStream& rng,
                                std::size_t n) {
  return sample_with_states(o, rho, rng, n).outcomes;
}

std::vector<std::size_t> sample(const OutcomeDistribution& d, RngStream& rng, std::size_t n) {
  DiscreteSampler pick(d.probs);
  std::vector<std::size_t> out(n);
  for (auto& x : out) x = pick(rng.uniform());
  return out;
}

void for_each_block(std::uint64_t seed, std::size_t total, std::size_t block_size,
                    const std::function<void(RngStream&, std::size_t, std::size_t)>& body) {
  if (block_size == 0) throw DomainError("for_each_block: block size must be positive");
  const std::size_t blocks = (total + block_size - 1) / block_size;
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(blocks, std::thread::hardware_concurrency()));
  auto run = [&](std::size_t worker) {
    for (std::size_t b = worker; b < blocks; b += workers) {
      RngStream rng(seed, b);
      const std::size_t first = b * block_size;
      body(rng, first, std::min(block_size, total - first));
    }
  };
  if (workers == 1) {
    run(0);
    return;
  }
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(run, w);
}

std::vector<double> lln_running_average(std::span<const double> samples) {
  if (samples.empty()) throw DomainError("lln_running_average: empty sample");
  std::vector<double> out(samples.size());
  CompensatedSum s;
  for (std::size_t k = 0; k < samples.size(); ++k) {
    s.add(samples[k]);
    out[k] = s.value() / static_cast<double>(k + 1);
  }
  return out;
}

std::vector<std::size_t> count_outcomes(std::span<const std::size_t> indices,
                                        std::size_t alphabet_size) {
  std::vector<std::size_t> counts(alphabet_size, 0);
  for (auto k : indices) ++counts.at(k);
  return counts;
}

}  // namespace twoenv
