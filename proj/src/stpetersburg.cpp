#include "twoenv/stpetersburg.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "twoenv/error.hpp"

namespace twoenv {

namespace {

constexpr std::size_t kStpBlock = 1 << 16;
constexpr int kTailProbe = 512;

double normalizer(int k_max) { return 1.0 - std::ldexp(1.0, -k_max); }

// Kept mass of 2^k after renormalization. All formulations use this one
// expression so their tables agree bit for bit.
double kept_mass(int k, int k_max) { return std::ldexp(1.0, -k) / normalizer(k_max); }

}  // namespace

std::string to_string(StpFormulation f) {
  switch (f) {
    case StpFormulation::pure:
      return "pure";
    case StpFormulation::statistical:
      return "statistical";
    case StpFormulation::pins:
      return "pins";
  }
  return "pure";
}

StpFormulation parse_formulation(const std::string& name) {
  if (name == "pure") return StpFormulation::pure;
  if (name == "statistical") return StpFormulation::statistical;
  if (name == "pins") return StpFormulation::pins;
  throw DomainError("unknown formulation '" + name + "' (expected pure, statistical, pins)");
}

std::uint64_t StPetersburgModel::raw_numerator(int k) const {
  if (k < 1 || k > k_max) return 0;
  return std::uint64_t{1} << (k_max - k);
}

std::uint64_t StPetersburgModel::raw_numerator_sum() const {
  std::uint64_t s = 0;
  for (int k = 1; k <= k_max; ++k) s += raw_numerator(k);
  return s;
}

double StPetersburgModel::raw_mass(int k) const {
  return (k < 1 || k > k_max) ? 0.0 : std::ldexp(1.0, -k);
}

StPetersburgModel build_stp(StpFormulation formulation, int k_max) {
  if (k_max < 1 || k_max > kMaxStpDepth) {
    std::ostringstream msg;
    msg << "k_max must lie in [1, " << kMaxStpDepth << "], got " << k_max;
    throw DomainError(msg.str());
  }
  const auto n = static_cast<std::size_t>(k_max);
  std::optional<MixedState> prior;
  std::optional<Observable> observable;

  switch (formulation) {
    case StpFormulation::pure: {
      StateSpace one_point({0.0}, {1.0});
      std::vector<std::vector<std::pair<Outcome, double>>> rows(1);
      for (int k = 1; k <= k_max; ++k) {
        rows[0].emplace_back(Outcome(std::ldexp(1.0, k)), kept_mass(k, k_max));
      }
      observable = Observable::from_rows(one_point, std::move(rows));
      break;
    }
    case StpFormulation::statistical: {
      std::vector<double> points(n);
      std::vector<double> mass(n);
      for (int k = 1; k <= k_max; ++k) {
        points[k - 1] = std::ldexp(1.0, k);
        mass[k - 1] = kept_mass(k, k_max);
      }
      StateSpace naturals(points, std::vector<double>(n, 1.0));
      observable = deterministic_observable(naturals, points);
      prior = MixedState(naturals, std::move(mass));
      break;
    }
    case StpFormulation::pins: {
      // Pin k is the interval (2^-k, 2^(1-k)]: center 1.5 * 2^-k, length 2^-k.
      // Increasing labels run from the shortest pin to the longest.
      std::vector<double> centers(n);
      std::vector<double> lengths(n);
      std::vector<double> values(n);
      std::vector<double> mass(n);
      for (int k = k_max; k >= 1; --k) {
        const std::size_t i = n - static_cast<std::size_t>(k);
        centers[i] = 1.5 * std::ldexp(1.0, -k);
        lengths[i] = std::ldexp(1.0, -k);
        values[i] = std::ldexp(1.0, k);
        mass[i] = kept_mass(k, k_max);
      }
      StateSpace unit_interval(centers, lengths);
      observable = deterministic_observable(unit_interval, values);
      prior = MixedState(unit_interval, std::move(mass));
      break;
    }
  }
  return {k_max, formulation, std::move(*observable), PureState{0}, std::move(prior),
          std::ldexp(1.0, -k_max)};
}

OutcomeDistribution stp_outcome_distribution(const StPetersburgModel& model) {
  if (model.prior) return statistical_outcome_distribution(model.observable, *model.prior);
  return pure_outcome_distribution(model.observable, model.state);
}

TruncatedExpectation stp_truncated_expectation(const StPetersburgModel& model,
                                               const std::function<double(double)>& payoff) {
  TruncatedExpectation r;
  r.k_max = model.k_max;
  CompensatedSum partial;
  for (int k = 1; k <= model.k_max; ++k) {
    partial.add(payoff(std::ldexp(1.0, k)) * model.raw_mass(k));
  }
  r.partial_sum = partial.value();
  r.normalized = expectation(stp_outcome_distribution(model),
                             [&](const Outcome& x) { return payoff(x.value()); });

  const double t0 = payoff(std::ldexp(1.0, kTailProbe)) * std::ldexp(1.0, -kTailProbe);
  const double t1 = payoff(std::ldexp(1.0, kTailProbe + 1)) * std::ldexp(1.0, -kTailProbe - 1);
  if (!std::isfinite(t0) || !std::isfinite(t1)) {
    r.diverges = true;
  } else {
    r.diverges = t0 > 0.0 && t1 >= t0 * (1.0 - 1e-12);
  }
  return r;
}

ProbOtherGreater stp_prob_other_greater(int m, int k_max) {
  if (m < 1 || m > 62) throw DomainError("stp_prob_other_greater: m must lie in [1, 62]");
  if (k_max < 1 || k_max > kMaxStpDepth) throw DomainError("stp_prob_other_greater: bad k_max");
  ProbOtherGreater r;
  r.m = m;
  r.exact_denominator = std::uint64_t{1} << m;
  r.exact = std::ldexp(1.0, -m);
  CompensatedSum tail;
  for (int k = m + 1; k <= k_max; ++k) tail.add(kept_mass(k, k_max));
  r.truncated = tail.value();
  return r;
}

StpRecord stp_parallel_experiment(const StPetersburgModel& model, std::size_t trials,
                                  std::uint64_t seed) {
  if (trials == 0) throw DomainError("stp_parallel_experiment: trials must be >= 1");
  const auto k_max = static_cast<std::size_t>(model.k_max);
  // The pair (x, y) is one outcome of the parallel measurement O x O, at the
  // diagonal pure state or under the product prior.
  // Each row of the pair table has at most k_max^2 entries, so the dense-size
  // cap does not apply here.
  const Observable pair = product_observable(model.observable, model.observable,
                                             std::numeric_limits<std::size_t>::max());
  std::optional<MixedState> pair_prior;
  if (model.prior) pair_prior = product_state(*model.prior, *model.prior);

  const std::size_t blocks = (trials + kStpBlock - 1) / kStpBlock;
  std::vector<std::vector<std::size_t>> draws(blocks);
  for_each_block(seed, trials, kStpBlock,
                 [&](RngStream& rng, std::size_t first, std::size_t count) {
                   draws[first / kStpBlock] = pair_prior ? sample(pair, *pair_prior, rng, count)
                                                         : sample(pair, PureState{0}, rng, count);
                 });

  StpRecord r;
  r.seed = seed;
  r.blocks = blocks;
  r.trials = trials;
  r.k_max = model.k_max;
  r.x_counts.assign(k_max, 0);
  r.y_counts.assign(k_max, 0);
  std::vector<CompensatedSum> y_sums(k_max);
  std::vector<std::size_t> y_greater(k_max, 0);
  std::size_t greater = 0;
  std::size_t less = 0;
  for (const auto& block : draws) {
    for (auto idx : block) {
      const Outcome& xy = pair.outcomes()[idx];
      const auto kx = static_cast<std::size_t>(std::ilogb(xy[0]));
      const auto ky = static_cast<std::size_t>(std::ilogb(xy[1]));
      ++r.x_counts[kx - 1];
      ++r.y_counts[ky - 1];
      y_sums[kx - 1].add(xy[1]);
      if (xy[1] > xy[0]) {
        ++greater;
        ++y_greater[kx - 1];
      } else if (xy[1] < xy[0]) {
        ++less;
      }
    }
  }
  const double n = static_cast<double>(trials);
  r.frac_y_greater = static_cast<double>(greater) / n;
  r.frac_x_greater = static_cast<double>(less) / n;
  r.frac_equal = static_cast<double>(trials - greater - less) / n;
  for (std::size_t k = 0; k < k_max; ++k) {
    if (r.x_counts[k] == 0) continue;
    StpStratum s;
    s.m = static_cast<int>(k + 1);
    s.count = r.x_counts[k];
    s.mean_y = y_sums[k].value() / static_cast<double>(s.count);
    s.frac_y_greater = static_cast<double>(y_greater[k]) / static_cast<double>(s.count);
    s.prob_y_greater = stp_prob_other_greater(s.m, model.k_max).truncated;
    r.strata.push_back(s);
  }
  r.expectation_criterion =
      "switch: E[y] diverges as k_max grows, so it exceeds any observed 2^m (valid only as a "
      "statement about the untruncated model)";
  r.probability_criterion =
      "P(y > 2^m) = 2^-m: after seeing x = 2^m the other envelope is larger with probability "
      "2^-m, not 1/2";
  return r;
}

double empirical_frequency_y_greater(const StpRecord& record, int m) {
  std::size_t above = 0;
  for (std::size_t k = static_cast<std::size_t>(m); k < record.y_counts.size(); ++k) {
    above += record.y_counts[k];
  }
  return static_cast<double>(above) / static_cast<double>(record.trials);
}

}  // namespace twoenv
