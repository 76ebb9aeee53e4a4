#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "support.hpp"
#include "twoenv/envelope.hpp"
#include "twoenv/error.hpp"
#include "twoenv/inference.hpp"

using namespace twoenv;

namespace {

std::set<std::size_t> indices(const MleResult& r) {
  std::set<std::size_t> out;
  for (auto s : r.maximizers) out.insert(s.index);
  return out;
}

}  // namespace

TEST(FisherMle, EnvelopeTwoSolutions) {
  const StateSpace g = make_dyadic_grid(30.0, 3000, 100);
  const EnvelopePairModel m = make_doubling_model(g);
  for (double alpha : {0.5, 1.0, 2.0, 8.0, 3.0 * 1.0}) {
    if (g.find(alpha) == g.size() || g.find(alpha / 2.0) == g.size()) continue;
    const MleResult r = fisher_mle(m.observable, Outcome(alpha));
    EXPECT_EQ(indices(r), (std::set<std::size_t>{g.find(alpha / 2.0), g.find(alpha)}));
    EXPECT_EQ(r.likelihood[g.find(alpha)], 1.0);
  }
}

TEST(FisherMle, HalfOffGrid) {
  const StateSpace g = make_dyadic_grid(30.0, 3000, 100);
  const EnvelopePairModel m = make_doubling_model(g);
  const double alpha = g.point(5);  // alpha/2 lies below the grid
  ASSERT_EQ(g.find(alpha / 2.0), g.size());
  const MleResult r = fisher_mle(m.observable, Outcome(alpha));
  EXPECT_EQ(indices(r), (std::set<std::size_t>{5}));
}

TEST(FisherMle, DeterministicPreimage) {
  const StateSpace g({-2.0, -1.0, 0.0, 1.0, 2.0}, {1, 1, 1, 1, 1});
  const Observable o = deterministic_observable(g, [](double w) { return w * w; });
  EXPECT_EQ(indices(fisher_mle(o, Outcome(4.0))), (std::set<std::size_t>{0, 4}));
  EXPECT_EQ(indices(fisher_mle(o, Outcome(0.0))), (std::set<std::size_t>{2}));
  EXPECT_TRUE(fisher_mle(o, Outcome(1.0)).is_excluded(2));
  EXPECT_THROW(fisher_mle(o, Outcome(9.0)), DomainError);
}

TEST(FisherMle, ScaleInvariant) {
  // Multiply the effect of x by c in every row (c <= 1 / sup), rescaling the
  // rest of the row, or parking it on a spare outcome, to keep unit row sums.
  testkit::Gen gen(61);
  for (int t = 0; t < 50; ++t) {
    const StateSpace g = gen.space(1 + gen.index(15));
    const Observable o = gen.observable(g, 1 + gen.index(5));
    const Outcome x = o.outcomes()[gen.index(o.outcome_count())];
    double sup = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) sup = std::max(sup, o.effect(i, x));
    const double c = gen.uniform(0.01, 1.0) / sup;
    const Outcome spare(100.0);
    std::vector<std::vector<std::pair<Outcome, double>>> rows(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double ex = o.effect(i, x);
      const double rest = 1.0 - c * ex;
      if (ex > 0.0) rows[i].emplace_back(x, c * ex);
      if (ex < 1.0) {
        for (const auto& e : o.row(i)) {
          const Outcome& y = o.outcomes()[e.outcome];
          if (!(y == x)) rows[i].emplace_back(y, e.effect * rest / (1.0 - ex));
        }
      } else if (rest > 0.0) {
        rows[i].emplace_back(spare, rest);
      }
    }
    const Observable scaled = Observable::from_rows(g, std::move(rows));
    const MleResult a = fisher_mle(o, x);
    const MleResult b = fisher_mle(scaled, x);
    EXPECT_EQ(indices(a), indices(b));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(a.likelihood[i], b.likelihood[i], 1e-12);
  }
}

TEST(BayesPosterior, SymmetricTwoStates) {
  const StateSpace g({0.0, 1.0}, {1.0, 1.0});
  const Observable o = Observable::from_rows(
      g, {{{Outcome(0.0), 0.3}, {Outcome(1.0), 0.7}}, {{Outcome(0.0), 0.3}, {Outcome(1.0), 0.7}}});
  const MixedState post = bayes_posterior(o, MixedState(g, {0.5, 0.5}), Outcome(1.0));
  EXPECT_DOUBLE_EQ(post.mass(0), 0.5);
  EXPECT_DOUBLE_EQ(post.mass(1), 0.5);
}

TEST(BayesPosterior, DeterministicRestricts) {
  testkit::Gen gen(73);
  for (int t = 0; t < 30; ++t) {
    const StateSpace g = gen.space(2 + gen.index(20));
    std::vector<double> v(g.size());
    for (auto& x : v) x = static_cast<double>(gen.integer(0, 3));
    const Observable o = deterministic_observable(g, v);
    const MixedState prior = gen.mixed(g, false);
    const double x = v[gen.index(v.size())];
    const MixedState post = bayes_posterior(o, prior, Outcome(x));
    double kept = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) kept += (v[i] == x) ? prior.mass(i) : 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_NEAR(post.mass(i), v[i] == x ? prior.mass(i) / kept : 0.0, 1e-12);
    }
  }
}

TEST(BayesPosterior, MatchesEnumeration) {
  testkit::Gen gen(79);
  for (int t = 0; t < 50; ++t) {
    const StateSpace g = gen.space(1 + gen.index(25));
    const Observable o = gen.observable(g, 1 + gen.index(6));
    const MixedState prior = gen.mixed(g);
    const std::size_t k = gen.index(o.outcome_count());
    double ev = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) ev += prior.mass(i) * o.effect_at(i, k);
    if (ev == 0.0) {
      EXPECT_THROW(bayes_posterior(o, prior, o.outcomes()[k]), DomainError);
      continue;
    }
    const auto oracle = testkit::enumerate_posterior(
        prior.mass(), o.outcome_count(), k,
        [&](std::size_t i, std::size_t x) { return o.effect_at(i, x); });
    const MixedState post = bayes_posterior(o, prior, o.outcomes()[k]);
    double s = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      EXPECT_GE(post.mass(i), 0.0);
      EXPECT_NEAR(post.mass(i), oracle[i], 1e-12);
      s += post.mass(i);
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

TEST(BayesPosterior, ZeroEvidenceNamesValue) {
  const StateSpace g({1.0, 2.0}, {1.0, 1.0});
  const Observable o = deterministic_observable(g, [](double w) { return w; });
  try {
    bayes_posterior(o, MixedState(g, {1.0, 0.0}), Outcome(2.0));
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find('2'), std::string::npos);
  }
}

TEST(BayesPosterior, SequentialEqualsJoint) {
  testkit::Gen gen(83);
  for (int t = 0; t < 40; ++t) {
    const StateSpace g = gen.space(1 + gen.index(12));
    const Observable a = gen.observable(g, 1 + gen.index(4));
    const Observable b = gen.observable(g, 1 + gen.index(4));
    // Independent repetition on the same state: effect a(i, x) * b(i, y).
    std::vector<std::vector<std::pair<Outcome, double>>> rows(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      for (const auto& ea : a.row(i)) {
        for (const auto& eb : b.row(i)) {
          rows[i].emplace_back(
              Outcome::concat(a.outcomes()[ea.outcome], b.outcomes()[eb.outcome]),
              ea.effect * eb.effect);
        }
      }
    }
    const Observable joint = Observable::from_rows(g, std::move(rows));
    const MixedState prior = gen.mixed(g, false);
    const std::size_t row = gen.index(g.size());
    const auto& ea = a.row(row)[gen.index(a.row(row).size())];
    const auto& eb = b.row(row)[gen.index(b.row(row).size())];
    const Outcome x = a.outcomes()[ea.outcome];
    const Outcome y = b.outcomes()[eb.outcome];
    const MixedState seq = bayes_posterior(b, bayes_posterior(a, prior, x), y);
    const MixedState both = bayes_posterior(joint, prior, Outcome::concat(x, y));
    for (std::size_t i = 0; i < g.size(); ++i) EXPECT_NEAR(seq.mass(i), both.mass(i), 1e-12);
  }
}

TEST(SwitchGain, SymmetricTwoAtomsIsExactlyZero) {
  const StateSpace g({1.0, 2.0}, {1.0, 1.0});
  const EnvelopePairModel m = make_doubling_model(g);
  const MixedState prior(g, {0.5, 0.5});
  EXPECT_EQ(posterior_switch_gain(m.quasi, prior).value, 0.0);
  const ConditionalGain c = conditional_switch_gain(m.quasi, prior, 2.0);
  EXPECT_EQ(c.gain, 0.5);
  EXPECT_EQ(c.p_alpha, 0.5);
}

TEST(SwitchGain, UniformPriorAgainstDoubleLoop) {
  const StateSpace g = make_dyadic_grid(1.0, 5000, 500);
  const EnvelopePairModel m = make_doubling_model(g);
  const DensityState prior = mixed_from_density(g, [](double w) { return w <= 1.0 ? 1.0 : 0.0; });
  // Direct enumeration over states and their two ordered pairs.
  long double oracle = 0.0L;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double w = g.point(i);
    oracle += 0.5L * prior.state.mass(i) * (2.0 * w - w);
    oracle += 0.5L * prior.state.mass(i) * (w - 2.0 * w);
  }
  const SwitchGain s = posterior_switch_gain(m.quasi, prior.state);
  EXPECT_LE(std::abs(s.value - static_cast<double>(oracle)), s.error_bound);
  EXPECT_LE(std::abs(s.value), s.error_bound);
  EXPECT_FALSE(s.divergence_warning);
}

TEST(SwitchGain, AggregatesConditionalGains) {
  const StateSpace g = make_dyadic_grid(30.0, 2000, 100);
  const EnvelopePairModel m = make_doubling_model(g);
  const DensityState prior = mixed_from_density(g, [](double w) { return std::exp(-w); });
  long double total = 0.0L;
  std::set<double> alphas;
  for (const auto& xy : m.quasi.outcomes()) alphas.insert(xy[0]);
  for (double a : alphas) {
    const ConditionalGain c = conditional_switch_gain(m.quasi, prior.state, a);
    total += static_cast<long double>(c.p_alpha) * c.gain;
  }
  const SwitchGain s = posterior_switch_gain(m.quasi, prior.state);
  EXPECT_NEAR(static_cast<double>(total), s.value, 1e-12);
  EXPECT_NEAR(s.value, 0.0, 1e-12);
}

TEST(SwitchGain, InfiniteMeanWarns) {
  const StateSpace g({1.0, 2.0}, {1.0, 1.0});
  const EnvelopePairModel m = make_doubling_model(g);
  const SwitchGain s =
      posterior_switch_gain(m.quasi, MixedState(g, {0.5, 0.5}), PriorTail::infinite_mean);
  EXPECT_TRUE(s.divergence_warning);
  EXPECT_FALSE(s.warning.empty());
}
