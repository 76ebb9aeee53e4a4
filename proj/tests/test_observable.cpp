#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "support.hpp"
#include "twoenv/error.hpp"
#include "twoenv/observable.hpp"
#include "twoenv/rng.hpp"

using namespace twoenv;

namespace {

std::map<Outcome, double> row_map(const Observable& o, std::size_t i) {
  std::map<Outcome, double> m;
  for (const auto& e : o.row(i)) m[o.outcomes()[e.outcome]] = e.effect;
  return m;
}

void expect_valid(const Observable& o) {
  for (std::size_t i = 0; i < o.space().size(); ++i) {
    double s = 0.0;
    for (const auto& e : o.row(i)) {
      EXPECT_GE(e.effect, 0.0);
      EXPECT_LE(e.effect, 1.0);
      s += e.effect;
    }
    EXPECT_NEAR(s, 1.0, 1e-9);
  }
}

Observable coin() {
  const StateSpace one({0.0}, {1.0});
  return Observable::from_rows(one, {{{Outcome(0.0), 0.5}, {Outcome(1.0), 0.5}}});
}

Observable stp_observable(int k_max) {
  const StateSpace one({0.0}, {1.0});
  std::vector<std::pair<Outcome, double>> row;
  double tail = 1.0;
  for (int k = 1; k < k_max; ++k) {
    row.emplace_back(Outcome(std::ldexp(1.0, k)), std::ldexp(1.0, -k));
    tail -= std::ldexp(1.0, -k);
  }
  row.emplace_back(Outcome(std::ldexp(1.0, k_max)), tail);
  return Observable::from_rows(one, {row});
}

}  // namespace

TEST(Deterministic, IdentityLift) {
  const StateSpace g({1.0, 2.0, 3.0}, {1.0, 1.0, 1.0});
  const Observable o = deterministic_observable(g, [](double w) { return w; });
  ASSERT_EQ(o.outcome_count(), 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(o.outcomes()[i].value(), g.point(i));
    EXPECT_EQ(o.effect_at(i, i), 1.0);
  }
  EXPECT_TRUE(o.is_deterministic());
}

TEST(Deterministic, DoublingAndConstant) {
  const StateSpace g({1.0, 2.0}, {1.0, 1.0});
  const Observable o = deterministic_observable(g, [](double w) { return 2.0 * w; });
  ASSERT_EQ(o.outcome_count(), 2u);
  EXPECT_EQ(o.effect(0, Outcome(2.0)), 1.0);
  EXPECT_EQ(o.effect(1, Outcome(4.0)), 1.0);
  EXPECT_EQ(o.effect(0, Outcome(4.0)), 0.0);
  const Observable c = deterministic_observable(g, [](double) { return 7.0; });
  ASSERT_EQ(c.outcome_count(), 1u);
  EXPECT_EQ(c.effect(0, Outcome(7.0)), 1.0);
  EXPECT_EQ(c.effect(1, Outcome(7.0)), 1.0);
}

TEST(FromRows, Validation) {
  const StateSpace g({1.0}, {1.0});
  EXPECT_THROW(Observable::from_rows(g, {{{Outcome(1.0), 0.6}}}), DomainError);
  EXPECT_THROW(Observable::from_rows(g, {{{Outcome(1.0), 1.5}, {Outcome(2.0), -0.5}}}),
               DomainError);
  EXPECT_THROW(Observable::from_rows(g, {}), DomainError);
  const Observable merged =
      Observable::from_rows(g, {{{Outcome(1.0), 0.25}, {Outcome(1.0), 0.75}, {Outcome(3.0), 0.0}}});
  EXPECT_EQ(merged.outcome_count(), 1u);
  EXPECT_EQ(merged.effect(0, Outcome(1.0)), 1.0);
}

TEST(Mix, EnvelopeHalves) {
  const StateSpace g({1.0, 2.0}, {1.0, 1.0});
  const std::vector<Observable> parts = {
      deterministic_observable(g, [](double w) { return w; }),
      deterministic_observable(g, [](double w) { return 2.0 * w; })};
  const std::vector<double> half = {0.5, 0.5};
  const Observable m = mix_observables(parts, half);
  const auto r = row_map(m, 0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.at(Outcome(1.0)), 0.5);
  EXPECT_EQ(r.at(Outcome(2.0)), 0.5);
}

TEST(Mix, IdempotentAndAffine) {
  testkit::Gen gen(3);
  for (int t = 0; t < 30; ++t) {
    const StateSpace g = gen.space(1 + gen.index(20));
    const Observable a = gen.observable(g, 1 + gen.index(6));
    const Observable b = gen.observable(g, 1 + gen.index(6));
    const std::vector<Observable> same = {a, a};
    const std::vector<double> half = {0.5, 0.5};
    EXPECT_EQ(mix_observables(same, half), a);
    const std::vector<Observable> ab = {a, b};
    const std::vector<double> first = {1.0, 0.0};
    EXPECT_EQ(mix_observables(ab, first), a);
    const double w = gen.uniform(0.0, 1.0);
    const std::vector<double> ws = {w, 1.0 - w};
    expect_valid(mix_observables(ab, ws));
  }
}

TEST(Mix, RejectsBadWeights) {
  const StateSpace g({1.0}, {1.0});
  const Observable o = deterministic_observable(g, [](double w) { return w; });
  const std::vector<Observable> parts = {o, o};
  const std::vector<double> bad = {0.7, 0.2};
  EXPECT_THROW(mix_observables(parts, bad), DomainError);
  const std::vector<double> neg = {1.5, -0.5};
  EXPECT_THROW(mix_observables(parts, neg), DomainError);
}

TEST(QuasiProduct, DoublingAtTen) {
  const StateSpace g({10.0}, {1.0});
  const Observable q =
      quasi_product_envelope(deterministic_observable(g, [](double w) { return w; }),
                             deterministic_observable(g, [](double w) { return 2.0 * w; }));
  const auto r = row_map(q, 0);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_EQ(r.at(Outcome({10.0, 20.0})), 0.5);
  EXPECT_EQ(r.at(Outcome({20.0, 10.0})), 0.5);
}

TEST(QuasiProduct, EqualPayoutsCollapse) {
  const StateSpace g({3.0}, {1.0});
  const Observable o = deterministic_observable(g, [](double w) { return w; });
  const Observable q = quasi_product_envelope(o, o);
  const auto r = row_map(q, 0);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r.at(Outcome({3.0, 3.0})), 1.0);
}

TEST(QuasiProduct, RequiresDeterministic) {
  EXPECT_THROW(quasi_product_envelope(coin(), coin()), DomainError);
}

TEST(QuasiProduct, MarginalIsTheMixture) {
  testkit::Gen gen(23);
  for (int t = 0; t < 40; ++t) {
    const StateSpace g = gen.space(1 + gen.index(40));
    std::vector<double> v1(g.size());
    std::vector<double> v2(g.size());
    for (std::size_t i = 0; i < g.size(); ++i) {
      v1[i] = static_cast<double>(gen.integer(0, 5));
      v2[i] = static_cast<double>(gen.integer(0, 5));
    }
    const Observable o1 = deterministic_observable(g, v1);
    const Observable o2 = deterministic_observable(g, v2);
    const Observable q = quasi_product_envelope(o1, o2);
    expect_valid(q);
    const std::vector<Observable> parts = {o1, o2};
    const std::vector<double> half = {0.5, 0.5};
    EXPECT_EQ(first_marginal(q), mix_observables(parts, half));
  }
}

TEST(Product, CoinSquared) {
  const Observable p = product_observable(coin(), coin());
  ASSERT_EQ(p.outcome_count(), 4u);
  for (const auto& e : p.row(0)) EXPECT_EQ(e.effect, 0.25);
}

TEST(Product, DeterministicFactorRelabels) {
  testkit::Gen gen(8);
  const StateSpace g = gen.space(5);
  const Observable a = gen.observable(g, 4);
  const StateSpace one({0.0}, {1.0});
  const Observable d = deterministic_observable(one, [](double) { return 9.0; });
  const Observable p = product_observable(a, d);
  ASSERT_EQ(p.space().size(), g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (const auto& e : a.row(i)) {
      EXPECT_EQ(p.effect(i, Outcome({a.outcomes()[e.outcome].value(), 9.0})), e.effect);
    }
  }
}

TEST(Product, StPetersburgSquared) {
  const Observable o = stp_observable(12);
  const Observable p = product_observable(o, o);
  for (int j = 1; j < 12; ++j) {
    for (int k = 1; k < 12; ++k) {
      EXPECT_EQ(p.effect(0, Outcome({std::ldexp(1.0, j), std::ldexp(1.0, k)})),
                std::ldexp(1.0, -j - k));
    }
  }
}

TEST(Product, MarginalRecoversFirstFactor) {
  testkit::Gen gen(41);
  for (int t = 0; t < 30; ++t) {
    const StateSpace ga = gen.space(1 + gen.index(6));
    const StateSpace gb = gen.space(1 + gen.index(6));
    const Observable a = gen.observable(ga, 1 + gen.index(5));
    const Observable b = gen.observable(gb, 1 + gen.index(5));
    const Observable p = product_observable(a, b);
    expect_valid(p);
    for (std::size_t i = 0; i < ga.size(); ++i) {
      for (std::size_t j = 0; j < gb.size(); ++j) {
        const std::size_t ij = i * gb.size() + j;
        for (const auto& x : a.outcomes()) {
          double s = 0.0;
          for (const auto& e : p.row(ij)) {
            if (p.outcomes()[e.outcome][0] == x.value()) s += e.effect;
          }
          EXPECT_NEAR(s, a.effect(i, x), 1e-15);
        }
      }
    }
  }
}

TEST(Product, CapRaisesResourceError) {
  const Observable o = stp_observable(20);
  EXPECT_THROW(product_observable(o, o, 100), ResourceError);
}

TEST(Parallel, BaseCase) {
  const Observable o = coin();
  EXPECT_EQ(iid_parallel(o, 1).table(), o);
}

TEST(Parallel, ThreeCoins) {
  const ParallelObservable p = iid_parallel(coin(), 3);
  const Observable& t = p.table();
  ASSERT_EQ(t.outcome_count(), 8u);
  for (const auto& e : t.row(0)) EXPECT_EQ(e.effect, 0.125);
}

TEST(Parallel, QuasiProductDiagonal) {
  const StateSpace g({1.0, 3.0, 5.0}, {1.0, 1.0, 1.0});
  const Observable q =
      quasi_product_envelope(deterministic_observable(g, [](double w) { return w; }),
                             deterministic_observable(g, [](double w) { return 2.0 * w; }));
  const Observable diag = iid_parallel(q, 2).table();
  const Observable full = product_observable(q, q);
  for (std::size_t i = 0; i < g.size(); ++i) {
    EXPECT_EQ(row_map(diag, i), row_map(full, i * g.size() + i));
  }
}

TEST(Parallel, LazyAboveCap) {
  const ParallelObservable p = iid_parallel(coin(), 40);
  EXPECT_FALSE(p.is_materialized());
  EXPECT_THROW(p.table(), ResourceError);
  RngStream rng(1, 0);
  const auto draws = p.sample(PureState{0}, rng, 100);
  EXPECT_EQ(draws.size(), 4000u);
}

TEST(Observable, RandomConstructionsAreValid) {
  testkit::Gen gen(99);
  for (int t = 0; t < 100; ++t) {
    const StateSpace g = gen.space(1 + gen.index(30));
    expect_valid(gen.observable(g, 1 + gen.index(10)));
  }
}

TEST(Observable, EventEffects) {
  const Observable o = stp_observable(10);
  EXPECT_NEAR(o.effect_of_event(0, [](const Outcome& x) { return x.value() > 8.0; }), 0.125,
              1e-15);
}
