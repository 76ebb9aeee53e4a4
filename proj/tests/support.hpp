#pragma once

// Shared generators and independent oracles for the test binaries.

#include <cmath>
#include <cstdint>
#include <random>
#include <utility>
#include <vector>

#include "twoenv/measure_core.hpp"
#include "twoenv/observable.hpp"

namespace twoenv::testkit {

/// Chi-square goodness-of-fit settings shared by every sampling test.
inline constexpr double kChiSquareSignificance = 1e-3;
inline constexpr std::size_t kChiSquareSamples = 100000;

/// Test-side randomness, independent of the library's Philox streams.
class Gen {
 public:
  explicit Gen(std::uint64_t seed) : eng_(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(eng_); }
  std::size_t index(std::size_t n) { return std::uniform_int_distribution<std::size_t>(0, n - 1)(eng_); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng_); }

  /// Sorted distinct labels with random positive weights.
  StateSpace space(std::size_t n) {
    std::vector<double> pts;
    double x = uniform(-5.0, 5.0);
    for (std::size_t i = 0; i < n; ++i) {
      pts.push_back(x);
      x += uniform(0.1, 2.0);
    }
    std::vector<double> w;
    for (std::size_t i = 0; i < n; ++i) w.push_back(uniform(0.05, 3.0));
    return StateSpace(std::move(pts), std::move(w));
  }

  /// Probability vector of length n, some entries possibly zero.
  std::vector<double> simplex(std::size_t n, bool allow_zero = true) {
    std::vector<double> p(n);
    double s = 0.0;
    for (auto& v : p) {
      v = (allow_zero && uniform(0.0, 1.0) < 0.25) ? 0.0 : uniform(0.01, 1.0);
      s += v;
    }
    if (s == 0.0) {
      p[index(n)] = 1.0;
      return p;
    }
    for (auto& v : p) v /= s;
    return p;
  }

  /// Random observable over `space` with outcomes drawn from {0, .., alphabet-1}.
  Observable observable(const StateSpace& space, std::size_t alphabet) {
    std::vector<std::vector<std::pair<Outcome, double>>> rows(space.size());
    for (auto& row : rows) {
      const auto p = simplex(alphabet);
      for (std::size_t k = 0; k < alphabet; ++k) {
        if (p[k] > 0.0) row.emplace_back(Outcome(static_cast<double>(k)), p[k]);
      }
    }
    return Observable::from_rows(space, std::move(rows));
  }

  MixedState mixed(const StateSpace& space, bool allow_zero = true) {
    return MixedState(space, simplex(space.size(), allow_zero));
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
};

/// Posterior by direct enumeration of (state, outcome) pairs, with the joint
/// mass of each pair taken from caller-supplied prior masses and effect rule.
template <class Effect>
std::vector<double> enumerate_posterior(std::span<const double> prior, std::size_t outcomes,
                                        std::size_t observed, Effect effect) {
  std::vector<double> joint(prior.size(), 0.0);
  long double total = 0.0L;
  for (std::size_t i = 0; i < prior.size(); ++i) {
    for (std::size_t k = 0; k < outcomes; ++k) {
      if (k != observed) continue;
      const double m = prior[i] * effect(i, k);
      joint[i] += m;
      total += m;
    }
  }
  for (auto& v : joint) v = static_cast<double>(v / total);
  return joint;
}

}  // namespace twoenv::testkit
