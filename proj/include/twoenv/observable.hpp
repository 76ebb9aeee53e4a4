#pragma once

// Observables over a discretized state space.
//
// An observable assigns to every grid point a probability vector over a finite
// outcome alphabet: effect(i, x) is the probability of measuring outcome x when
// the system is in pure state i. Effects of composite events are sums of
// singleton effects. Tables are stored sparsely (rows hold only non-zero
// effects) because the envelope models have one or two outcomes per row but
// tens of thousands of outcomes overall.

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "twoenv/measure_core.hpp"

namespace twoenv {

class RngStream;

/// A measured value: a tuple of reals. Scalars have arity 1; outcomes of
/// product observables are concatenations of their factors' outcomes.
class Outcome {
 public:
  Outcome() = default;
  Outcome(double value) : coords_{value} {}  // NOLINT(google-explicit-constructor)
  Outcome(std::initializer_list<double> coords) : coords_(coords) {}
  explicit Outcome(std::vector<double> coords) : coords_(std::move(coords)) {}

  std::size_t arity() const { return coords_.size(); }
  double operator[](std::size_t i) const { return coords_[i]; }
  std::span<const double> coords() const { return coords_; }

  /// The single coordinate of a scalar outcome. Throws DomainError otherwise.
  double value() const;

  static Outcome concat(const Outcome& a, const Outcome& b);

  friend bool operator==(const Outcome&, const Outcome&) = default;
  friend auto operator<=>(const Outcome& a, const Outcome& b) { return a.coords_ <=> b.coords_; }

  std::string to_string() const;

 private:
  std::vector<double> coords_;
};

/// Default cap on dense table size (states x outcomes) for product
/// constructions.
inline constexpr std::size_t kDefaultTableCap = 1'000'000;

class Observable {
 public:
  struct Entry {
    std::size_t outcome;
    double effect;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  /// Builds an observable from per-point lists of (outcome, effect). Repeated
  /// outcomes within a row are merged, zero effects are dropped, and the
  /// alphabet is the sorted set of outcomes with a non-zero effect somewhere.
  /// Throws DomainError if an effect leaves [0, 1] or a row does not sum to 1
  /// within kMassTolerance.
  static Observable from_rows(StateSpace space,
                              std::vector<std::vector<std::pair<Outcome, double>>> rows);

  const StateSpace& space() const { return space_; }
  std::span<const Outcome> outcomes() const { return outcomes_; }
  std::size_t outcome_count() const { return outcomes_.size(); }

  /// Non-zero effects at grid point i, sorted by outcome index.
  std::span<const Entry> row(std::size_t i) const;

  /// Index of `x` in the alphabet, if present.
  std::optional<std::size_t> index_of(const Outcome& x) const;

  /// [F({x})](omega_i); zero for outcomes outside the alphabet.
  double effect(std::size_t i, const Outcome& x) const;
  double effect_at(std::size_t i, std::size_t outcome) const;

  /// [F(event)](omega_i) for a finite event given as a predicate on outcomes.
  double effect_of_event(std::size_t i, const std::function<bool(const Outcome&)>& event) const;

  /// True when every row is a single outcome with effect exactly 1.
  bool is_deterministic() const;

  /// Outcome of a deterministic observable at point i.
  const Outcome& deterministic_value(std::size_t i) const;

  std::size_t nonzero_count() const { return entries_.size(); }

  friend bool operator==(const Observable& a, const Observable& b) {
    return a.space_ == b.space_ && a.outcomes_ == b.outcomes_ && a.row_start_ == b.row_start_ &&
           a.entries_ == b.entries_;
  }

 private:
  Observable(StateSpace space) : space_(std::move(space)) {}

  StateSpace space_;
  std::vector<Outcome> outcomes_;
  std::vector<std::size_t> row_start_;
  std::vector<Entry> entries_;
};

/// The observable that outputs V(omega) with certainty.
Observable deterministic_observable(const StateSpace& space,
                                    const std::function<double(double)>& value_map);

/// Deterministic observable from precomputed per-point payouts.
Observable deterministic_observable(const StateSpace& space, std::span<const double> values);

/// Convex combination of observables on a common space. Weights must be
/// non-negative and sum to 1 within 1e-12.
Observable mix_observables(std::span<const Observable> parts, std::span<const double> weights);

/// Correlated pair observable of the two-envelope game: at each point the pair
/// (V1, V2) and the swapped pair (V2, V1) each have effect 1/2, collapsing to a
/// single pair with effect 1 when V1 == V2. Both inputs must be deterministic
/// observables on the same space.
Observable quasi_product_envelope(const Observable& first, const Observable& second);

/// Independent product on the product space: effect((i, j), (x, y)) =
/// effect_1(i, x) * effect_2(j, y). Throws ResourceError when the dense size
/// of the result exceeds `cap`.
Observable product_observable(const Observable& a, const Observable& b,
                              std::size_t cap = kDefaultTableCap);

/// First-coordinate marginal of an observable whose outcomes are pairs (or
/// longer tuples): effects summed over the trailing coordinates.
Observable first_marginal(const Observable& o, std::size_t leading = 1);

/// n independent repetitions of one observable, all on the same (diagonal)
/// state. Tables are materialized only when states x |outcomes|^n fits under
/// the cap; otherwise only sampling is available.
class ParallelObservable {
 public:
  ParallelObservable(Observable base, std::size_t repetitions, std::size_t cap);

  const Observable& base() const { return base_; }
  std::size_t repetitions() const { return repetitions_; }
  bool is_materialized() const { return table_.has_value(); }

  /// The explicit n-fold table. Throws ResourceError above the cap.
  const Observable& table() const;

  /// `trials` draws of the n-tuple at pure state s, flattened: result[t * n + k]
  /// is the base-alphabet index of the k-th coordinate in trial t.
  std::vector<std::size_t> sample(PureState s, RngStream& rng, std::size_t trials) const;

 private:
  Observable base_;
  std::size_t repetitions_;
  std::size_t cap_;
  std::optional<Observable> table_;
};

ParallelObservable iid_parallel(const Observable& o, std::size_t n,
                                std::size_t cap = kDefaultTableCap);

}  // namespace twoenv

namespace twoenv {

/// Outcome index drawn from row i given a uniform variate u in [0, 1).
/// Falls back to the last non-zero entry when rounding leaves u past the
/// cumulative row sum.
std::size_t draw_outcome(const Observable& o, std::size_t i, double u);

}  // namespace twoenv
