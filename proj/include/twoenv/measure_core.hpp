#pragma once

// Discretized state spaces (grid points with measure weights), pure and
// mixed states over them, and grid integration.
//
// Every continuous state space is replaced by a finite grid of cells. A cell
// is represented by its center (the label) and its measure (the weight), so
// integrals become weighted sums over cell centers.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <vector>

namespace twoenv {

/// Default absolute tolerance for comparisons of probability masses.
inline constexpr double kMassTolerance = 1e-9;

/// A finite grid of labelled cells with positive weights.
///
/// Labels are tuples of reals (dimension >= 1), stored row-major, and are
/// strictly increasing in lexicographic order. One-dimensional spaces are the
/// common case; product spaces carry the concatenated coordinates of their
/// factors. The object is immutable and cheap to copy (shared storage).
class StateSpace {
 public:
  /// One-dimensional space. Throws DomainError on invariant violations.
  StateSpace(std::vector<double> points, std::vector<double> weights);

  /// Space of dimension `dim` with `coords.size() / dim` points.
  StateSpace(std::size_t dim, std::vector<double> coords, std::vector<double> weights);

  std::size_t size() const { return data_->weights.size(); }
  std::size_t dim() const { return data_->dim; }

  /// Label of a one-dimensional point. Throws DomainError when dim() != 1.
  double point(std::size_t i) const;
  std::span<const double> coords(std::size_t i) const;
  double weight(std::size_t i) const { return data_->weights[i]; }

  /// Labels of a one-dimensional space (throws DomainError otherwise).
  std::span<const double> points() const;
  std::span<const double> weights() const { return data_->weights; }

  double total_mass() const { return data_->total; }

  /// Index of the point whose label equals `value` exactly, or size() if none.
  std::size_t find(double value) const;

  friend bool operator==(const StateSpace& a, const StateSpace& b);

 private:
  struct Data {
    std::size_t dim = 1;
    std::vector<double> coords;
    std::vector<double> weights;
    double total = 0.0;
  };
  std::shared_ptr<const Data> data_;
};

/// Cartesian product of two spaces with product weights. Points are ordered
/// lexicographically, first factor major.
StateSpace product_space(const StateSpace& a, const StateSpace& b);

/// A point measure concentrated on one grid cell.
struct PureState {
  std::size_t index = 0;
  friend bool operator==(const PureState&, const PureState&) = default;
};

/// Throws DomainError if `s` is not a point of `space`.
void check_on(const StateSpace& space, PureState s);

/// A probability mass vector over a StateSpace. The mass of a cell already
/// includes its weight, so sum(mass) == 1.
class MixedState {
 public:
  /// Throws DomainError unless masses are non-negative, sized to the space,
  /// and sum to 1 within kMassTolerance.
  MixedState(StateSpace space, std::vector<double> mass);

  const StateSpace& space() const { return space_; }
  std::span<const double> mass() const { return mass_; }
  double mass(std::size_t i) const { return mass_[i]; }

  /// Mean of a one-dimensional state.
  double mean() const;

  friend bool operator==(const MixedState& a, const MixedState& b) {
    return a.space_ == b.space_ && a.mass_ == b.mass_;
  }

 private:
  StateSpace space_;
  std::vector<double> mass_;
};

/// Product measure on product_space(a.space(), b.space()).
MixedState product_state(const MixedState& a, const MixedState& b);

/// The mixed state that puts all of its mass on `s`.
MixedState point_mass(const StateSpace& space, PureState s);

/// n midpoint cells of equal width on [lo, hi].
StateSpace make_uniform_grid(double lo, double hi, std::size_t n);

/// Geometric grid of n cells whose centers are the numbers 2^(k/per_octave)
/// (k integer), ending with the last cell that fits below `hi`. Weights are
/// exact cell widths, so a cell's weight is proportional to its label. Every
/// power of two in range is a label, and doubling any label below the top
/// octave lands bit for bit on the label `per_octave` cells higher, whose
/// weight is exactly twice as large.
StateSpace make_dyadic_grid(double hi, std::size_t n, std::size_t per_octave);

/// Sum of f(point_i) * weight_i over a one-dimensional space.
double integrate(const StateSpace& space, const std::function<double(double)>& f);

/// Result of discretizing a density. `normalizer` is the grid integral of the
/// density before renormalization; for a normalized density, 1 - normalizer
/// estimates the mass lost to truncating the support.
struct DensityState {
  MixedState state;
  double normalizer = 0.0;
};

/// mass_i proportional to density(point_i) * weight_i, renormalized to 1.
/// Throws DomainError on negative, non-finite, or identically zero densities.
DensityState mixed_from_density(const StateSpace& space,
                                const std::function<double(double)>& density);

/// Neumaier-compensated running sum.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

}  // namespace twoenv
