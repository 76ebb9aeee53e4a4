#include "twoenv/measure_core.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "twoenv/error.hpp"

namespace twoenv {

namespace {

bool lex_less(std::span<const double> a, std::span<const double> b) {
  return std::lexicographical_compare(a.begin(), a.end(), b.begin(), b.end());
}

}  // namespace

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x)) {
    compensation_ += (sum_ - t) + x;
  } else {
    compensation_ += (x - t) + sum_;
  }
  sum_ = t;
}

StateSpace::StateSpace(std::vector<double> points, std::vector<double> weights)
    : StateSpace(1, std::move(points), std::move(weights)) {}

StateSpace::StateSpace(std::size_t dim, std::vector<double> coords, std::vector<double> weights) {
  if (dim == 0) throw DomainError("state space dimension must be >= 1");
  if (weights.empty()) throw DomainError("state space needs at least one point");
  if (coords.size() != dim * weights.size()) {
    throw DomainError("state space: coordinate count does not match weights");
  }
  auto data = std::make_shared<Data>();
  data->dim = dim;
  data->coords = std::move(coords);
  data->weights = std::move(weights);
  CompensatedSum total;
  for (std::size_t i = 0; i < data->weights.size(); ++i) {
    const double w = data->weights[i];
    if (!(w > 0.0) || !std::isfinite(w)) {
      std::ostringstream msg;
      msg << "state space weight " << i << " must be positive and finite, got " << w;
      throw DomainError(msg.str());
    }
    total.add(w);
  }
  for (double c : data->coords) {
    if (!std::isfinite(c)) throw DomainError("state space labels must be finite");
  }
  for (std::size_t i = 1; i < data->weights.size(); ++i) {
    std::span<const double> prev(data->coords.data() + (i - 1) * dim, dim);
    std::span<const double> cur(data->coords.data() + i * dim, dim);
    if (!lex_less(prev, cur)) {
      throw DomainError("state space labels must be strictly increasing");
    }
  }
  data->total = total.value();
  if (!std::isfinite(data->total)) throw DomainError("state space total mass must be finite");
  data_ = std::move(data);
}

double StateSpace::point(std::size_t i) const {
  if (data_->dim != 1) throw DomainError("point(): state space is not one-dimensional");
  return data_->coords[i];
}

std::span<const double> StateSpace::coords(std::size_t i) const {
  return {data_->coords.data() + i * data_->dim, data_->dim};
}

std::span<const double> StateSpace::points() const {
  if (data_->dim != 1) throw DomainError("points(): state space is not one-dimensional");
  return data_->coords;
}

std::size_t StateSpace::find(double value) const {
  if (data_->dim != 1) return size();
  const auto& c = data_->coords;
  auto it = std::lower_bound(c.begin(), c.end(), value);
  if (it != c.end() && *it == value) return static_cast<std::size_t>(it - c.begin());
  return size();
}

bool operator==(const StateSpace& a, const StateSpace& b) {
  if (a.data_ == b.data_) return true;
  return a.data_->dim == b.data_->dim && a.data_->coords == b.data_->coords &&
         a.data_->weights == b.data_->weights;
}

StateSpace product_space(const StateSpace& a, const StateSpace& b) {
  const std::size_t dim = a.dim() + b.dim();
  std::vector<double> coords;
  std::vector<double> weights;
  coords.reserve(a.size() * b.size() * dim);
  weights.reserve(a.size() * b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      auto ca = a.coords(i);
      auto cb = b.coords(j);
      coords.insert(coords.end(), ca.begin(), ca.end());
      coords.insert(coords.end(), cb.begin(), cb.end());
      weights.push_back(a.weight(i) * b.weight(j));
    }
  }
  return StateSpace(dim, std::move(coords), std::move(weights));
}

void check_on(const StateSpace& space, PureState s) {
  if (s.index >= space.size()) {
    std::ostringstream msg;
    msg << "pure state index " << s.index << " out of range for a space of " << space.size()
        << " points";
    throw DomainError(msg.str());
  }
}

MixedState::MixedState(StateSpace space, std::vector<double> mass)
    : space_(std::move(space)), mass_(std::move(mass)) {
  if (mass_.size() != space_.size()) {
    throw DomainError("mixed state: mass vector length does not match the state space");
  }
  CompensatedSum total;
  for (double m : mass_) {
    if (!(m >= 0.0) || !std::isfinite(m)) {
      throw DomainError("mixed state: masses must be non-negative and finite");
    }
    total.add(m);
  }
  if (std::abs(total.value() - 1.0) > kMassTolerance) {
    std::ostringstream msg;
    msg << "mixed state: masses sum to " << total.value() << ", expected 1";
    throw DomainError(msg.str());
  }
}

double MixedState::mean() const {
  auto pts = space_.points();
  CompensatedSum s;
  for (std::size_t i = 0; i < mass_.size(); ++i) s.add(pts[i] * mass_[i]);
  return s.value();
}

MixedState product_state(const MixedState& a, const MixedState& b) {
  std::vector<double> mass;
  mass.reserve(a.mass().size() * b.mass().size());
  for (double ma : a.mass()) {
    for (double mb : b.mass()) mass.push_back(ma * mb);
  }
  return MixedState(product_space(a.space(), b.space()), std::move(mass));
}

MixedState point_mass(const StateSpace& space, PureState s) {
  check_on(space, s);
  std::vector<double> mass(space.size(), 0.0);
  mass[s.index] = 1.0;
  return MixedState(space, std::move(mass));
}

StateSpace make_uniform_grid(double lo, double hi, std::size_t n) {
  if (n < 2) throw DomainError("uniform grid needs n >= 2");
  if (!(lo < hi) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw DomainError("uniform grid needs finite lo < hi");
  }
  const double width = (hi - lo) / static_cast<double>(n);
  std::vector<double> points(n);
  for (std::size_t i = 0; i < n; ++i) {
    points[i] = lo + (static_cast<double>(i) + 0.5) * width;
  }
  return StateSpace(std::move(points), std::vector<double>(n, width));
}

StateSpace make_dyadic_grid(double hi, std::size_t n, std::size_t per_octave) {
  if (!(hi > 0.0) || !std::isfinite(hi)) throw DomainError("dyadic grid needs finite hi > 0");
  if (per_octave == 0 || n == 0) throw DomainError("dyadic grid needs n >= 1 and per_octave >= 1");
  const auto m = static_cast<long long>(per_octave);
  const double md = static_cast<double>(per_octave);
  // Centers are 2^(k/m); the top cell is the last one whose upper edge
  // 2^((k + 1/2)/m) does not exceed hi.
  const auto k_top = static_cast<long long>(std::floor(md * std::log2(hi) - 0.5));
  const long long k_bottom = k_top - static_cast<long long>(n) + 1;

  std::vector<double> base(per_octave);
  for (std::size_t j = 0; j < per_octave; ++j) base[j] = std::exp2(static_cast<double>(j) / md);
  const double half_step = std::exp2(0.5 / md);
  const double width_factor = half_step - 1.0 / half_step;

  std::vector<double> points(n);
  std::vector<double> weights(n);
  for (std::size_t i = 0; i < n; ++i) {
    const long long k = k_bottom + static_cast<long long>(i);
    long long octave = k / m;
    long long step = k % m;
    if (step < 0) {
      step += m;
      --octave;
    }
    points[i] = std::ldexp(base[static_cast<std::size_t>(step)], static_cast<int>(octave));
    weights[i] = points[i] * width_factor;
  }
  if (!(points.front() > 0.0)) throw DomainError("dyadic grid: lower end underflows");
  return StateSpace(std::move(points), std::move(weights));
}

double integrate(const StateSpace& space, const std::function<double(double)>& f) {
  auto pts = space.points();
  CompensatedSum s;
  for (std::size_t i = 0; i < pts.size(); ++i) s.add(f(pts[i]) * space.weight(i));
  return s.value();
}

DensityState mixed_from_density(const StateSpace& space,
                                const std::function<double(double)>& density) {
  auto pts = space.points();
  std::vector<double> mass(pts.size());
  CompensatedSum total;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double h = density(pts[i]);
    if (!std::isfinite(h) || h < 0.0) {
      std::ostringstream msg;
      msg << "density must be finite and non-negative; got " << h << " at " << pts[i];
      throw DomainError(msg.str());
    }
    mass[i] = h * space.weight(i);
    total.add(mass[i]);
  }
  const double normalizer = total.value();
  if (!(normalizer > 0.0)) throw DomainError("density is zero on every grid point");
  for (double& m : mass) m /= normalizer;
  return {MixedState(space, std::move(mass)), normalizer};
}

}  // namespace twoenv
