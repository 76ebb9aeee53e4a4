#include "twoenv/observable.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "twoenv/error.hpp"
#include "twoenv/rng.hpp"

namespace twoenv {

namespace {

// Saturating product used for cap checks.
std::size_t sat_mul(std::size_t a, std::size_t b) {
  if (a != 0 && b > std::numeric_limits<std::size_t>::max() / a) {
    return std::numeric_limits<std::size_t>::max();
  }
  return a * b;
}

void require_same_space(const Observable& a, const Observable& b, const char* what) {
  if (!(a.space() == b.space())) {
    throw DomainError(std::string(what) + ": observables live on different state spaces");
  }
}

}  // namespace

double Outcome::value() const {
  if (coords_.size() != 1) throw DomainError("outcome " + to_string() + " is not a scalar");
  return coords_[0];
}

Outcome Outcome::concat(const Outcome& a, const Outcome& b) {
  std::vector<double> c(a.coords_);
  c.insert(c.end(), b.coords_.begin(), b.coords_.end());
  return Outcome(std::move(c));
}

std::string Outcome::to_string() const {
  std::ostringstream out;
  out.precision(17);
  if (coords_.size() == 1) {
    out << coords_[0];
    return out.str();
  }
  out << '(';
  for (std::size_t i = 0; i < coords_.size(); ++i) out << (i ? ", " : "") << coords_[i];
  out << ')';
  return out.str();
}

Observable Observable::from_rows(StateSpace space,
                                 std::vector<std::vector<std::pair<Outcome, double>>> rows) {
  if (rows.size() != space.size()) {
    throw DomainError("observable: one effect row is required per grid point");
  }
  Observable o(std::move(space));

  std::vector<Outcome> alphabet;
  for (const auto& row : rows) {
    for (const auto& [x, e] : row) {
      if (!(e >= 0.0 && e <= 1.0 + kMassTolerance)) {
        std::ostringstream msg;
        msg << "observable: effect " << e << " of outcome " << x.to_string()
            << " lies outside [0, 1]";
        throw DomainError(msg.str());
      }
      for (double c : x.coords()) {
        if (std::isnan(c)) throw DomainError("observable: NaN outcome");
      }
      if (e > 0.0) alphabet.push_back(x);
    }
  }
  std::sort(alphabet.begin(), alphabet.end());
  alphabet.erase(std::unique(alphabet.begin(), alphabet.end()), alphabet.end());
  o.outcomes_ = std::move(alphabet);

  o.row_start_.reserve(rows.size() + 1);
  o.row_start_.push_back(0);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    std::vector<Entry> row;
    row.reserve(rows[i].size());
    for (const auto& [x, e] : rows[i]) {
      if (e == 0.0) continue;
      auto it = std::lower_bound(o.outcomes_.begin(), o.outcomes_.end(), x);
      row.push_back({static_cast<std::size_t>(it - o.outcomes_.begin()), e});
    }
    std::sort(row.begin(), row.end(),
              [](const Entry& a, const Entry& b) { return a.outcome < b.outcome; });
    CompensatedSum sum;
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (!o.entries_.empty() && o.entries_.size() > o.row_start_.back() &&
          o.entries_.back().outcome == row[k].outcome) {
        o.entries_.back().effect += row[k].effect;
      } else {
        o.entries_.push_back(row[k]);
      }
      sum.add(row[k].effect);
    }
    if (std::abs(sum.value() - 1.0) > kMassTolerance) {
      std::ostringstream msg;
      msg << "observable: effects at grid point " << i << " sum to " << sum.value()
          << ", expected 1";
      throw DomainError(msg.str());
    }
    for (std::size_t k = o.row_start_.back(); k < o.entries_.size(); ++k) {
      if (o.entries_[k].effect > 1.0 + kMassTolerance) {
        throw DomainError("observable: merged effect exceeds 1");
      }
    }
    o.row_start_.push_back(o.entries_.size());
  }
  return o;
}

std::span<const Observable::Entry> Observable::row(std::size_t i) const {
  return {entries_.data() + row_start_[i], row_start_[i + 1] - row_start_[i]};
}

std::optional<std::size_t> Observable::index_of(const Outcome& x) const {
  auto it = std::lower_bound(outcomes_.begin(), outcomes_.end(), x);
  if (it == outcomes_.end() || !(*it == x)) return std::nullopt;
  return static_cast<std::size_t>(it - outcomes_.begin());
}

double Observable::effect_at(std::size_t i, std::size_t outcome) const {
  auto r = row(i);
  auto it = std::lower_bound(r.begin(), r.end(), outcome,
                             [](const Entry& e, std::size_t x) { return e.outcome < x; });
  return (it != r.end() && it->outcome == outcome) ? it->effect : 0.0;
}

double Observable::effect(std::size_t i, const Outcome& x) const {
  auto idx = index_of(x);
  return idx ? effect_at(i, *idx) : 0.0;
}

double Observable::effect_of_event(std::size_t i,
                                   const std::function<bool(const Outcome&)>& event) const {
  CompensatedSum s;
  for (const auto& e : row(i)) {
    if (event(outcomes_[e.outcome])) s.add(e.effect);
  }
  return s.value();
}

bool Observable::is_deterministic() const {
  for (std::size_t i = 0; i < space_.size(); ++i) {
    auto r = row(i);
    if (r.size() != 1 || r[0].effect != 1.0) return false;
  }
  return true;
}

const Outcome& Observable::deterministic_value(std::size_t i) const {
  auto r = row(i);
  if (r.size() != 1 || r[0].effect != 1.0) {
    throw DomainError("observable is not deterministic at grid point " + std::to_string(i));
  }
  return outcomes_[r[0].outcome];
}

std::size_t draw_outcome(const Observable& o, std::size_t i, double u) {
  auto r = o.row(i);
  double cumulative = 0.0;
  for (const auto& e : r) {
    cumulative += e.effect;
    if (u < cumulative) return e.outcome;
  }
  return r.back().outcome;
}

Observable deterministic_observable(const StateSpace& space, std::span<const double> values) {
  if (values.size() != space.size()) {
    throw DomainError("deterministic observable: one value per grid point is required");
  }
  std::vector<std::vector<std::pair<Outcome, double>>> rows(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) rows[i] = {{Outcome(values[i]), 1.0}};
  return Observable::from_rows(space, std::move(rows));
}

Observable deterministic_observable(const StateSpace& space,
                                    const std::function<double(double)>& value_map) {
  auto pts = space.points();
  std::vector<double> values(pts.size());
  std::transform(pts.begin(), pts.end(), values.begin(), value_map);
  return deterministic_observable(space, values);
}

Observable mix_observables(std::span<const Observable> parts, std::span<const double> weights) {
  if (parts.empty()) throw DomainError("mix_observables: no parts");
  if (parts.size() != weights.size()) {
    throw DomainError("mix_observables: one weight per part is required");
  }
  CompensatedSum total;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) {
      throw DomainError("mix_observables: weights must be non-negative");
    }
    total.add(w);
  }
  if (std::abs(total.value() - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "mix_observables: weights sum to " << total.value() << ", expected 1";
    throw DomainError(msg.str());
  }
  for (const auto& p : parts) require_same_space(parts[0], p, "mix_observables");

  const StateSpace& space = parts[0].space();
  std::vector<std::vector<std::pair<Outcome, double>>> rows(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    for (std::size_t k = 0; k < parts.size(); ++k) {
      if (weights[k] == 0.0) continue;
      for (const auto& e : parts[k].row(i)) {
        rows[i].emplace_back(parts[k].outcomes()[e.outcome], weights[k] * e.effect);
      }
    }
  }
  return Observable::from_rows(space, std::move(rows));
}

Observable quasi_product_envelope(const Observable& first, const Observable& second) {
  require_same_space(first, second, "quasi_product_envelope");
  if (!first.is_deterministic() || !second.is_deterministic()) {
    throw DomainError("quasi_product_envelope: both factors must be deterministic observables");
  }
  const StateSpace& space = first.space();
  std::vector<std::vector<std::pair<Outcome, double>>> rows(space.size());
  for (std::size_t i = 0; i < space.size(); ++i) {
    const Outcome& v1 = first.deterministic_value(i);
    const Outcome& v2 = second.deterministic_value(i);
    if (v1 == v2) {
      rows[i] = {{Outcome::concat(v1, v1), 1.0}};
    } else {
      rows[i] = {{Outcome::concat(v1, v2), 0.5}, {Outcome::concat(v2, v1), 0.5}};
    }
  }
  return Observable::from_rows(space, std::move(rows));
}

Observable product_observable(const Observable& a, const Observable& b, std::size_t cap) {
  const std::size_t cells = sat_mul(sat_mul(a.space().size(), b.space().size()),
                                    sat_mul(a.outcome_count(), b.outcome_count()));
  if (cells > cap) {
    std::ostringstream msg;
    msg << "product_observable: " << cells << " table cells exceed the cap of " << cap;
    throw ResourceError(msg.str());
  }
  StateSpace space = product_space(a.space(), b.space());
  std::vector<std::vector<std::pair<Outcome, double>>> rows;
  rows.reserve(space.size());
  for (std::size_t i = 0; i < a.space().size(); ++i) {
    for (std::size_t j = 0; j < b.space().size(); ++j) {
      std::vector<std::pair<Outcome, double>> row;
      for (const auto& ea : a.row(i)) {
        for (const auto& eb : b.row(j)) {
          row.emplace_back(Outcome::concat(a.outcomes()[ea.outcome], b.outcomes()[eb.outcome]),
                           ea.effect * eb.effect);
        }
      }
      rows.push_back(std::move(row));
    }
  }
  return Observable::from_rows(std::move(space), std::move(rows));
}

Observable first_marginal(const Observable& o, std::size_t leading) {
  std::vector<std::vector<std::pair<Outcome, double>>> rows(o.space().size());
  for (std::size_t i = 0; i < o.space().size(); ++i) {
    for (const auto& e : o.row(i)) {
      auto c = o.outcomes()[e.outcome].coords();
      if (c.size() < leading) throw DomainError("first_marginal: outcome arity too small");
      rows[i].emplace_back(Outcome(std::vector<double>(c.begin(), c.begin() + leading)),
                           e.effect);
    }
  }
  return Observable::from_rows(o.space(), std::move(rows));
}

ParallelObservable::ParallelObservable(Observable base, std::size_t repetitions, std::size_t cap)
    : base_(std::move(base)), repetitions_(repetitions), cap_(cap) {
  if (repetitions_ == 0) throw DomainError("iid_parallel: n must be >= 1");
  std::size_t cells = base_.space().size();
  for (std::size_t k = 0; k < repetitions_ && cells <= cap_; ++k) {
    cells = sat_mul(cells, base_.outcome_count());
  }
  if (cells > cap_) return;
  if (repetitions_ == 1) {
    table_ = base_;
    return;
  }
  std::vector<std::vector<std::pair<Outcome, double>>> rows(base_.space().size());
  for (std::size_t i = 0; i < base_.space().size(); ++i) {
    std::vector<std::pair<Outcome, double>> acc = {{Outcome(std::vector<double>{}), 1.0}};
    for (std::size_t k = 0; k < repetitions_; ++k) {
      std::vector<std::pair<Outcome, double>> next;
      next.reserve(acc.size() * base_.row(i).size());
      for (const auto& [prefix, p] : acc) {
        for (const auto& e : base_.row(i)) {
          next.emplace_back(Outcome::concat(prefix, base_.outcomes()[e.outcome]), p * e.effect);
        }
      }
      acc = std::move(next);
    }
    rows[i] = std::move(acc);
  }
  table_ = Observable::from_rows(base_.space(), std::move(rows));
}

const Observable& ParallelObservable::table() const {
  if (!table_) {
    std::ostringstream msg;
    msg << "iid_parallel: " << repetitions_ << "-fold table exceeds the cap of " << cap_
        << " cells; only sampling is available";
    throw ResourceError(msg.str());
  }
  return *table_;
}

std::vector<std::size_t> ParallelObservable::sample(PureState s, RngStream& rng,
                                                    std::size_t trials) const {
  check_on(base_.space(), s);
  std::vector<std::size_t> out(trials * repetitions_);
  for (auto& x : out) x = draw_outcome(base_, s.index, rng.uniform());
  return out;
}

ParallelObservable iid_parallel(const Observable& o, std::size_t n, std::size_t cap) {
  return ParallelObservable(o, n, cap);
}

}  // namespace twoenv
