#include "barostoch/paths.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barostoch {

CadlagPath::CadlagPath(double horizon, std::vector<double> grid_times,
                       std::vector<double> continuous_values,
                       std::vector<Jump> jumps)
    : horizon_(horizon),
      grid_times_(std::move(grid_times)),
      values_(std::move(continuous_values)),
      jumps_(std::move(jumps)) {
  if (!(horizon_ > 0.0) || !std::isfinite(horizon_)) {
    throw std::invalid_argument("CadlagPath: horizon must be positive");
  }
  if (grid_times_.empty() || grid_times_.size() != values_.size()) {
    throw std::invalid_argument(
        "CadlagPath: grid_times and continuous_values must be non-empty and "
        "aligned");
  }
  if (grid_times_.front() != 0.0) {
    throw std::invalid_argument("CadlagPath: grid must start at t = 0");
  }
  if (values_.front() != 0.0) {
    throw std::invalid_argument("CadlagPath: L(0) must be 0");
  }
  for (std::size_t k = 1; k < grid_times_.size(); ++k) {
    if (!(grid_times_[k] > grid_times_[k - 1])) {
      throw std::invalid_argument(
          "CadlagPath: grid_times must be strictly increasing");
    }
  }
  if (grid_times_.back() > horizon_) {
    throw std::invalid_argument("CadlagPath: grid extends past the horizon");
  }
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    const double tk = jumps_[k].time;
    if (!(tk > 0.0) || tk > horizon_) {
      throw std::invalid_argument("CadlagPath: jump time outside (0, T]");
    }
    if (k > 0 && !(tk > jumps_[k - 1].time)) {
      throw std::invalid_argument(
          "CadlagPath: jump times must be strictly increasing");
    }
  }
  jump_prefix_.resize(jumps_.size() + 1, 0.0);
  for (std::size_t k = 0; k < jumps_.size(); ++k) {
    jump_prefix_[k + 1] = jump_prefix_[k] + jumps_[k].size;
  }
}

CadlagPath CadlagPath::zero(double horizon) {
  return CadlagPath(horizon, {0.0}, {0.0}, {});
}

void CadlagPath::check_time(double t) const {
  if (!(t >= 0.0 && t <= horizon_)) {
    throw std::invalid_argument("CadlagPath: evaluation time " +
                                std::to_string(t) + " outside [0, T]");
  }
}

double CadlagPath::continuous_part(double t) const {
  if (t <= 0.0) return values_.front();
  if (t >= grid_times_.back()) return values_.back();
  const auto it = std::upper_bound(grid_times_.begin(), grid_times_.end(), t);
  const auto k = static_cast<std::size_t>(it - grid_times_.begin());
  const double t0 = grid_times_[k - 1];
  const double t1 = grid_times_[k];
  if (t == t0) return values_[k - 1];
  const double theta = (t - t0) / (t1 - t0);
  return values_[k - 1] + theta * (values_[k] - values_[k - 1]);
}

double CadlagPath::jumps_through(double t) const {
  const auto it = std::upper_bound(
      jumps_.begin(), jumps_.end(), t,
      [](double v, const Jump& j) { return v < j.time; });
  return jump_prefix_[static_cast<std::size_t>(it - jumps_.begin())];
}

double CadlagPath::jumps_before(double t) const {
  const auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), t,
      [](const Jump& j, double v) { return j.time < v; });
  return jump_prefix_[static_cast<std::size_t>(it - jumps_.begin())];
}

double CadlagPath::jump_at(double t) const {
  const auto it = std::lower_bound(
      jumps_.begin(), jumps_.end(), t,
      [](const Jump& j, double v) { return j.time < v; });
  if (it != jumps_.end() && it->time == t) return it->size;
  return 0.0;
}

double CadlagPath::continuous_slope(double t0, double t1) const {
  if (!(t1 > t0)) {
    throw std::invalid_argument("continuous_slope: need t1 > t0");
  }
  return (continuous_part(t1) - continuous_part(t0)) / (t1 - t0);
}

double CadlagPath::evaluate(double t) const {
  check_time(t);
  return continuous_part(t) + jumps_through(t);
}

double CadlagPath::left_limit(double t) const {
  check_time(t);
  return continuous_part(t) + jumps_before(t);
}

double evaluate(const CadlagPath& path, double t) { return path.evaluate(t); }
double left_limit(const CadlagPath& path, double t) {
  return path.left_limit(t);
}

CadlagPath add_paths(const CadlagPath& a, const CadlagPath& b) {
  if (a.horizon() != b.horizon()) {
    throw std::invalid_argument("add_paths: horizon mismatch");
  }
  std::vector<double> grid;
  grid.reserve(a.grid_times().size() + b.grid_times().size());
  std::merge(a.grid_times().begin(), a.grid_times().end(),
             b.grid_times().begin(), b.grid_times().end(),
             std::back_inserter(grid));
  grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = a.continuous_part(grid[k]) + b.continuous_part(grid[k]);
  }

  std::vector<Jump> jumps;
  jumps.reserve(a.jumps().size() + b.jumps().size());
  std::merge(a.jumps().begin(), a.jumps().end(), b.jumps().begin(),
             b.jumps().end(), std::back_inserter(jumps),
             [](const Jump& l, const Jump& r) { return l.time < r.time; });
  std::vector<Jump> merged;
  merged.reserve(jumps.size());
  for (const Jump& j : jumps) {
    if (!merged.empty() && merged.back().time == j.time) {
      merged.back().size += j.size;
      if (merged.back().size == 0.0) merged.pop_back();
    } else {
      merged.push_back(j);
    }
  }
  return CadlagPath(a.horizon(), std::move(grid), std::move(values),
                    std::move(merged));
}

std::vector<double> breakpoints(const CadlagPath& x, const CadlagPath& y) {
  std::vector<double> out{0.0, x.horizon()};
  for (const CadlagPath* p : {&x, &y}) {
    out.insert(out.end(), p->grid_times().begin(), p->grid_times().end());
    for (const Jump& j : p->jumps()) out.push_back(j.time);
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double uniform_distance(const CadlagPath& x, const CadlagPath& y) {
  if (x.horizon() != y.horizon()) {
    throw std::invalid_argument("uniform_distance: horizon mismatch");
  }
  double sup = 0.0;
  for (const double t : breakpoints(x, y)) {
    sup = std::max(sup, std::abs(x.evaluate(t) - y.evaluate(t)));
    sup = std::max(sup, std::abs(x.left_limit(t) - y.left_limit(t)));
  }
  return sup;
}

// ---------------------------------------------------------------------------

Reparametrization::Reparametrization(std::vector<Knot> knots)
    : knots_(std::move(knots)) {
  if (knots_.size() < 2) {
    throw std::invalid_argument("Reparametrization: need at least two knots");
  }
  if (knots_.front().t != 0.0 || knots_.front().lambda != 0.0) {
    throw std::invalid_argument("Reparametrization: lambda(0) must be 0");
  }
  if (knots_.back().t != knots_.back().lambda) {
    throw std::invalid_argument("Reparametrization: lambda(T) must be T");
  }
  for (std::size_t k = 1; k < knots_.size(); ++k) {
    if (!(knots_[k].t > knots_[k - 1].t) ||
        !(knots_[k].lambda > knots_[k - 1].lambda)) {
      throw std::invalid_argument(
          "Reparametrization: knots must be strictly increasing");
    }
  }
}

Reparametrization Reparametrization::identity(double horizon) {
  return Reparametrization({{0.0, 0.0}, {horizon, horizon}});
}

namespace {

template <class From, class To>
double interpolate(std::span<const Knot> knots, double v, From from, To to) {
  if (v <= from(knots.front())) return to(knots.front());
  if (v >= from(knots.back())) return to(knots.back());
  const auto it = std::upper_bound(
      knots.begin(), knots.end(), v,
      [&](double value, const Knot& k) { return value < from(k); });
  const Knot& hi = *it;
  const Knot& lo = *(it - 1);
  if (v == from(lo)) return to(lo);
  const double theta = (v - from(lo)) / (from(hi) - from(lo));
  return to(lo) + theta * (to(hi) - to(lo));
}

}  // namespace

double Reparametrization::operator()(double t) const {
  return interpolate(
      knots(), t, [](const Knot& k) { return k.t; },
      [](const Knot& k) { return k.lambda; });
}

double Reparametrization::inverse(double s) const {
  return interpolate(
      knots(), s, [](const Knot& k) { return k.lambda; },
      [](const Knot& k) { return k.t; });
}

Reparametrization Reparametrization::inverted() const {
  std::vector<Knot> inv;
  inv.reserve(knots_.size());
  for (const Knot& k : knots_) inv.push_back({k.lambda, k.t});
  return Reparametrization(std::move(inv));
}

double Reparametrization::max_time_shift() const {
  double sup = 0.0;
  for (const Knot& k : knots_) sup = std::max(sup, std::abs(k.lambda - k.t));
  return sup;
}

}  // namespace barostoch
