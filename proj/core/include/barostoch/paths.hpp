#pragma once

#include <span>
#include <stdexcept>
#include <vector>

namespace barostoch {

struct Jump {
  double time;
  double size;
};

/// Scalar right-continuous path with left limits on [0, T].
///
/// The continuous part is stored as samples on `grid_times` and linearly
/// interpolated between them (held constant after the last sample). Jumps
/// are an explicit sorted list; the value at t adds every jump with
/// time <= t, so the path is right-continuous by construction.
///
/// Invariants: grid starts at 0 with value exactly 0, grid strictly
/// increasing inside [0, T]; jump times strictly increasing inside (0, T].
class CadlagPath {
 public:
  CadlagPath(double horizon, std::vector<double> grid_times,
             std::vector<double> continuous_values, std::vector<Jump> jumps);

  /// L == 0 on [0, T].
  static CadlagPath zero(double horizon);

  double horizon() const noexcept { return horizon_; }
  std::span<const double> grid_times() const noexcept { return grid_times_; }
  std::span<const double> continuous_values() const noexcept { return values_; }
  std::span<const Jump> jumps() const noexcept { return jumps_; }
  bool has_jumps() const noexcept { return !jumps_.empty(); }

  /// Interpolated continuous part at t (no jumps).
  double continuous_part(double t) const;
  /// Sum of jumps with time <= t.
  double jumps_through(double t) const;
  /// Sum of jumps with time < t.
  double jumps_before(double t) const;
  /// Recorded jump size at exactly t, 0 if none.
  double jump_at(double t) const;

  /// Slope of the continuous part averaged over [t0, t1].
  double continuous_slope(double t0, double t1) const;

  /// Value at t in [0, T]; throws std::invalid_argument outside.
  double evaluate(double t) const;
  /// lim_{s -> t-} L(s); at t = 0 this is L(0).
  double left_limit(double t) const;

 private:
  void check_time(double t) const;

  double horizon_;
  std::vector<double> grid_times_;
  std::vector<double> values_;
  std::vector<Jump> jumps_;
  std::vector<double> jump_prefix_;  // jump_prefix_[k] = sum of first k jumps
};

/// Pointwise sum of two paths with the same horizon. Grid is the union of
/// both grids; coincident jumps are merged by adding their sizes.
CadlagPath add_paths(const CadlagPath& a, const CadlagPath& b);

/// Free-function spellings of the evaluation convention.
double evaluate(const CadlagPath& path, double t);
double left_limit(const CadlagPath& path, double t);

/// Every time at which a supremum of |x - y| can be attained for piecewise
/// linear + jump paths: grid knots and jump times of both paths.
std::vector<double> breakpoints(const CadlagPath& x, const CadlagPath& y);

/// sup_t |x(t) - y(t)|, including left limits at every jump time.
double uniform_distance(const CadlagPath& x, const CadlagPath& y);

struct Knot {
  double t;
  double lambda;
};

/// Strictly increasing piecewise-linear time change of [0, T] onto itself.
class Reparametrization {
 public:
  explicit Reparametrization(std::vector<Knot> knots);
  static Reparametrization identity(double horizon);

  std::span<const Knot> knots() const noexcept { return knots_; }
  double horizon() const noexcept { return knots_.back().t; }

  double operator()(double t) const;
  double inverse(double s) const;
  Reparametrization inverted() const;
  /// sup_t |lambda(t) - t|, attained at a knot.
  double max_time_shift() const;

 private:
  std::vector<Knot> knots_;
};

/// max(sup_t |x(t) - y(lambda(t))|, sup_t |lambda(t) - t|), evaluated exactly
/// for piecewise-linear + jump paths.
double reparametrized_cost(const CadlagPath& x, const CadlagPath& y,
                           const Reparametrization& lambda);

struct SkorokhodResult {
  double distance;
  Reparametrization lambda;
};

/// Skorokhod distance d(x, y) over reparametrizations that are piecewise
/// linear between matched jump pairs. Minimizes over monotone partial
/// matchings of x's jumps to y's jumps with a dynamic program; the cost of a
/// matching is max(time shift, value mismatch). `tol` must be positive and
/// bounds the reported slack against the witness re-evaluation.
SkorokhodResult skorokhod_distance(const CadlagPath& x, const CadlagPath& y,
                                   double tol = 1e-9);

struct ConvergenceReport {
  std::vector<double> distances;
  bool decreasing;  ///< non-increasing within tolerance
  double tol;
};

/// Skorokhod distances of seq[n] to x, plus a monotone-trend flag.
ConvergenceReport skorokhod_converges(std::span<const CadlagPath> seq,
                                      const CadlagPath& x, double tol = 1e-9);

}  // namespace barostoch
