#include <algorithm>
#include <cmath>
#include <limits>

#include "barostoch/paths.hpp"

namespace barostoch {

namespace {

// Sorted unique grid knots and jump times of one path.
std::vector<double> event_times(const CadlagPath& p) {
  std::vector<double> ev(p.grid_times().begin(), p.grid_times().end());
  for (const Jump& j : p.jumps()) ev.push_back(j.time);
  std::sort(ev.begin(), ev.end());
  ev.erase(std::unique(ev.begin(), ev.end()), ev.end());
  return ev;
}

// Events strictly inside (lo, hi).
std::pair<std::size_t, std::size_t> open_range(const std::vector<double>& ev,
                                               double lo, double hi) {
  const auto first = std::upper_bound(ev.begin(), ev.end(), lo);
  const auto last = std::lower_bound(first, ev.end(), hi);
  return {static_cast<std::size_t>(first - ev.begin()),
          static_cast<std::size_t>(last - ev.begin())};
}

// sup |x(t) - y(lambda(t))| for t in [a.t, b.t] with lambda linear from a to
// b. Right values at a, left limits at b, both at every interior event. The
// difference is linear between events, so this is the exact supremum
// (except the right value at b, which the following segment covers).
// Returns early with some value above `cutoff` once the sup exceeds it.
double segment_value_sup(const CadlagPath& x, const CadlagPath& y,
                         const std::vector<double>& xev,
                         const std::vector<double>& yev, const Knot& a,
                         const Knot& b,
                         double cutoff = std::numeric_limits<double>::infinity()) {
  double sup = std::abs(x.evaluate(a.t) - y.evaluate(a.lambda));
  sup = std::max(sup, std::abs(x.left_limit(b.t) - y.left_limit(b.lambda)));
  if (sup > cutoff) return sup;

  const double ratio = (b.lambda - a.lambda) / (b.t - a.t);
  auto probe = [&](double t, double s) {
    t = std::clamp(t, a.t, b.t);
    s = std::clamp(s, a.lambda, b.lambda);
    sup = std::max(sup, std::abs(x.evaluate(t) - y.evaluate(s)));
    sup = std::max(sup, std::abs(x.left_limit(t) - y.left_limit(s)));
  };

  const auto [xi0, xi1] = open_range(xev, a.t, b.t);
  for (std::size_t k = xi0; k < xi1 && sup <= cutoff; ++k) {
    const double t = xev[k];
    probe(t, a.lambda + (t - a.t) * ratio);
  }
  const auto [yi0, yi1] = open_range(yev, a.lambda, b.lambda);
  for (std::size_t k = yi0; k < yi1 && sup <= cutoff; ++k) {
    const double s = yev[k];
    probe(a.t + (s - a.lambda) / ratio, s);
  }
  return sup;
}

struct DpCell {
  double cost = std::numeric_limits<double>::infinity();
  double time_cost = std::numeric_limits<double>::infinity();
  int pred_i = -1;
  int pred_j = -1;
};

bool better(double cost, double time_cost, const DpCell& cur) {
  if (cost < cur.cost) return true;
  return cost == cur.cost && time_cost < cur.time_cost;
}

// `bound` is the cost of some admissible lambda (the identity); transitions
// that cannot beat it or the cell they land on are pruned, which leaves the
// optimum and its tie-break unchanged.
SkorokhodResult skorokhod_one_way(const CadlagPath& x, const CadlagPath& y,
                                  double bound) {
  const double horizon = x.horizon();
  const auto xev = event_times(x);
  const auto yev = event_times(y);
  const int n = static_cast<int>(x.jumps().size());
  const int m = static_cast<int>(y.jumps().size());

  // Index 0 is the origin, n+1 / m+1 the endpoint T.
  auto tx = [&](int i) {
    if (i == 0) return 0.0;
    if (i == n + 1) return horizon;
    return x.jumps()[static_cast<std::size_t>(i - 1)].time;
  };
  auto sy = [&](int j) {
    if (j == 0) return 0.0;
    if (j == m + 1) return horizon;
    return y.jumps()[static_cast<std::size_t>(j - 1)].time;
  };
  // lambda(T) = T forces a jump at T to match only a jump at T.
  auto node_valid = [&](int i, int j) {
    const bool at_end_x = tx(i) == horizon;
    const bool at_end_y = sy(j) == horizon;
    if ((i == 0) != (j == 0)) return false;
    return at_end_x == at_end_y;
  };

  std::vector<std::vector<DpCell>> dp(
      static_cast<std::size_t>(n + 2),
      std::vector<DpCell>(static_cast<std::size_t>(m + 2)));
  dp[0][0].cost = 0.0;
  dp[0][0].time_cost = 0.0;

  for (int i = 0; i <= n + 1; ++i) {
    for (int j = 0; j <= m + 1; ++j) {
      const DpCell& from = dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
      if (!std::isfinite(from.cost) || !node_valid(i, j)) continue;
      if (i == n + 1 || j == m + 1) continue;
      const Knot a{tx(i), sy(j)};
      for (int i2 = i + 1; i2 <= n + 1; ++i2) {
        for (int j2 = j + 1; j2 <= m + 1; ++j2) {
          const bool to_end = (i2 == n + 1 && j2 == m + 1);
          if (!to_end && (i2 == n + 1 || j2 == m + 1)) continue;
          if (!node_valid(i2, j2)) continue;
          Knot b{tx(i2), sy(j2)};
          if (!(b.t > a.t) || !(b.lambda > a.lambda)) continue;
          const double shift = std::abs(b.lambda - b.t);
          const double time_cost = std::max(from.time_cost, shift);
          DpCell& to = dp[static_cast<std::size_t>(i2)][static_cast<std::size_t>(j2)];
          const double floor = std::max(from.cost, shift);
          if (floor > bound || !better(floor, time_cost, to)) continue;
          const double value =
              segment_value_sup(x, y, xev, yev, a, b, std::min(bound, to.cost));
          const double cost = std::max(floor, value);
          if (better(cost, time_cost, to)) {
            to.cost = cost;
            to.time_cost = time_cost;
            to.pred_i = i;
            to.pred_j = j;
          }
        }
      }
    }
  }

  // Terminal: either the endpoint node, or a matched pair of jumps at T.
  const double final_right =
      std::abs(x.evaluate(horizon) - y.evaluate(horizon));
  int best_i = n + 1;
  int best_j = m + 1;
  double best_cost = std::max(dp[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)].cost, final_right);
  double best_time = dp[static_cast<std::size_t>(n + 1)][static_cast<std::size_t>(m + 1)].time_cost;
  if (n > 0 && m > 0 && tx(n) == horizon && sy(m) == horizon) {
    const DpCell& c = dp[static_cast<std::size_t>(n)][static_cast<std::size_t>(m)];
    const double cost = std::max(c.cost, final_right);
    if (cost < best_cost || (cost == best_cost && c.time_cost < best_time)) {
      best_cost = cost;
      best_time = c.time_cost;
      best_i = n;
      best_j = m;
    }
  }

  std::vector<Knot> knots;
  int i = best_i;
  int j = best_j;
  while (i >= 0 && j >= 0) {
    knots.push_back({tx(i), sy(j)});
    const DpCell& c = dp[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const int pi = c.pred_i;
    const int pj = c.pred_j;
    if (i == 0 && j == 0) break;
    i = pi;
    j = pj;
  }
  std::reverse(knots.begin(), knots.end());
  return {best_cost, Reparametrization(std::move(knots))};
}

}  // namespace

double reparametrized_cost(const CadlagPath& x, const CadlagPath& y,
                           const Reparametrization& lambda) {
  if (x.horizon() != y.horizon() || lambda.horizon() != x.horizon()) {
    throw std::invalid_argument("reparametrized_cost: horizon mismatch");
  }
  const auto xev = event_times(x);
  const auto yev = event_times(y);
  const auto knots = lambda.knots();
  double sup = lambda.max_time_shift();
  for (std::size_t k = 0; k + 1 < knots.size(); ++k) {
    sup = std::max(sup, segment_value_sup(x, y, xev, yev, knots[k], knots[k + 1]));
  }
  const double horizon = x.horizon();
  return std::max(sup, std::abs(x.evaluate(horizon) - y.evaluate(horizon)));
}

SkorokhodResult skorokhod_distance(const CadlagPath& x, const CadlagPath& y,
                                   double tol) {
  if (!(tol > 0.0)) {
    throw std::invalid_argument("skorokhod_distance: tol must be positive");
  }
  if (x.horizon() != y.horizon()) {
    throw std::invalid_argument("skorokhod_distance: horizon mismatch");
  }
  // Solving both directions and keeping the smaller makes d(x,y) == d(y,x)
  // hold bit-for-bit.
  const double bound = uniform_distance(x, y);
  SkorokhodResult forward = skorokhod_one_way(x, y, bound);
  SkorokhodResult backward = skorokhod_one_way(y, x, bound);
  if (backward.distance < forward.distance) {
    return {backward.distance, backward.lambda.inverted()};
  }
  return forward;
}

ConvergenceReport skorokhod_converges(std::span<const CadlagPath> seq,
                                      const CadlagPath& x, double tol) {
  if (seq.empty()) {
    throw std::invalid_argument("skorokhod_converges: empty sequence");
  }
  ConvergenceReport report{{}, true, tol};
  report.distances.reserve(seq.size());
  for (const CadlagPath& xn : seq) {
    report.distances.push_back(skorokhod_distance(xn, x, tol).distance);
  }
  for (std::size_t k = 1; k < report.distances.size(); ++k) {
    if (report.distances[k] > report.distances[k - 1] + tol) {
      report.decreasing = false;
    }
  }
  return report;
}

}  // namespace barostoch
