#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>

#include "barostoch/paths.hpp"

using namespace barostoch;

namespace {

CadlagPath steps(std::vector<Jump> js, double horizon = 1.0) {
  return CadlagPath(horizon, {0.0}, {0.0}, std::move(js));
}

// Brute force over piecewise-linear lambda with at most two interior knots
// drawn from a grid; exact cost evaluation for pure step paths.
struct StepOracle {
  static double value(const std::vector<Jump>& js, double t) {
    double v = 0.0;
    for (const Jump& j : js) {
      if (j.time <= t) v += j.size;
    }
    return v;
  }

  // t with lambda(t) = s for lambda through the given knots.
  static double inverse(const std::vector<std::pair<double, double>>& k, double s) {
    for (std::size_t i = 1; i < k.size(); ++i) {
      if (s == k[i].second) return k[i].first;
      if (s < k[i].second) {
        const double th = (s - k[i - 1].second) / (k[i].second - k[i - 1].second);
        return k[i - 1].first + th * (k[i].first - k[i - 1].first);
      }
    }
    return k.back().first;
  }

  static double cost(const std::vector<Jump>& x, const std::vector<Jump>& y,
                     const std::vector<std::pair<double, double>>& knots) {
    double shift = 0.0;
    for (const auto& [t, s] : knots) shift = std::max(shift, std::abs(t - s));
    std::vector<Jump> moved;
    for (const Jump& j : y) moved.push_back({inverse(knots, j.time), j.size});
    std::vector<double> bp{0.0, 1.0};
    for (const Jump& j : x) bp.push_back(j.time);
    for (const Jump& j : moved) bp.push_back(j.time);
    std::sort(bp.begin(), bp.end());
    double sup = 0.0;
    for (std::size_t i = 0; i < bp.size(); ++i) {
      sup = std::max(sup, std::abs(value(x, bp[i]) - value(moved, bp[i])));
      if (i + 1 < bp.size()) {
        const double mid = 0.5 * (bp[i] + bp[i + 1]);
        sup = std::max(sup, std::abs(value(x, mid) - value(moved, mid)));
      }
    }
    return std::max(shift, sup);
  }

  static double distance(const std::vector<Jump>& x, const std::vector<Jump>& y) {
    std::vector<double> g;
    for (int k = 1; k < 20; ++k) g.push_back(k / 20.0);
    double best = cost(x, y, {{0.0, 0.0}, {1.0, 1.0}});
    for (std::size_t a = 0; a < g.size(); ++a) {
      for (std::size_t b = 0; b < g.size(); ++b) {
        best = std::min(best, cost(x, y, {{0.0, 0.0}, {g[a], g[b]}, {1.0, 1.0}}));
        for (std::size_t c = a + 1; c < g.size(); ++c) {
          for (std::size_t d = b + 1; d < g.size(); ++d) {
            best = std::min(
                best, cost(x, y, {{0.0, 0.0}, {g[a], g[b]}, {g[c], g[d]}, {1.0, 1.0}}));
          }
        }
      }
    }
    return best;
  }
};

std::vector<Jump> random_steps(std::mt19937_64& gen, int count) {
  std::uniform_int_distribution<int> slot(1, 19);
  std::uniform_int_distribution<int> height(-4, 4);
  std::vector<int> slots;
  while (static_cast<int>(slots.size()) < count) {
    const int s = slot(gen);
    if (std::find(slots.begin(), slots.end(), s) == slots.end()) slots.push_back(s);
  }
  std::sort(slots.begin(), slots.end());
  std::vector<Jump> js;
  for (const int s : slots) {
    int h = 0;
    while (h == 0) h = height(gen);
    js.push_back({s / 20.0, 0.5 * h});
  }
  return js;
}

}  // namespace

TEST(Skorokhod, IdenticalPathsGiveZeroAndIdentity) {
  const auto x = steps({{0.3, 1.0}, {0.6, -2.0}});
  const auto r = skorokhod_distance(x, x);
  EXPECT_EQ(r.distance, 0.0);
  EXPECT_EQ(r.lambda.max_time_shift(), 0.0);
}

TEST(Skorokhod, ShiftedUnitStep) {
  for (double eps : {0.2, 0.05, 0.01}) {
    const auto r = skorokhod_distance(steps({{0.4, 1.0}}), steps({{0.4 + eps, 1.0}}));
    EXPECT_NEAR(r.distance, eps, 1e-12);
  }
}

TEST(Skorokhod, HeightMismatchIsPureValueCost) {
  const auto r = skorokhod_distance(steps({{0.2, 1.0}}), steps({{0.2, 2.0}}));
  EXPECT_EQ(r.distance, 1.0);
}

TEST(Skorokhod, ShiftLargerThanHeightPrefersNoAlignment) {
  // Aligning costs 0.6 in time; leaving the jumps apart costs the height 0.25.
  const auto r = skorokhod_distance(steps({{0.2, 0.25}}), steps({{0.8, 0.25}}));
  EXPECT_EQ(r.distance, 0.25);
}

TEST(Skorokhod, JumpAtHorizonMatchesOnlyHorizon) {
  const auto r = skorokhod_distance(steps({{1.0, 1.0}}), steps({{0.9, 1.0}}));
  EXPECT_EQ(r.distance, 1.0);
  EXPECT_EQ(skorokhod_distance(steps({{1.0, 1.0}}), steps({{1.0, 1.0}})).distance, 0.0);
}

TEST(Skorokhod, ContinuousPartsAreSupported) {
  const CadlagPath x(1.0, {0.0, 1.0}, {0.0, 1.0}, {{0.5, 1.0}});
  const CadlagPath y(1.0, {0.0, 1.0}, {0.0, 1.0}, {{0.55, 1.0}});
  const auto r = skorokhod_distance(x, y);
  EXPECT_NEAR(r.distance, 0.05, 1e-12);
  EXPECT_NEAR(reparametrized_cost(x, y, r.lambda), r.distance, 1e-9);
}

TEST(Skorokhod, RejectsBadArguments) {
  EXPECT_THROW(skorokhod_distance(steps({}), steps({}), 0.0), std::invalid_argument);
  EXPECT_THROW(skorokhod_distance(steps({}), steps({}, 2.0)), std::invalid_argument);
}

TEST(Skorokhod, MatchesBruteForceOracle) {
  std::mt19937_64 gen(20240611);
  std::uniform_int_distribution<int> count(1, 2);
  for (int trial = 0; trial < 60; ++trial) {
    const auto xj = random_steps(gen, count(gen));
    const auto yj = random_steps(gen, count(gen));
    const double oracle = StepOracle::distance(xj, yj);
    const auto r = skorokhod_distance(steps(xj), steps(yj));
    ASSERT_NEAR(r.distance, oracle, 1e-9) << "trial " << trial;
  }
}

TEST(SkorokhodProperties, MetricAxiomsOnRandomPaths) {
  std::mt19937_64 gen(99);
  std::uniform_int_distribution<int> count(0, 3);
  const double tol = 1e-9;
  for (int trial = 0; trial < 100; ++trial) {
    const auto x = steps(random_steps(gen, count(gen)));
    const auto y = steps(random_steps(gen, count(gen)));
    const auto z = steps(random_steps(gen, count(gen)));
    const auto dxy = skorokhod_distance(x, y, tol);
    const double dyx = skorokhod_distance(y, x, tol).distance;
    EXPECT_EQ(dxy.distance, dyx);
    EXPECT_LE(dxy.distance, uniform_distance(x, y) + tol);
    EXPECT_NEAR(reparametrized_cost(x, y, dxy.lambda), dxy.distance, tol);
    const double dxz = skorokhod_distance(x, z, tol).distance;
    const double dyz = skorokhod_distance(y, z, tol).distance;
    EXPECT_LE(dxz, dxy.distance + dyz + 2 * tol);
    if (dxy.distance == 0.0) EXPECT_EQ(uniform_distance(x, y), 0.0);
  }
}

TEST(SkorokhodConverges, ShiftedSteps) {
  const auto x = steps({{0.5, 1.0}});
  std::vector<CadlagPath> seq;
  for (int n = 2; n <= 6; ++n) seq.push_back(steps({{0.5 + 1.0 / (4 * n), 1.0}}));
  const auto rep = skorokhod_converges(seq, x);
  ASSERT_EQ(rep.distances.size(), 5u);
  for (int n = 2; n <= 6; ++n) EXPECT_NEAR(rep.distances[n - 2], 1.0 / (4 * n), 1e-12);
  EXPECT_TRUE(rep.decreasing);
}

TEST(SkorokhodConverges, HeightPerturbation) {
  const auto x = steps({{0.5, 1.0}});
  std::vector<CadlagPath> seq;
  for (int n = 1; n <= 4; ++n) seq.push_back(steps({{0.5, 1.0 + 1.0 / n}}));
  const auto rep = skorokhod_converges(seq, x);
  for (int n = 1; n <= 4; ++n) EXPECT_NEAR(rep.distances[n - 1], 1.0 / n, 1e-15);
  EXPECT_TRUE(rep.decreasing);
}

TEST(SkorokhodConverges, ConstantSequenceAndEmpty) {
  const auto x = steps({{0.5, 1.0}});
  const std::vector<CadlagPath> seq(3, x);
  const auto rep = skorokhod_converges(seq, x);
  for (double d : rep.distances) EXPECT_EQ(d, 0.0);
  EXPECT_THROW(skorokhod_converges(std::span<const CadlagPath>{}, x), std::invalid_argument);
}
