#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>

#include "barostoch/harness.hpp"
#include "barostoch/io.hpp"

using namespace barostoch;
namespace fs = std::filesystem;

namespace {

const std::string kData = BAROSTOCH_TEST_DATA;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("barostoch_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

RunConfig small() { return load_config(kData + "/small.ini"); }

// L1 norm of f - g on [0, T] by dense midpoint sampling.
double l1(const CadlagPath& f, const CadlagPath& g, int samples = 200000) {
  const double T = f.horizon();
  double acc = 0.0;
  for (int k = 0; k < samples; ++k) {
    const double t = (k + 0.5) * T / samples;
    acc += std::abs(f.evaluate(t) - g.evaluate(t));
  }
  return acc * T / samples;
}

}  // namespace

TEST(Mollify, StepBecomesLinearRamp) {
  const double tau = 0.4;
  const CadlagPath step(1.0, {0.0}, {0.0}, {{tau, 1.0}});
  for (double eps : {0.2, 0.05, 0.01}) {
    const auto m = mollify_path(step, eps);
    EXPECT_TRUE(m.jumps().empty());
    EXPECT_EQ(m.evaluate(0.0), 0.0);
    const double h = 0.5 * eps;
    for (double s : {-1.5, -1.0, -0.5, 0.0, 0.25, 0.5, 1.0, 1.5}) {
      const double t = tau + s * h;
      const double ramp = std::clamp((t - (tau - h)) / eps, 0.0, 1.0);
      EXPECT_NEAR(m.evaluate(t), ramp, 1e-12) << eps << " " << s;
    }
    // The ramp differs from the step on a set of measure eps with mean gap 1/4.
    EXPECT_NEAR(l1(m, step), 0.25 * eps, 1e-4);
  }
}

TEST(Mollify, LipschitzPathWithinLipTimesEps) {
  std::mt19937_64 gen(11);
  std::normal_distribution<double> n;
  std::vector<double> t{0.0};
  std::vector<double> v{0.0};
  double lip = 0.0;
  for (int k = 1; k <= 40; ++k) {
    t.push_back(k / 40.0);
    v.push_back(v.back() + n(gen) / 40.0);
    lip = std::max(lip, std::abs(v.back() - v[v.size() - 2]) * 40.0);
  }
  const CadlagPath p(1.0, t, v, {});
  for (double eps : {0.1, 0.02}) {
    const auto m = mollify_path(p, eps);
    EXPECT_LE(uniform_distance(m, p), lip * eps + 1e-12);
  }
  // Linear paths are reproduced away from the horizon; odd reflection keeps 0.
  const CadlagPath line(1.0, {0.0, 1.0}, {0.0, 2.0}, {});
  const auto ml = mollify_path(line, 0.1);
  for (double s : {0.0, 0.01, 0.3, 0.9}) EXPECT_NEAR(ml.evaluate(s), 2.0 * s, 1e-12);
  EXPECT_THROW(mollify_path(line, 0.0), std::invalid_argument);
}

TEST(Mollify, NoiseFieldKeepsModes) {
  auto c = small();
  c.jump_time = 0.1;
  const auto noise = single_jump_noise(c);
  const auto smooth = mollify_noise(noise, 0.05);
  EXPECT_EQ(smooth.paths().size(), noise.paths().size());
  EXPECT_TRUE(smooth.jump_times().empty());
  // Averaging never raises the sup; the plateau after the ramp keeps it.
  EXPECT_NEAR(smooth.forcing_bound(), noise.forcing_bound(), 1e-12);
}

TEST(Noise, SampledFieldIsSeedDeterministic) {
  const auto c = small();
  const auto a = sample_noise_field(c, 3);
  const auto b = sample_noise_field(c, 3);
  const auto d = sample_noise_field(c, 4);
  EXPECT_EQ(a.digest(), b.digest());
  EXPECT_NE(a.digest(), d.digest());
  EXPECT_EQ(a.paths().size(), 3u);
}

TEST(Io, PathRoundTrip) {
  const auto dir = scratch("io");
  const CadlagPath p(1.0, {0.0, 0.3, 0.7}, {0.0, 0.1 + 0.2, -1.0 / 3.0}, {{0.5, 0.25}, {1.0, -2.0}});
  write_path(dir, "mode_1", p);
  const auto back = read_path(dir / "mode_1.csv");
  EXPECT_EQ(back.horizon(), 1.0);
  ASSERT_EQ(back.jumps().size(), 2u);
  EXPECT_EQ(uniform_distance(back, p), 0.0);
  EXPECT_EQ(read_text(dir / "mode_1_jumps.csv").rfind("jump_time,jump_size\n", 0), 0u);
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
}

TEST(RunSingle, DeterministicAndPersisted) {
  auto c = small();
  const auto root = scratch("single");
  const auto a = run_single(c, 7, root);
  const auto b = run_single(c, 7);
  ASSERT_EQ(a.trajectory.records.size(), b.trajectory.records.size());
  const State& sa = a.trajectory.records.back().state;
  const State& sb = b.trajectory.records.back().state;
  EXPECT_EQ(sa.rho, sb.rho);
  EXPECT_EQ(sa.m, sb.m);
  EXPECT_TRUE(a.report.all_ok());
  EXPECT_EQ(a.directory, run_directory(root, c, 7));
  for (const char* f : {"config.ini", "noise/mode_1.csv", "noise/mode_3_jumps.csv",
                        "snapshot_000.csv", "snapshot_001.csv", "diagnostics.csv",
                        "energy_residuals.csv", "report.json", "meta.json"}) {
    EXPECT_TRUE(fs::exists(a.directory / f)) << f;
  }
  // The stored config replays the same run.
  const auto replay = load_config((a.directory / "config.ini").string());
  EXPECT_EQ(replay.seed, 7u);
  EXPECT_EQ(run_single(replay, replay.seed).trajectory.records.back().state.m, sa.m);
  fs::remove_all(root);
}

TEST(RunSingle, ZeroNoiseRestStaysAtRest) {
  auto c = small();
  c.profile = "uniform";
  c.brownian_scale = 0.0;
  c.layers.clear();
  const auto r = run_single(c, 1);
  for (const Record& rec : r.trajectory.records) {
    for (std::size_t i = 0; i < rec.state.rho.size(); ++i) {
      ASSERT_NEAR(rec.state.rho[i], 1.0, 1e-14);
      ASSERT_NEAR(rec.state.m[i], 0.0, 1e-14);
    }
  }
}

TEST(Ensemble, SinglePathMatchesRunSingle) {
  auto c = small();
  c.ensemble = 1;
  const auto s = run_ensemble(c);
  const auto r = run_single(c, c.seed);
  ASSERT_EQ(s.paths.size(), 1u);
  EXPECT_EQ(s.paths[0].final_energy, r.report.energy_series.back());
  EXPECT_EQ(s.paths[0].mass, r.report.mass_series.back());
  EXPECT_EQ(s.final_energy.variance, 0.0);
}

TEST(Ensemble, IndependentOfThreadCount) {
  auto c = small();
  c.threads = 1;
  const auto serial = run_ensemble(c);
  c.threads = 3;
  const auto parallel = run_ensemble(c);
  EXPECT_EQ(ensemble_json(serial), ensemble_json(parallel));
  EXPECT_EQ(serial.mass_pass_rate, 1.0);
  EXPECT_TRUE(serial.all_ok());
  for (std::size_t i = 0; i < serial.paths.size(); ++i) EXPECT_EQ(serial.paths[i].seed, c.seed + i);
}

TEST(Ensemble, LayoutOnDisk) {
  auto c = small();
  const auto root = scratch("ensemble");
  run_ensemble(c, root);
  int runs = 0;
  int summaries = 0;
  for (const auto& e : fs::directory_iterator(root)) {
    const auto name = e.path().filename().string();
    if (e.is_directory() && name.find("-seed") != std::string::npos) ++runs;
    if (name.ends_with("-summary.json")) ++summaries;
  }
  EXPECT_EQ(runs, 4);
  EXPECT_EQ(summaries, 1);
  fs::remove_all(root);
}

TEST(Moments, Examples) {
  const auto m = moments({1.0, 2.0, 3.0, 4.0});
  EXPECT_DOUBLE_EQ(m.mean, 2.5);
  EXPECT_DOUBLE_EQ(m.variance, 5.0 / 3.0);
  EXPECT_EQ(moments({}).mean, 0.0);
}

TEST(Stability, NonIncreasingWithin) {
  EXPECT_TRUE(non_increasing_within({4.0, 2.0, 1.0}, 0.1, 1));
  EXPECT_TRUE(non_increasing_within({4.0, 2.0, 2.1, 1.0}, 0.1, 1));
  EXPECT_FALSE(non_increasing_within({4.0, 2.0, 2.3, 1.0}, 0.1, 1));
  EXPECT_FALSE(non_increasing_within({4.0, 4.1, 2.0, 2.1}, 0.1, 1));
  EXPECT_TRUE(non_increasing_within({}, 0.1, 1));
}

TEST(Stability, CsvHeader) {
  StabilityReport r;
  r.rows.push_back({0.1, {0.5, 0.25}, 1.0, 0.5});
  EXPECT_EQ(stability_csv(r), "width,weak_rho,weak_rel_momentum,uniform,skorokhod\n0.10000000000000001,0.5,0.25,1,0.5\n");
}
