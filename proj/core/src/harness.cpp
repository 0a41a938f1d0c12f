#include "barostoch/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "barostoch/io.hpp"
#include "barostoch/rng.hpp"
#include "json.hpp"

namespace barostoch {

namespace {

std::vector<double> uniform_times(double horizon, int steps) {
  std::vector<double> t(static_cast<std::size_t>(steps) + 1);
  for (int k = 0; k <= steps; ++k) t[static_cast<std::size_t>(k)] = horizon * k / steps;
  t.back() = horizon;
  return t;
}

std::size_t count_jumps(const NoiseField& noise) {
  std::size_t n = 0;
  for (const CadlagPath& p : noise.paths()) n += p.jumps().size();
  return n;
}

// Antiderivative of the extended path, I(t) = int_0^t L~(s) ds. Even in t.
class PathIntegral {
 public:
  explicit PathIntegral(const CadlagPath& path)
      : t_(path.grid_times().begin(), path.grid_times().end()),
        v_(path.continuous_values().begin(), path.continuous_values().end()),
        jumps_(path.jumps().begin(), path.jumps().end()) {
    cum_.assign(t_.size(), 0.0);
    for (std::size_t k = 1; k < t_.size(); ++k) {
      cum_[k] = cum_[k - 1] + 0.5 * (v_[k - 1] + v_[k]) * (t_[k] - t_[k - 1]);
    }
  }

  double operator()(double t) const {
    t = std::abs(t);
    double acc = 0.0;
    if (t >= t_.back()) {
      acc = cum_.back() + v_.back() * (t - t_.back());
    } else {
      const auto it = std::upper_bound(t_.begin(), t_.end(), t);
      const auto k = static_cast<std::size_t>(it - t_.begin()) - 1;
      const double slope = (v_[k + 1] - v_[k]) / (t_[k + 1] - t_[k]);
      const double s = t - t_[k];
      acc = cum_[k] + s * (v_[k] + 0.5 * slope * s);
    }
    for (const Jump& j : jumps_) {
      if (t > j.time) acc += j.size * (t - j.time);
    }
    return acc;
  }

 private:
  std::vector<double> t_;
  std::vector<double> v_;
  std::vector<Jump> jumps_;
  std::vector<double> cum_;
};

}  // namespace

NoiseField sample_noise_field(const RunConfig& config, std::uint64_t seed) {
  const LevySpec spec = config.levy_spec();
  const auto grid = uniform_times(config.horizon, config.time_steps);
  std::vector<CadlagPath> paths;
  for (int k = 0; k < config.modes; ++k) {
    paths.push_back(sample_levy(spec, config.horizon, grid,
                                derive_seed(seed, static_cast<std::uint64_t>(k))));
  }
  return NoiseField(default_modes(config.modes, config.n_cells, config.length, config.decay),
                    std::move(paths));
}

NoiseField single_jump_noise(const RunConfig& config) {
  std::vector<CadlagPath> paths;
  paths.emplace_back(config.horizon, std::vector<double>{0.0}, std::vector<double>{0.0},
                     std::vector<Jump>{{config.jump_time, config.jump_size}});
  for (int k = 1; k < config.modes; ++k) paths.push_back(CadlagPath::zero(config.horizon));
  return NoiseField(default_modes(config.modes, config.n_cells, config.length, config.decay),
                    std::move(paths));
}

CadlagPath mollify_path(const CadlagPath& path, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("mollify_path: eps must be positive");
  const double T = path.horizon();
  const double h = 0.5 * eps;
  const PathIntegral integral(path);

  std::vector<double> times{0.0, T};
  auto add = [&](double t) {
    if (t > 0.0 && t < T) times.push_back(t);
  };
  for (const double g : path.grid_times()) {
    add(g - h);
    add(g + h);
    add(h - g);
  }
  for (const Jump& j : path.jumps()) {
    add(j.time - h);
    add(j.time + h);
    add(h - j.time);
  }
  const int fine = static_cast<int>(std::ceil(16.0 * T / eps));
  for (int k = 1; k < fine; ++k) add(T * k / fine);
  std::sort(times.begin(), times.end());
  times.erase(std::unique(times.begin(), times.end()), times.end());

  std::vector<double> values(times.size());
  for (std::size_t k = 0; k < times.size(); ++k) {
    const double t = times[k];
    values[k] = (integral(t + h) - integral(t - h)) / eps;
  }
  values.front() = 0.0;
  return CadlagPath(T, std::move(times), std::move(values), {});
}

NoiseField mollify_noise(const NoiseField& noise, double eps) {
  std::vector<CadlagPath> paths;
  for (const CadlagPath& p : noise.paths()) paths.push_back(mollify_path(p, eps));
  std::vector<SpatialMode> modes(noise.modes().begin(), noise.modes().end());
  return NoiseField(std::move(modes), std::move(paths));
}

PathFailure::PathFailure(std::uint64_t seed, double time, const std::string& what)
    : std::runtime_error("seed " + std::to_string(seed) + ": " + what),
      seed_(seed),
      time_(time) {}

std::filesystem::path run_directory(const std::filesystem::path& root,
                                    const RunConfig& config, std::uint64_t seed) {
  return root / (hex_digest(config_digest(config)) + "-seed" + std::to_string(seed));
}

RunResult solve_with_noise(const RunConfig& config, NoiseField noise, std::uint64_t seed) {
  const InitialData init = make_initial_data(config);
  const PressureLaw law = config.pressure_law();
  const Viscosity visc = config.viscosity();
  const Grid1D grid = config.grid();
  SolverOptions options;
  options.cfl = config.cfl;
  options.record_steps = config.record_steps;

  for (int retry = 0;; ++retry) {
    try {
      Trajectory traj = solve_path(init.rho, init.m, noise, law, visc, grid, config.horizon,
                                   options, config.outputs());
      DiagnosticsOptions dopt;
      dopt.residual_tol_coeff = config.residual_tol_coeff;
      DiagnosticsReport report = diagnose(traj, noise, law, visc, grid, dopt);
      return RunResult{seed, std::move(noise), std::move(traj), std::move(report), retry, {}};
    } catch (const VacuumBreach& e) {
      if (retry == 3) throw PathFailure(seed, e.time(), e.what());
      options.cfl *= 0.5;
    }
  }
}

RunResult run_single(const RunConfig& config, std::uint64_t seed,
                     const std::filesystem::path& out_root) {
  RunResult result = solve_with_noise(config, sample_noise_field(config, seed), seed);
  if (!out_root.empty()) {
    result.directory = run_directory(out_root, config, seed);
    persist_run(result, config, result.directory);
  }
  return result;
}

void persist_run(const RunResult& r, const RunConfig& config,
                 const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir / "noise");
  RunConfig stored = config;
  stored.seed = r.seed;
  write_text(dir / "config.ini", serialize(stored));
  for (std::size_t k = 0; k < r.noise.paths().size(); ++k) {
    write_path(dir / "noise", "mode_" + std::to_string(k + 1), r.noise.paths()[k]);
  }
  const Grid1D grid = config.grid();
  for (std::size_t k = 0; k < r.trajectory.output_times.size(); ++k) {
    char name[32];
    std::snprintf(name, sizeof name, "snapshot_%03zu.csv", k);
    write_text(dir / name, snapshot_csv(r.trajectory.at_output(k), grid));
  }
  write_text(dir / "diagnostics.csv", diagnostics_csv(r.report));
  write_text(dir / "energy_residuals.csv", energy_residuals_csv(r.report));
  write_text(dir / "report.json", report_json(r.report));

  const InitialData init = make_initial_data(config);
  nlohmann::ordered_json meta;
  meta["seed"] = r.seed;
  meta["config_digest"] = hex_digest(config_digest(config));
  meta["noise_digest"] = hex_digest(r.noise.digest());
  meta["forcing_bound"] = r.noise.forcing_bound();
  meta["jump_count"] = count_jumps(r.noise);
  meta["initial_mass"] = init.mass;
  meta["initial_energy"] = init.energy;
  meta["cfl"] = r.trajectory.cfl;
  meta["retries"] = r.retries;
  meta["steps"] = r.trajectory.dt_history.size();
  meta["output_times"] = r.trajectory.output_times;
  write_text(dir / "meta.json", meta.dump(2) + "\n");
}

Moments moments(const std::vector<double>& xs) {
  Moments m;
  if (xs.empty()) return m;
  double sum = 0.0;
  for (const double x : xs) sum += x;
  m.mean = sum / static_cast<double>(xs.size());
  if (xs.size() > 1) {
    double ss = 0.0;
    for (const double x : xs) ss += (x - m.mean) * (x - m.mean);
    m.variance = ss / static_cast<double>(xs.size() - 1);
  }
  return m;
}

EnsembleSummary run_ensemble(const RunConfig& config, const std::filesystem::path& out_root) {
  const auto n = static_cast<std::size_t>(config.ensemble);
  std::vector<PathOutcome> outcomes(n);
  std::atomic<std::size_t> next{0};

  auto work = [&]() {
    for (std::size_t i = next++; i < n; i = next++) {
      PathOutcome& o = outcomes[i];
      o.seed = config.seed + i;
      try {
        NoiseField noise = sample_noise_field(config, o.seed);
        o.jump_count = static_cast<double>(count_jumps(noise));
        RunResult r = solve_with_noise(config, std::move(noise), o.seed);
        if (!out_root.empty()) persist_run(r, config, run_directory(out_root, config, o.seed));
        o.solved = true;
        o.mass_ok = r.report.mass_ok;
        o.energy_ok = r.report.energy_ok;
        o.renorm_ok = r.report.renorm_ok;
        o.finite = r.report.finite;
        o.mass = r.report.mass_series.back();
        o.final_energy = r.report.energy_series.back();
      } catch (const std::exception& e) {
        o.error = e.what();
      }
    }
  };
  const auto workers = std::min<std::size_t>(static_cast<std::size_t>(config.threads), n);
  if (workers <= 1) {
    work();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  }

  EnsembleSummary s;
  s.paths = std::move(outcomes);
  std::vector<double> mass;
  std::vector<double> energy;
  std::vector<double> jumps;
  std::size_t mass_pass = 0;
  std::size_t solved = 0;
  for (const PathOutcome& o : s.paths) {
    jumps.push_back(o.jump_count);
    if (o.solved) {
      ++solved;
      mass.push_back(o.mass);
      energy.push_back(o.final_energy);
    }
    if (o.mass_ok) ++mass_pass;
    if (!o.ok()) s.failed_seeds.push_back(o.seed);
  }
  s.mass = moments(mass);
  s.final_energy = moments(energy);
  s.jump_count = moments(jumps);
  s.mass_pass_rate = static_cast<double>(mass_pass) / static_cast<double>(n);

  if (!out_root.empty()) {
    std::filesystem::create_directories(out_root);
    write_text(out_root / (hex_digest(config_digest(config)) + "-summary.json"),
               ensemble_json(s));
  }
  if (2 * solved < n) {
    throw std::runtime_error("ensemble: " + std::to_string(n - solved) + " of " +
                             std::to_string(n) + " paths failed");
  }
  return s;
}

std::string ensemble_json(const EnsembleSummary& s) {
  nlohmann::ordered_json j;
  j["paths"] = s.paths.size();
  j["mass_pass_rate"] = s.mass_pass_rate;
  j["mass"] = {{"mean", s.mass.mean}, {"variance", s.mass.variance}};
  j["final_energy"] = {{"mean", s.final_energy.mean}, {"variance", s.final_energy.variance}};
  j["jump_count"] = {{"mean", s.jump_count.mean}, {"variance", s.jump_count.variance}};
  j["failed_seeds"] = s.failed_seeds;
  auto rows = nlohmann::ordered_json::array();
  for (const PathOutcome& o : s.paths) {
    nlohmann::ordered_json r;
    r["seed"] = o.seed;
    r["ok"] = o.ok();
    r["mass_ok"] = o.mass_ok;
    r["energy_ok"] = o.energy_ok;
    r["renorm_ok"] = o.renorm_ok;
    r["jump_count"] = o.jump_count;
    if (!o.error.empty()) r["error"] = o.error;
    rows.push_back(std::move(r));
  }
  j["per_path"] = std::move(rows);
  return j.dump(2) + "\n";
}

bool non_increasing_within(const std::vector<double>& xs, double rel_tol,
                           int max_inversions) {
  int inversions = 0;
  for (std::size_t i = 1; i < xs.size(); ++i) {
    if (xs[i] <= xs[i - 1]) continue;
    if (xs[i] > (1.0 + rel_tol) * xs[i - 1]) return false;
    ++inversions;
  }
  return inversions <= max_inversions;
}

StabilityReport run_stability(const RunConfig& config, std::uint64_t seed,
                              const std::filesystem::path& out_root) {
  if (config.widths.empty()) {
    throw std::invalid_argument("stability.widths: no mollification widths configured");
  }
  const NoiseField noise = config.stability_noise == "sampled"
                               ? sample_noise_field(config, seed)
                               : single_jump_noise(config);
  const auto family = default_test_family(config.length);
  const Grid1D grid = config.grid();
  const RunResult reference = solve_with_noise(config, noise, seed);

  StabilityReport rep;
  std::vector<double> rho_seq;
  std::vector<double> q_seq;
  for (const double eps : config.widths) {
    const NoiseField smooth = mollify_noise(noise, eps);
    StabilityRow row;
    row.width = eps;
    for (std::size_t k = 0; k < noise.paths().size(); ++k) {
      row.uniform = std::max(row.uniform, uniform_distance(smooth.paths()[k], noise.paths()[k]));
      row.skorokhod = std::max(
          row.skorokhod, skorokhod_distance(smooth.paths()[k], noise.paths()[k]).distance);
    }
    const RunResult run = solve_with_noise(config, smooth, seed);
    row.weak = weak_distance(run.trajectory, reference.trajectory, family, grid);
    rho_seq.push_back(row.weak.rho);
    q_seq.push_back(row.weak.rel_momentum);
    rep.rows.push_back(row);
  }

  RunConfig coarse = config;
  coarse.n_cells = config.baseline_cells > 0 ? config.baseline_cells : config.n_cells / 2;
  const RunResult fine_zero = solve_with_noise(
      config, NoiseField::zero(config.n_cells, config.length, config.horizon), seed);
  const RunResult coarse_zero = solve_with_noise(
      coarse, NoiseField::zero(coarse.n_cells, coarse.length, coarse.horizon), seed);
  rep.baseline = weak_distance(fine_zero.trajectory, grid, coarse_zero.trajectory,
                               coarse.grid(), family);

  rep.rho_non_increasing = non_increasing_within(rho_seq, 0.1, 1);
  rep.momentum_non_increasing = non_increasing_within(q_seq, 0.1, 1);
  const StabilityRow& last = rep.rows.back();
  rep.final_within_baseline = last.weak.rho <= 10.0 * rep.baseline.rho &&
                              last.weak.rel_momentum <= 10.0 * rep.baseline.rel_momentum;

  if (!out_root.empty()) {
    const auto dir = out_root / (hex_digest(config_digest(config)) + "-seed" +
                                 std::to_string(seed) + "-stability");
    std::filesystem::create_directories(dir);
    write_text(dir / "stability.csv", stability_csv(rep));
    nlohmann::ordered_json j;
    j["baseline_rho"] = rep.baseline.rho;
    j["baseline_rel_momentum"] = rep.baseline.rel_momentum;
    j["rho_non_increasing"] = rep.rho_non_increasing;
    j["rel_momentum_non_increasing"] = rep.momentum_non_increasing;
    j["final_within_baseline"] = rep.final_within_baseline;
    write_text(dir / "stability.json", j.dump(2) + "\n");
  }
  return rep;
}

std::string stability_csv(const StabilityReport& r) {
  std::string out = "width,weak_rho,weak_rel_momentum,uniform,skorokhod\n";
  for (const StabilityRow& row : r.rows) {
    out += format_double(row.width) + "," + format_double(row.weak.rho) + "," +
           format_double(row.weak.rel_momentum) + "," + format_double(row.uniform) + "," +
           format_double(row.skorokhod) + "\n";
  }
  return out;
}

}  // namespace barostoch
