// barostoch: sample forcing, solve, run ensembles and stability sweeps.

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "barostoch/config.hpp"
#include "barostoch/harness.hpp"
#include "barostoch/io.hpp"

namespace fs = std::filesystem;
using namespace barostoch;

namespace {

struct Common {
  std::string config;
  std::uint64_t seed = 0;
  bool seed_given = false;
  std::string out = "out";
  bool allow_low_gamma = false;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_option("--config", c.config, "configuration file")->required();
  cmd->add_option_function<std::uint64_t>(
      "--seed",
      [&c](const std::uint64_t& s) {
        c.seed = s;
        c.seed_given = true;
      },
      "base seed (overrides run.seed)");
  cmd->add_option("--out", c.out, "output root (BAROSTOCH_OUT overrides)");
  cmd->add_flag("--allow-low-gamma", c.allow_low_gamma, "accept 1 < gamma <= 3/2");
}

fs::path out_root(const Common& c) {
  if (const char* env = std::getenv("BAROSTOCH_OUT"); env != nullptr && *env != '\0') {
    return env;
  }
  return c.out;
}

RunConfig load(const Common& c) {
  RunConfig cfg = load_config(c.config, c.allow_low_gamma);
  if (c.seed_given) cfg.seed = c.seed;
  return cfg;
}

const char* verdict(bool ok) { return ok ? "ok" : "FAIL"; }

int cmd_noise(const Common& c) {
  const RunConfig cfg = load(c);
  const NoiseField noise = sample_noise_field(cfg, cfg.seed);
  const fs::path dir = run_directory(out_root(c), cfg, cfg.seed) / "noise";
  fs::create_directories(dir);
  for (std::size_t k = 0; k < noise.paths().size(); ++k) {
    write_path(dir, "mode_" + std::to_string(k + 1), noise.paths()[k]);
  }
  std::printf("noise: %zu modes, C_w = %.6g, digest %s -> %s\n", noise.paths().size(),
              noise.forcing_bound(), hex_digest(noise.digest()).c_str(), dir.c_str());
  return 0;
}

int cmd_solve(const Common& c) {
  const RunConfig cfg = load(c);
  try {
    const RunResult r = run_single(cfg, cfg.seed, out_root(c));
    const auto& rep = r.report;
    std::printf("seed %llu -> %s\n", static_cast<unsigned long long>(r.seed),
                r.directory.c_str());
    std::printf("mass     %s (max relative defect %.3e)\n", verdict(rep.mass_ok),
                rep.max_mass_defect);
    std::printf("energy   %s (tol %.3e)\n", verdict(rep.energy_ok), rep.energy_tol);
    std::printf("renorm   %s\n", verdict(rep.renorm_ok));
    std::printf("finite   %s\n", verdict(rep.finite));
    return rep.all_ok() ? 0 : 1;
  } catch (const PathFailure& e) {
    std::fprintf(stderr, "vacuum-breach: %s (t = %.17g)\n", e.what(), e.time());
    return 1;
  }
}

int cmd_ensemble(const Common& c) {
  const RunConfig cfg = load(c);
  const EnsembleSummary s = run_ensemble(cfg, out_root(c));
  std::printf("paths %zu, mass pass rate %.4f, failed %zu\n", s.paths.size(), s.mass_pass_rate,
              s.failed_seeds.size());
  std::printf("final energy mean %.6g var %.6g; jumps mean %.6g var %.6g\n",
              s.final_energy.mean, s.final_energy.variance, s.jump_count.mean,
              s.jump_count.variance);
  for (const auto seed : s.failed_seeds) {
    std::printf("failed seed %llu\n", static_cast<unsigned long long>(seed));
  }
  return s.all_ok() ? 0 : 1;
}

int cmd_stability(const Common& c) {
  const RunConfig cfg = load(c);
  const StabilityReport r = run_stability(cfg, cfg.seed, out_root(c));
  std::fputs(stability_csv(r).c_str(), stdout);
  std::printf("baseline rho %.6e rel_momentum %.6e\n", r.baseline.rho,
              r.baseline.rel_momentum);
  std::printf("non-increasing rho %s, rel_momentum %s; final within 10x baseline %s\n",
              verdict(r.rho_non_increasing), verdict(r.momentum_non_increasing),
              verdict(r.final_within_baseline));
  return r.all_ok() ? 0 : 1;
}

int cmd_skorokhod(const std::string& a, const std::string& b) {
  const CadlagPath x = read_path(a);
  const CadlagPath y = read_path(b);
  const SkorokhodResult r = skorokhod_distance(x, y);
  std::string knots;
  for (const Knot& k : r.lambda.knots()) {
    if (!knots.empty()) knots += ";";
    knots += format_double(k.t) + ":" + format_double(k.lambda);
  }
  std::printf("d,lambda_knots\n%s,%s\n", format_double(r.distance).c_str(), knots.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pathwise simulator for barotropic flow under cadlag forcing"};
  app.require_subcommand(1);

  Common noise_opts, solve_opts, ensemble_opts, stability_opts;
  auto* noise = app.add_subcommand("noise", "sample the forcing and export its paths");
  add_common(noise, noise_opts);
  auto* solve = app.add_subcommand("solve", "one sample path: solve, diagnose, persist");
  add_common(solve, solve_opts);
  auto* ensemble = app.add_subcommand("ensemble", "run.ensemble paths over consecutive seeds");
  add_common(ensemble, ensemble_opts);
  auto* stability = app.add_subcommand("stability", "mollification sweep");
  add_common(stability, stability_opts);
  std::string path_a, path_b;
  auto* skorokhod = app.add_subcommand("skorokhod", "distance between two path CSV files");
  skorokhod->add_option("x", path_a, "t,value CSV")->required()->check(CLI::ExistingFile);
  skorokhod->add_option("y", path_b, "t,value CSV")->required()->check(CLI::ExistingFile);

  CLI11_PARSE(app, argc, argv);

  try {
    if (noise->parsed()) return cmd_noise(noise_opts);
    if (solve->parsed()) return cmd_solve(solve_opts);
    if (ensemble->parsed()) return cmd_ensemble(ensemble_opts);
    if (stability->parsed()) return cmd_stability(stability_opts);
    if (skorokhod->parsed()) return cmd_skorokhod(path_a, path_b);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "%s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 1;
}
