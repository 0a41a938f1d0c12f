#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

#include "barostoch/config.hpp"
#include "barostoch/diagnostics.hpp"

namespace barostoch {

/// One path per mode; mode k uses sub-seed derive_seed(seed, k).
NoiseField sample_noise_field(const RunConfig& config, std::uint64_t seed);

/// Mode 1 carries a single jump (jump_time, jump_size); other modes are zero.
NoiseField single_jump_noise(const RunConfig& config);

/// Time convolution with a box kernel of width eps. The path is extended
/// oddly below 0 (so the result still starts at 0) and as a constant past T.
/// The result has no jumps and is sampled on its kink times plus a uniform
/// refinement of spacing about eps / 16.
CadlagPath mollify_path(const CadlagPath& path, double eps);
NoiseField mollify_noise(const NoiseField& noise, double eps);

/// Solve failure after every cfl retry; carries the seed for replay.
class PathFailure : public std::runtime_error {
 public:
  PathFailure(std::uint64_t seed, double time, const std::string& what);
  std::uint64_t seed() const noexcept { return seed_; }
  double time() const noexcept { return time_; }

 private:
  std::uint64_t seed_;
  double time_;
};

struct RunResult {
  std::uint64_t seed = 0;
  NoiseField noise;
  Trajectory trajectory;
  DiagnosticsReport report;
  int retries = 0;
  std::filesystem::path directory;  ///< empty when nothing was persisted
};

/// <root>/<config digest>-seed<seed>
std::filesystem::path run_directory(const std::filesystem::path& root,
                                    const RunConfig& config, std::uint64_t seed);

/// Solves `noise` with the config's data; halves cfl on a vacuum breach,
/// up to three times.
RunResult solve_with_noise(const RunConfig& config, NoiseField noise,
                           std::uint64_t seed);

/// Samples, solves, diagnoses; persists under run_directory(out_root, ...)
/// unless out_root is empty.
RunResult run_single(const RunConfig& config, std::uint64_t seed,
                     const std::filesystem::path& out_root = {});

void persist_run(const RunResult& result, const RunConfig& config,
                 const std::filesystem::path& dir);

struct PathOutcome {
  std::uint64_t seed = 0;
  bool solved = false;
  bool mass_ok = false;
  bool energy_ok = false;
  bool renorm_ok = false;
  bool finite = false;
  double mass = 0.0;
  double final_energy = 0.0;
  double jump_count = 0.0;
  std::string error;

  bool ok() const noexcept { return solved && mass_ok && energy_ok && renorm_ok && finite; }
};

struct Moments {
  double mean = 0.0;
  double variance = 0.0;  ///< unbiased; 0 for a single sample
};

/// Mean and variance in the given order.
Moments moments(const std::vector<double>& xs);

struct EnsembleSummary {
  std::vector<PathOutcome> paths;  ///< in seed order
  Moments mass;
  Moments final_energy;
  Moments jump_count;
  std::vector<std::uint64_t> failed_seeds;
  double mass_pass_rate = 0.0;

  bool all_ok() const noexcept { return failed_seeds.empty(); }
};

/// Runs seeds seed+0 .. seed+N-1 on config.threads workers. Results are
/// reduced in seed order. Writes summary.json and summary.csv under
/// out_root when given. Throws if more than half of the paths failed to solve.
EnsembleSummary run_ensemble(const RunConfig& config,
                             const std::filesystem::path& out_root = {});

std::string ensemble_json(const EnsembleSummary& summary);

/// True if xs is non-increasing except for at most `max_inversions` steps
/// that grow by no more than the factor 1 + rel_tol.
bool non_increasing_within(const std::vector<double>& xs, double rel_tol,
                           int max_inversions);

struct StabilityRow {
  double width = 0.0;
  WeakDistance weak;
  double uniform = 0.0;    ///< max over modes
  double skorokhod = 0.0;  ///< max over modes
};

struct StabilityReport {
  std::vector<StabilityRow> rows;
  /// Cross-grid weak distance of zero-noise runs at n_cells and baseline_cells.
  WeakDistance baseline;
  bool rho_non_increasing = false;
  bool momentum_non_increasing = false;
  bool final_within_baseline = false;

  bool all_ok() const noexcept {
    return rho_non_increasing && momentum_non_increasing && final_within_baseline;
  }
};

/// Mollifies the noise with each configured width, solves each on the same
/// grid, and compares against the jump-semantics solve for the noise itself.
StabilityReport run_stability(const RunConfig& config, std::uint64_t seed,
                              const std::filesystem::path& out_root = {});

std::string stability_csv(const StabilityReport& report);

}  // namespace barostoch
