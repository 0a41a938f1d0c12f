#pragma once

#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "barostoch/fluid.hpp"
#include "barostoch/noise.hpp"

namespace barostoch {

struct LayerConfig {
  std::vector<double> sizes;
  std::vector<double> masses;
  bool compensated = false;
  double radius = 0.0;

  bool operator==(const LayerConfig&) const = default;
};

struct RunConfig {
  // [grid]
  int n_cells = 0;
  double length = 1.0;
  // [pressure]
  double gamma = 0.0;
  double pressure_coeff = 1.0;
  // [viscosity]
  double mu_shear = 0.0;
  double eta_bulk = 0.0;
  // [noise]
  int modes = 1;
  double decay = 2.0;
  int time_steps = 256;  ///< Brownian grid resolution on [0, T]
  double drift = 0.0;
  double brownian_scale = 0.0;
  std::vector<LayerConfig> layers;
  // [initial]
  std::string profile = "uniform";
  double rho = 1.0;        ///< background density
  double amplitude = 0.0;  ///< gaussian-bump height
  double center = 0.5;     ///< as a fraction of the length
  double width = 0.1;      ///< as a fraction of the length
  double u_amp = 0.0;      ///< u0 = u_amp sin(pi x / L)
  double rho_left = 1.0;
  double rho_right = 0.125;
  double split = 0.5;  ///< riemann interface, fraction of the length
  // [run]
  double horizon = 0.0;
  double cfl = 0.5;
  std::vector<double> output_times;  ///< empty: {T}
  std::uint64_t seed = 0;
  int ensemble = 1;
  int threads = 1;
  bool record_steps = true;
  double residual_tol_coeff = 1.0;
  // [stability]
  std::vector<double> widths;
  std::string stability_noise = "single-jump";  ///< or "sampled"
  double jump_time = 0.25;
  double jump_size = 1.0;
  int baseline_cells = 0;  ///< 0: n_cells / 2

  /// Command-line only; never serialized.
  bool allow_low_gamma = false;

  bool operator==(const RunConfig&) const = default;

  LevySpec levy_spec() const;
  PressureLaw pressure_law() const;
  Viscosity viscosity() const;
  Grid1D grid() const;
  /// Configured output times, or {T}.
  std::vector<double> outputs() const;
};

/// Every violated constraint, one message per line, each naming its key.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> problems);
  const std::vector<std::string>& problems() const noexcept { return problems_; }

 private:
  std::vector<std::string> problems_;
};

/// Parses the INI text and validates it. Throws ConfigError.
RunConfig parse_config(std::istream& in, bool allow_low_gamma = false);
RunConfig parse_config_string(const std::string& text, bool allow_low_gamma = false);
RunConfig load_config(const std::string& path, bool allow_low_gamma = false);

/// Empty when valid.
std::vector<std::string> validate(const RunConfig& config);

/// Canonical INI text; every double written with 17 significant digits.
std::string serialize(const RunConfig& config);

/// Hash of the canonical text with the seed cleared; shared by an ensemble.
std::uint64_t config_digest(const RunConfig& config);
std::string hex_digest(std::uint64_t digest);

struct InitialData {
  std::vector<double> rho;
  std::vector<double> m;
  double mass = 0.0;
  double energy = 0.0;  ///< E0 with w = 0
};

InitialData make_initial_data(const RunConfig& config);

}  // namespace barostoch
