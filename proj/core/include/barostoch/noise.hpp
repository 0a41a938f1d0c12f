#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "barostoch/paths.hpp"

namespace barostoch {

struct LevyAtom {
  double size;  ///< jump size z, nonzero
  double mass;  ///< intensity nu({z}), positive
};

/// Finite discrete Levy measure nu_levy = sum_i mass_i * delta_{size_i}.
class LevyMeasureDiscrete {
 public:
  LevyMeasureDiscrete() = default;
  explicit LevyMeasureDiscrete(std::vector<LevyAtom> atoms);

  std::span<const LevyAtom> atoms() const noexcept { return atoms_; }
  /// b = nu(R \ {0}); the rate of the jump clock.
  double total_mass() const noexcept { return total_mass_; }
  /// Integral of z against nu; E L(t) = t * first_moment().
  double first_moment() const noexcept;
  /// Integral of z^2 against nu; Var L(t) = t * second_moment().
  double second_moment() const noexcept;

 private:
  std::vector<LevyAtom> atoms_;
  double total_mass_ = 0.0;
};

struct JumpLayer {
  LevyMeasureDiscrete measure;
  bool compensated = false;
};

/// Truncated Levy-Khinchine triplet: L(t) = a t + sigma W(t) + layers.
///
/// Layer 0 carries jumps with |z| >= r_0; layer i >= 1 carries
/// r_i <= |z| < r_{i-1}. Radii must be strictly decreasing and positive,
/// one per layer. Only layer 0 may be left uncompensated.
struct LevySpec {
  double drift = 0.0;
  double brownian_scale = 0.0;
  std::vector<JumpLayer> jump_layers;
  std::vector<double> truncation_radii;

  /// Throws std::invalid_argument naming the first violated constraint.
  void validate() const;
};

/// Brownian motion with drift sampled on `grid_times` (must start at 0 and
/// be strictly increasing); horizon is grid_times.back() unless given.
CadlagPath sample_brownian(double sigma, double drift,
                           std::span<const double> grid_times,
                           std::uint64_t seed, double horizon = 0.0);

/// Compound Poisson path with Levy measure nu on (0, T].
CadlagPath sample_compound_poisson(const LevyMeasureDiscrete& nu,
                                   double horizon, std::uint64_t seed);

/// L(t) - t * int z nu(dz): shifts the continuous part, jumps unchanged.
CadlagPath compensate(const CadlagPath& path, const LevyMeasureDiscrete& nu);

/// Sub-seed indices used by sample_levy: 0 for the Brownian part, 1 + i for
/// jump layer i.
CadlagPath sample_levy(const LevySpec& spec, double horizon,
                       std::span<const double> grid_times, std::uint64_t seed);

/// Spatial profile sampled on the n_cells + 1 nodes x_j = j * L / n_cells.
/// Boundary nodes are exactly zero.
class SpatialMode {
 public:
  SpatialMode(std::vector<double> node_values, double domain_length);

  /// k^{-decay} sin(k pi x / L) on n_cells + 1 nodes.
  static SpatialMode sine(int k, int n_cells, double domain_length,
                          double decay = 2.0);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t n_cells() const noexcept { return values_.size() - 1; }
  double domain_length() const noexcept { return length_; }
  double dx() const noexcept { return length_ / static_cast<double>(n_cells()); }
  double sup_norm() const noexcept { return sup_norm_; }
  /// Max |phi_{j+1} - phi_j| / dx.
  double lipschitz_bound() const noexcept { return lipschitz_; }

 private:
  std::vector<double> values_;
  double length_;
  double sup_norm_ = 0.0;
  double lipschitz_ = 0.0;
};

/// Which one-sided value to take at a jump time.
enum class Side { Right, Left };

/// Forcing w(t, x) = sum_k phi_k(x) L_k(t).
///
/// Node values are the mode sums; cell values are the averages of the two
/// bounding nodes (the piecewise-linear interpolant at the cell center) and
/// cell gradients are the node differences over dx.
class NoiseField {
 public:
  /// Jump times of different paths within this distance are merged.
  static constexpr double kJumpMergeTol = 1e-12;

  NoiseField(std::vector<SpatialMode> modes, std::vector<CadlagPath> paths);

  /// w == 0 for the given grid.
  static NoiseField zero(int n_cells, double domain_length, double horizon);

  std::span<const SpatialMode> modes() const noexcept { return modes_; }
  std::span<const CadlagPath> paths() const noexcept { return paths_; }
  std::span<const double> jump_times() const noexcept { return jump_times_; }
  double horizon() const noexcept { return horizon_; }
  std::size_t n_cells() const noexcept { return n_cells_; }
  double domain_length() const noexcept { return length_; }
  double forcing_bound() const noexcept { return forcing_bound_; }  ///< C_w

  std::vector<double> node_values(double t, Side side = Side::Right) const;
  std::vector<double> cell_values(double t, Side side = Side::Right) const;
  std::vector<double> cell_gradients(double t, Side side = Side::Right) const;
  /// Cell values of the continuous part only (no jumps).
  std::vector<double> continuous_cell_values(double t) const;
  /// Cell values of sum_k phi_k * (jump of L_k at t).
  std::vector<double> jump_cell_increment(double t) const;

  /// First merged jump time strictly after t, or +inf.
  double next_jump_after(double t) const;

  /// Hash of the mode values and path data; identifies the field in outputs.
  std::uint64_t digest() const;

 private:
  std::vector<double> nodes_from_coefficients(std::span<const double> c) const;
  std::vector<double> cells_from_nodes(const std::vector<double>& nodes) const;

  std::vector<SpatialMode> modes_;
  std::vector<CadlagPath> paths_;
  std::vector<double> jump_times_;
  double horizon_ = 0.0;
  std::size_t n_cells_ = 0;
  double length_ = 0.0;
  double forcing_bound_ = 0.0;
};

NoiseField build_noise_field(std::vector<SpatialMode> modes,
                             std::vector<CadlagPath> paths);

/// The default mode family phi_k = k^{-decay} sin(k pi x / L), k = 1..count.
std::vector<SpatialMode> default_modes(int count, int n_cells,
                                       double domain_length,
                                       double decay = 2.0);

}  // namespace barostoch
