#pragma once

#include <functional>
#include <span>
#include <vector>

#include "barostoch/fluid.hpp"

namespace barostoch {

enum class TestKind { Space, Time, Renormalizer };

/// Test function for the discrete weak identities.
///
/// Space: values at cell centers. Time: psi sampled on a time grid,
/// psi >= 0 and psi(T) = 0. Renormalizer: b and b' tabulated on
/// [0, rho_cap], identically zero beyond rho_cap.
class TestFunction {
 public:
  static TestFunction space(std::vector<double> cell_values);
  /// Samples f at the cell centers of `grid`.
  static TestFunction space(const std::function<double(double)>& f,
                            const Grid1D& grid);
  static TestFunction time(std::vector<double> times, std::vector<double> values);
  static TestFunction renormalizer(const std::function<double(double)>& b,
                                   const std::function<double(double)>& b_prime,
                                   double rho_cap, int samples = 4097);
  /// b == 0.
  static TestFunction zero_renormalizer();

  TestKind kind() const noexcept { return kind_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> times() const noexcept { return times_; }
  double rho_cap() const noexcept { return rho_cap_; }

  /// Zero in the first and last cell.
  bool compactly_supported() const noexcept;

  double b(double rho) const;
  double b_prime(double rho) const;
  /// Linear interpolation of a time test function.
  double psi(double t) const;
  double psi_slope(double t0, double t1) const;

 private:
  double table_lookup(const std::vector<double>& table, double rho) const;

  TestKind kind_ = TestKind::Space;
  std::vector<double> values_;
  std::vector<double> times_;
  std::vector<double> b_table_;
  std::vector<double> db_table_;
  double rho_cap_ = 0.0;
};

/// C-infinity bump b(rho) = amplitude * exp(1 - 1/(1 - s^2)), s = (rho - c)/r.
TestFunction smooth_bump_renormalizer(double center, double radius,
                                      double rho_cap, double amplitude = 1.0);

using SpatialTest = std::function<double(double)>;

/// sin(k pi x / L), k = 1..8, plus a smooth plateau bump centred at L/2.
std::vector<SpatialTest> default_test_family(double length);

/// Sum_i (1/2 rho (u - w)^2 + P(rho)) dx with u = m/rho, kinetic part 0 in
/// vacuum cells.
double relative_energy(const State& state, std::span<const double> w_now,
                       const PressureLaw& law, const Grid1D& grid);
/// Same functional evaluated from the carried relative momentum q.
double relative_energy(const State& state, const PressureLaw& law,
                       const Grid1D& grid);
/// Per-cell 1/2 q^2/rho + P(rho).
std::vector<double> relative_energy_density(const State& state,
                                            const PressureLaw& law,
                                            const Grid1D& grid);

/// Sum over faces of lame_1d (du/dx)^2 with weight dx (dx/2 at walls).
double dissipation(std::span<const double> u, const Viscosity& visc,
                   const Grid1D& grid);

/// Integrand of the work terms of the energy inequality at one record.
double work_rate(const State& state, const NoiseField& noise, Side side,
                 const PressureLaw& law, const Viscosity& visc,
                 const Grid1D& grid);

/// [E(tau) + int_s^tau D] - [E(s) + int_s^tau work] by trapezoid over all
/// records between the two. s and tau must be 0 or output times.
double energy_residual(const Trajectory& traj, const NoiseField& noise,
                       const PressureLaw& law, const Viscosity& visc,
                       const Grid1D& grid, double s, double tau);
/// Same, between two record indices.
double energy_residual_between(const Trajectory& traj, const NoiseField& noise,
                               const PressureLaw& law, const Viscosity& visc,
                               const Grid1D& grid, std::size_t from,
                               std::size_t to);

/// Distributional form with a time test function psi:
/// -int E psi' + int D psi - psi(0) E(0) - int work psi  (<= 0 expected).
double energy_residual_tested(const Trajectory& traj, const NoiseField& noise,
                              const PressureLaw& law, const Viscosity& visc,
                              const Grid1D& grid, const TestFunction& psi);

/// |lhs - rhs| of the renormalized continuity identity on [0, tau].
double renorm_residual(const Trajectory& traj, const TestFunction& b,
                       const TestFunction& phi, const Grid1D& grid, double tau);

double weak_pairing(std::span<const double> field, const TestFunction& phi,
                    const Grid1D& grid);

struct WeakDistance {
  double rho = 0.0;
  double rel_momentum = 0.0;  ///< pairings of rho (u - w)
  double max() const noexcept { return rho > rel_momentum ? rho : rel_momentum; }
};

/// Max over shared output times and the family of |pairing difference|.
/// Trajectories may live on different grids; the family is sampled on each.
WeakDistance weak_distance(const Trajectory& a, const Grid1D& grid_a,
                           const Trajectory& b, const Grid1D& grid_b,
                           std::span<const SpatialTest> family);
WeakDistance weak_distance(const Trajectory& a, const Trajectory& b,
                           std::span<const SpatialTest> family,
                           const Grid1D& grid);

struct DiagnosticsReport {
  std::vector<double> output_times;
  std::vector<double> mass_series;
  std::vector<double> energy_series;
  std::vector<double> dissipation_series;
  /// (s, tau, residual) for s = 0 and consecutive output times.
  struct EnergyCheck {
    double s;
    double tau;
    double residual;
  };
  std::vector<EnergyCheck> energy_residuals;
  /// Residuals at the final time for (b = 0, phi = 1) and (bump b, plateau phi).
  std::vector<double> renorm_residuals;
  /// weak_pairings[k][j]: density at output k against family member j.
  std::vector<std::vector<double>> weak_pairings;

  double mass = 0.0;
  double max_mass_defect = 0.0;  ///< relative
  double energy_tol = 0.0;
  bool mass_ok = false;
  bool energy_ok = false;
  bool renorm_ok = false;
  bool finite = false;
  bool all_ok() const noexcept { return mass_ok && energy_ok && renorm_ok && finite; }
};

struct DiagnosticsOptions {
  /// Energy residual tolerance is coeff * (dx + max dt).
  double residual_tol_coeff = 1.0;
};

DiagnosticsReport diagnose(const Trajectory& traj, const NoiseField& noise,
                           const PressureLaw& law, const Viscosity& visc,
                           const Grid1D& grid,
                           const DiagnosticsOptions& options = {});

}  // namespace barostoch
