#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <stdexcept>
#include <vector>

#include "barostoch/noise.hpp"

namespace barostoch {

/// Barotropic gamma-law p(rho) = coeff * rho^gamma.
class PressureLaw {
 public:
  /// Requires gamma > 3/2 unless `allow_low_gamma` (then gamma > 1).
  PressureLaw(double gamma, double coeff, bool allow_low_gamma = false);

  double gamma() const noexcept { return gamma_; }
  double coeff() const noexcept { return coeff_; }
  /// lim p'(rho) / rho^{gamma-1} = coeff * gamma.
  double p_inf() const noexcept { return coeff_ * gamma_; }

  double pressure(double rho) const;
  double derivative(double rho) const;
  /// P(rho) = rho * int_1^rho p(z)/z^2 dz = coeff (rho^gamma - rho)/(gamma-1).
  double potential(double rho) const;

 private:
  double gamma_;
  double coeff_;
};

double pressure(const PressureLaw& law, double rho);
double pressure_potential(const PressureLaw& law, double rho);

struct Viscosity {
  double mu_shear;
  double eta_bulk;

  Viscosity(double mu_shear, double eta_bulk);
  /// (4/3) mu + eta: the 1D reduction of Newton's stress law.
  double lame_1d() const noexcept { return 4.0 / 3.0 * mu_shear + eta_bulk; }
};

struct Grid1D {
  int n_cells;
  double length;

  Grid1D(int n_cells, double length);
  double dx() const noexcept { return length / n_cells; }
  double center(int i) const noexcept { return (i + 0.5) * dx(); }
  double face(int j) const noexcept { return j * dx(); }
  std::size_t size() const noexcept { return static_cast<std::size_t>(n_cells); }
};

/// Cell-averaged fields at time t. `w` is the forcing snapshot the state was
/// taken with and `q` the relative momentum rho (u - w), carried separately
/// because it is the quantity a forcing jump leaves untouched.
struct State {
  double t = 0.0;
  std::vector<double> rho;
  std::vector<double> m;
  std::vector<double> w;
  std::vector<double> q;
};

/// Cells with rho below this are vacuum: u = 0 there.
double vacuum_floor(double total_mass, double length);
double total_mass(const State& state, const Grid1D& grid);
/// u = m / rho on non-vacuum cells, 0 on vacuum cells.
std::vector<double> velocity(const State& state, const Grid1D& grid);

/// Viscous stress on the n+1 faces; wall faces use a one-sided difference
/// against the no-slip value u = 0 at distance dx/2.
std::vector<double> stress_1d(const Viscosity& visc, std::span<const double> u,
                              const Grid1D& grid, bool periodic = false);

/// Explicit stability bound, clamped to `max_dt` (gap to the next event).
double cfl_dt(const State& state, const PressureLaw& law, const Viscosity& visc,
              const Grid1D& grid, double cfl,
              double max_dt = std::numeric_limits<double>::infinity());

class VacuumBreach : public std::runtime_error {
 public:
  VacuumBreach(double time, int cell);
  double time() const noexcept { return time_; }
  int cell() const noexcept { return cell_; }

 private:
  double time_;
  int cell_;
};

/// One explicit Rusanov + central-viscosity step to t + dt, then the body
/// force rho * dt_w integrated as rho * (w_c(t+dt) - w_c(t)) with w_c the
/// continuous part. No forcing jump may lie in (t, t + dt).
State step_deterministic(const State& state, const NoiseField& noise, double dt,
                         const PressureLaw& law, const Viscosity& visc,
                         const Grid1D& grid, bool periodic = false);

/// Same as step_deterministic but lands on `t_next` exactly.
State advance_to(const State& state, const NoiseField& noise, double t_next,
                 const PressureLaw& law, const Viscosity& visc,
                 const Grid1D& grid, bool periodic = false);

/// m <- m + rho * dw; rho and q unchanged; w <- w + dw.
State apply_jump_kick(const State& state, std::span<const double> dw_field);

enum class RecordKind { Initial, Step, Output, PreJump, PostJump };

struct Record {
  RecordKind kind;
  State state;
};

struct Trajectory {
  std::vector<Record> records;
  /// records[output_index[k]] is the state at output_times[k] (the post-jump
  /// state when an output time is also a jump time).
  std::vector<double> output_times;
  std::vector<std::size_t> output_index;
  std::vector<double> dt_history;
  double cfl = 0.0;
  std::uint64_t noise_ref = 0;
  double mass = 0.0;

  const State& at_output(std::size_t k) const {
    return records.at(output_index.at(k)).state;
  }
};

struct SolverOptions {
  double cfl = 0.5;
  /// Also store every intermediate step (dense records for diagnostics).
  bool record_steps = false;
  /// Periodic boundaries instead of no-slip walls. Test-only.
  bool periodic = false;
};

/// Initial state with w = 0 and q = m.
State make_initial_state(std::vector<double> rho0, std::vector<double> m0,
                         const Grid1D& grid);

Trajectory solve_path(const std::vector<double>& rho0,
                      const std::vector<double>& m0, const NoiseField& noise,
                      const PressureLaw& law, const Viscosity& visc,
                      const Grid1D& grid, double horizon,
                      const SolverOptions& options,
                      std::vector<double> output_times);

}  // namespace barostoch
