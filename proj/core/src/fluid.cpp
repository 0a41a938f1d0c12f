#include "barostoch/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace barostoch {

PressureLaw::PressureLaw(double gamma, double coeff, bool allow_low_gamma)
    : gamma_(gamma), coeff_(coeff) {
  if (!std::isfinite(gamma) || !(gamma > 1.0)) {
    throw std::invalid_argument("PressureLaw: gamma must exceed 1");
  }
  if (!allow_low_gamma && !(gamma > 1.5)) {
    throw std::invalid_argument(
        "PressureLaw: gamma must exceed 3/2 (use allow_low_gamma to override)");
  }
  if (!(coeff > 0.0) || !std::isfinite(coeff)) {
    throw std::invalid_argument("PressureLaw: coefficient must be positive");
  }
}

double PressureLaw::pressure(double rho) const {
  if (!(rho >= 0.0)) throw std::invalid_argument("pressure: negative density");
  return coeff_ * std::pow(rho, gamma_);
}

double PressureLaw::derivative(double rho) const {
  if (!(rho >= 0.0)) throw std::invalid_argument("pressure: negative density");
  return coeff_ * gamma_ * std::pow(rho, gamma_ - 1.0);
}

double PressureLaw::potential(double rho) const {
  if (!(rho >= 0.0)) throw std::invalid_argument("pressure: negative density");
  if (rho == 0.0) return 0.0;
  return coeff_ * (std::pow(rho, gamma_) - rho) / (gamma_ - 1.0);
}

double pressure(const PressureLaw& law, double rho) { return law.pressure(rho); }
double pressure_potential(const PressureLaw& law, double rho) {
  return law.potential(rho);
}

Viscosity::Viscosity(double mu, double eta) : mu_shear(mu), eta_bulk(eta) {
  if (!(mu > 0.0)) throw std::invalid_argument("Viscosity: mu_shear must be > 0");
  if (!(eta >= 0.0)) throw std::invalid_argument("Viscosity: eta_bulk must be >= 0");
}

Grid1D::Grid1D(int n, double len) : n_cells(n), length(len) {
  if (n < 4) throw std::invalid_argument("Grid1D: need at least 4 cells");
  if (!(len > 0.0)) throw std::invalid_argument("Grid1D: length must be positive");
}

double vacuum_floor(double mass, double length) {
  return 1e-13 * mass / length;
}

double total_mass(const State& state, const Grid1D& grid) {
  double s = 0.0;
  for (const double r : state.rho) s += r;
  return s * grid.dx();
}

std::vector<double> velocity(const State& state, const Grid1D& grid) {
  const double floor = vacuum_floor(total_mass(state, grid), grid.length);
  std::vector<double> u(state.rho.size(), 0.0);
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (state.rho[i] >= floor && state.rho[i] > 0.0) u[i] = state.m[i] / state.rho[i];
  }
  return u;
}

std::vector<double> stress_1d(const Viscosity& visc, std::span<const double> u,
                              const Grid1D& grid, bool periodic) {
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const double mu = visc.lame_1d();
  std::vector<double> s(n + 1);
  for (std::size_t j = 1; j < n; ++j) s[j] = mu * (u[j] - u[j - 1]) / dx;
  if (periodic) {
    s[0] = mu * (u[0] - u[n - 1]) / dx;
    s[n] = s[0];
  } else {
    s[0] = mu * (u[0] - 0.0) / (0.5 * dx);
    s[n] = mu * (0.0 - u[n - 1]) / (0.5 * dx);
  }
  return s;
}

double cfl_dt(const State& state, const PressureLaw& law, const Viscosity& visc,
              const Grid1D& grid, double cfl, double max_dt) {
  if (!(cfl > 0.0 && cfl <= 1.0)) {
    throw std::invalid_argument("cfl_dt: cfl must lie in (0, 1]");
  }
  const double mass = total_mass(state, grid);
  const double floor = vacuum_floor(mass, grid.length);
  double max_u = 0.0;
  double max_dp = 0.0;
  double min_rho = std::numeric_limits<double>::infinity();
  bool any = false;
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    const double r = state.rho[i];
    if (!(r > 0.0) || r < floor) continue;
    any = true;
    max_u = std::max(max_u, std::abs(state.m[i] / r));
    max_dp = std::max(max_dp, law.derivative(r));
    min_rho = std::min(min_rho, r);
  }
  if (!any) throw std::invalid_argument("cfl_dt: all-vacuum state");
  const double dx = grid.dx();
  double bound = dx / (max_u + std::sqrt(max_dp));
  const double lame = visc.lame_1d();
  if (lame > 0.0) bound = std::min(bound, dx * dx * min_rho / (2.0 * lame));
  return std::min(cfl * bound, max_dt);
}

VacuumBreach::VacuumBreach(double time, int cell)
    : std::runtime_error("vacuum-breach: negative density in cell " +
                         std::to_string(cell) + " at t = " + std::to_string(time)),
      time_(time),
      cell_(cell) {}

State advance_to(const State& state, const NoiseField& noise, double t_next,
                 const PressureLaw& law, const Viscosity& visc,
                 const Grid1D& grid, bool periodic) {
  const std::size_t n = grid.size();
  const double dt = t_next - state.t;
  if (!(dt > 0.0)) throw std::invalid_argument("advance_to: time must increase");
  const double dx = grid.dx();
  const double lambda = dt / dx;

  const auto u = velocity(state, grid);
  std::vector<double> p(n);
  std::vector<double> c(n);
  for (std::size_t i = 0; i < n; ++i) {
    p[i] = law.pressure(state.rho[i]);
    c[i] = std::sqrt(law.derivative(state.rho[i]));
  }

  std::vector<double> f_mass(n + 1, 0.0);
  std::vector<double> f_mom(n + 1, 0.0);
  auto rusanov = [&](std::size_t l, std::size_t r, std::size_t face) {
    const double a = std::max(std::abs(u[l]) + c[l], std::abs(u[r]) + c[r]);
    f_mass[face] = 0.5 * (state.m[l] + state.m[r]) -
                   0.5 * a * (state.rho[r] - state.rho[l]);
    f_mom[face] = 0.5 * (state.m[l] * u[l] + p[l] + state.m[r] * u[r] + p[r]) -
                  0.5 * a * (state.m[r] - state.m[l]);
  };
  for (std::size_t j = 1; j < n; ++j) rusanov(j - 1, j, j);
  if (periodic) {
    rusanov(n - 1, 0, 0);
    f_mass[n] = f_mass[0];
    f_mom[n] = f_mom[0];
  } else {
    // Reflecting walls: mirrored ghost (rho, -m) gives zero mass flux.
    const double a0 = std::abs(u[0]) + c[0];
    f_mom[0] = state.m[0] * u[0] + p[0] - a0 * state.m[0];
    const double an = std::abs(u[n - 1]) + c[n - 1];
    f_mom[n] = state.m[n - 1] * u[n - 1] + p[n - 1] + an * state.m[n - 1];
  }
  const auto s = stress_1d(visc, u, grid, periodic);

  State next;
  next.t = t_next;
  next.rho.resize(n);
  next.m.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    next.rho[i] = state.rho[i] - lambda * (f_mass[i + 1] - f_mass[i]);
    next.m[i] = state.m[i] - lambda * (f_mom[i + 1] - f_mom[i]) +
                lambda * (s[i + 1] - s[i]);
  }
  for (std::size_t i = 0; i < n; ++i) {
    if (next.rho[i] < 0.0) throw VacuumBreach(t_next, static_cast<int>(i));
  }

  const auto wc0 = noise.continuous_cell_values(state.t);
  const auto wc1 = noise.continuous_cell_values(t_next);
  for (std::size_t i = 0; i < n; ++i) next.m[i] += next.rho[i] * (wc1[i] - wc0[i]);

  const double floor = vacuum_floor(total_mass(next, grid), grid.length);
  for (std::size_t i = 0; i < n; ++i) {
    if (next.rho[i] < floor) next.m[i] = 0.0;
  }

  // Left value: if a jump sits exactly at t_next this is the pre-jump state.
  next.w = noise.cell_values(t_next, Side::Left);
  next.q.resize(n);
  for (std::size_t i = 0; i < n; ++i) next.q[i] = next.m[i] - next.rho[i] * next.w[i];
  return next;
}

State step_deterministic(const State& state, const NoiseField& noise, double dt,
                         const PressureLaw& law, const Viscosity& visc,
                         const Grid1D& grid, bool periodic) {
  return advance_to(state, noise, state.t + dt, law, visc, grid, periodic);
}

State apply_jump_kick(const State& state, std::span<const double> dw_field) {
  if (dw_field.size() != state.rho.size()) {
    throw std::invalid_argument("apply_jump_kick: field size mismatch");
  }
  State next = state;
  for (std::size_t i = 0; i < dw_field.size(); ++i) {
    next.m[i] = state.m[i] + state.rho[i] * dw_field[i];
    next.w[i] = state.w[i] + dw_field[i];
  }
  return next;
}

State make_initial_state(std::vector<double> rho0, std::vector<double> m0,
                         const Grid1D& grid) {
  if (rho0.size() != grid.size() || m0.size() != grid.size()) {
    throw std::invalid_argument("initial data size does not match the grid");
  }
  double mass = 0.0;
  for (std::size_t i = 0; i < rho0.size(); ++i) {
    if (!(rho0[i] >= 0.0) || !std::isfinite(rho0[i]) || !std::isfinite(m0[i])) {
      throw std::invalid_argument("initial density must be finite and >= 0");
    }
    if (rho0[i] == 0.0 && m0[i] != 0.0) {
      throw std::invalid_argument("initial momentum must vanish where rho = 0");
    }
    mass += rho0[i];
  }
  if (!(mass > 0.0)) throw std::invalid_argument("initial mass must be positive");
  State s;
  s.t = 0.0;
  s.rho = std::move(rho0);
  s.m = std::move(m0);
  s.w.assign(s.rho.size(), 0.0);
  s.q = s.m;
  return s;
}

Trajectory solve_path(const std::vector<double>& rho0,
                      const std::vector<double>& m0, const NoiseField& noise,
                      const PressureLaw& law, const Viscosity& visc,
                      const Grid1D& grid, double horizon,
                      const SolverOptions& options,
                      std::vector<double> output_times) {
  if (noise.n_cells() != grid.size() || noise.domain_length() != grid.length) {
    throw std::invalid_argument("solve_path: noise modes do not match the fluid grid");
  }
  if (!(horizon > 0.0) || horizon > noise.horizon()) {
    throw std::invalid_argument("solve_path: horizon must lie in (0, noise horizon]");
  }
  std::sort(output_times.begin(), output_times.end());
  output_times.erase(std::unique(output_times.begin(), output_times.end()),
                     output_times.end());
  for (const double t : output_times) {
    if (!(t > 0.0) || t > horizon) {
      throw std::invalid_argument("solve_path: output times must lie in (0, T]");
    }
  }
  if (output_times.empty() || output_times.back() != horizon) {
    output_times.push_back(horizon);
  }

  Trajectory traj;
  traj.cfl = options.cfl;
  traj.noise_ref = noise.digest();
  traj.output_times = output_times;

  State state = make_initial_state(rho0, m0, grid);
  traj.mass = total_mass(state, grid);
  traj.records.push_back({RecordKind::Initial, state});

  std::size_t next_output = 0;
  double next_jump = noise.next_jump_after(0.0);
  if (next_jump > horizon) next_jump = std::numeric_limits<double>::infinity();
  while (state.t < horizon) {
    const double target = std::min({output_times[next_output], next_jump, horizon});
    const double dt = cfl_dt(state, law, visc, grid, options.cfl, target - state.t);
    const bool lands = dt >= target - state.t;
    const double t_next = lands ? target : state.t + dt;
    if (!(t_next > state.t)) {
      throw std::runtime_error("solve_path: time step underflow at t = " +
                               std::to_string(state.t));
    }
    traj.dt_history.push_back(t_next - state.t);
    state = advance_to(state, noise, t_next, law, visc, grid, options.periodic);

    if (!lands) {
      if (options.record_steps) traj.records.push_back({RecordKind::Step, state});
      continue;
    }
    const bool is_jump = state.t == next_jump;
    const bool is_output = state.t == output_times[next_output];
    if (is_jump) {
      traj.records.push_back({RecordKind::PreJump, state});
      state = apply_jump_kick(state, noise.jump_cell_increment(state.t));
      traj.records.push_back({RecordKind::PostJump, state});
      next_jump = noise.next_jump_after(state.t);
      if (next_jump > horizon) next_jump = std::numeric_limits<double>::infinity();
    } else {
      traj.records.push_back(
          {is_output ? RecordKind::Output : RecordKind::Step, state});
    }
    if (is_output) {
      traj.output_index.push_back(traj.records.size() - 1);
      if (next_output + 1 < output_times.size()) ++next_output;
    }
  }
  return traj;
}

}  // namespace barostoch
