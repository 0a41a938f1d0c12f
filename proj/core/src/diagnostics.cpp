#include "barostoch/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace barostoch {

TestFunction TestFunction::space(std::vector<double> cell_values) {
  TestFunction f;
  f.kind_ = TestKind::Space;
  f.values_ = std::move(cell_values);
  return f;
}

TestFunction TestFunction::space(const std::function<double(double)>& fn,
                                 const Grid1D& grid) {
  std::vector<double> v(grid.size());
  for (int i = 0; i < grid.n_cells; ++i) v[static_cast<std::size_t>(i)] = fn(grid.center(i));
  return space(std::move(v));
}

TestFunction TestFunction::time(std::vector<double> times,
                                std::vector<double> values) {
  if (times.size() < 2 || times.size() != values.size()) {
    throw std::invalid_argument("TestFunction::time: need aligned samples");
  }
  for (std::size_t k = 0; k < times.size(); ++k) {
    if (k > 0 && !(times[k] > times[k - 1])) {
      throw std::invalid_argument("TestFunction::time: times must increase");
    }
    if (!(values[k] >= 0.0)) {
      throw std::invalid_argument("TestFunction::time: psi must be >= 0");
    }
  }
  if (values.back() != 0.0) {
    throw std::invalid_argument("TestFunction::time: psi(T) must be 0");
  }
  TestFunction f;
  f.kind_ = TestKind::Time;
  f.times_ = std::move(times);
  f.values_ = std::move(values);
  return f;
}

TestFunction TestFunction::renormalizer(const std::function<double(double)>& b,
                                        const std::function<double(double)>& db,
                                        double rho_cap, int samples) {
  if (!(rho_cap > 0.0) || samples < 2) {
    throw std::invalid_argument("TestFunction::renormalizer: bad table spec");
  }
  TestFunction f;
  f.kind_ = TestKind::Renormalizer;
  f.rho_cap_ = rho_cap;
  f.b_table_.resize(static_cast<std::size_t>(samples));
  f.db_table_.resize(static_cast<std::size_t>(samples));
  for (int k = 0; k < samples; ++k) {
    const double rho = rho_cap * k / (samples - 1);
    f.b_table_[static_cast<std::size_t>(k)] = b(rho);
    f.db_table_[static_cast<std::size_t>(k)] = db(rho);
  }
  // Compact support in [0, rho_cap].
  if (f.b_table_.back() != 0.0) {
    throw std::invalid_argument("TestFunction::renormalizer: b(rho_cap) must be 0");
  }
  return f;
}

TestFunction TestFunction::zero_renormalizer() {
  return renormalizer([](double) { return 0.0; }, [](double) { return 0.0; }, 1.0, 2);
}

bool TestFunction::compactly_supported() const noexcept {
  return kind_ == TestKind::Space && !values_.empty() && values_.front() == 0.0 &&
         values_.back() == 0.0;
}

double TestFunction::table_lookup(const std::vector<double>& table,
                                  double rho) const {
  if (rho <= 0.0) return table.front();
  if (rho >= rho_cap_) return 0.0;
  const double pos = rho / rho_cap_ * static_cast<double>(table.size() - 1);
  const auto k = static_cast<std::size_t>(pos);
  const double theta = pos - static_cast<double>(k);
  return table[k] + theta * (table[k + 1] - table[k]);
}

double TestFunction::b(double rho) const { return table_lookup(b_table_, rho); }
double TestFunction::b_prime(double rho) const {
  return table_lookup(db_table_, rho);
}

double TestFunction::psi(double t) const {
  if (t <= times_.front()) return values_.front();
  if (t >= times_.back()) return values_.back();
  const auto it = std::upper_bound(times_.begin(), times_.end(), t);
  const auto k = static_cast<std::size_t>(it - times_.begin());
  const double theta = (t - times_[k - 1]) / (times_[k] - times_[k - 1]);
  return values_[k - 1] + theta * (values_[k] - values_[k - 1]);
}

double TestFunction::psi_slope(double t0, double t1) const {
  return (psi(t1) - psi(t0)) / (t1 - t0);
}

TestFunction smooth_bump_renormalizer(double center, double radius,
                                      double rho_cap, double amplitude) {
  if (!(radius > 0.0) || center + radius > rho_cap || center - radius < 0.0) {
    throw std::invalid_argument("smooth_bump_renormalizer: support must fit in [0, rho_cap]");
  }
  auto b = [=](double rho) {
    const double s = (rho - center) / radius;
    if (std::abs(s) >= 1.0) return 0.0;
    return amplitude * std::exp(1.0 - 1.0 / (1.0 - s * s));
  };
  auto db = [=](double rho) {
    const double s = (rho - center) / radius;
    if (std::abs(s) >= 1.0) return 0.0;
    const double one_m = 1.0 - s * s;
    return b(rho) * (-2.0 * s / (one_m * one_m)) / radius;
  };
  return TestFunction::renormalizer(b, db, rho_cap);
}

std::vector<SpatialTest> default_test_family(double length) {
  std::vector<SpatialTest> family;
  for (int k = 1; k <= 8; ++k) {
    family.emplace_back([k, length](double x) {
      return std::sin(k * std::numbers::pi * x / length);
    });
  }
  family.emplace_back([length](double x) {
    auto f = [](double s) { return s > 0.0 ? std::exp(-1.0 / s) : 0.0; };
    const double s = (0.25 * length - std::abs(x - 0.5 * length)) / (0.125 * length);
    if (s >= 1.0) return 1.0;
    if (s <= 0.0) return 0.0;
    return f(s) / (f(s) + f(1.0 - s));
  });
  return family;
}

// ---------------------------------------------------------------------------

namespace {

bool non_vacuum(double rho, double floor) { return rho > 0.0 && rho >= floor; }

Side record_side(RecordKind kind) {
  return kind == RecordKind::PreJump ? Side::Left : Side::Right;
}

}  // namespace

double relative_energy(const State& state, std::span<const double> w_now,
                       const PressureLaw& law, const Grid1D& grid) {
  const double floor = vacuum_floor(total_mass(state, grid), grid.length);
  double e = 0.0;
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    const double r = state.rho[i];
    if (non_vacuum(r, floor)) {
      const double rel = state.m[i] / r - w_now[i];
      e += 0.5 * r * rel * rel;
    }
    e += law.potential(r);
  }
  return e * grid.dx();
}

std::vector<double> relative_energy_density(const State& state,
                                            const PressureLaw& law,
                                            const Grid1D& grid) {
  const double floor = vacuum_floor(total_mass(state, grid), grid.length);
  std::vector<double> density(state.rho.size());
  for (std::size_t i = 0; i < state.rho.size(); ++i) {
    const double r = state.rho[i];
    const double kinetic = non_vacuum(r, floor) ? 0.5 * state.q[i] * state.q[i] / r : 0.0;
    density[i] = kinetic + law.potential(r);
  }
  return density;
}

double relative_energy(const State& state, const PressureLaw& law,
                       const Grid1D& grid) {
  double e = 0.0;
  for (const double d : relative_energy_density(state, law, grid)) e += d;
  return e * grid.dx();
}

double dissipation(std::span<const double> u, const Viscosity& visc,
                   const Grid1D& grid) {
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const double lame = visc.lame_1d();
  double sum = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    const double g = (u[j] - u[j - 1]) / dx;
    sum += g * g * dx;
  }
  const double g0 = u[0] / (0.5 * dx);
  const double gn = u[n - 1] / (0.5 * dx);
  sum += (g0 * g0 + gn * gn) * 0.5 * dx;
  return lame * sum;
}

double work_rate(const State& state, const NoiseField& noise, Side side,
                 const PressureLaw& law, const Viscosity& visc,
                 const Grid1D& grid) {
  const std::size_t n = grid.size();
  const double dx = grid.dx();
  const auto nodes = noise.node_values(state.t, side);
  const auto u = velocity(state, grid);
  const auto s = stress_1d(visc, u, grid);

  double viscous = 0.0;
  for (std::size_t j = 1; j < n; ++j) {
    viscous += s[j] * (state.w[j] - state.w[j - 1]);
  }
  viscous += s[0] * state.w[0] + s[n] * (-state.w[n - 1]);

  double cell = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dw = (nodes[i + 1] - nodes[i]) / dx;
    const double dw2 = (nodes[i + 1] * nodes[i + 1] - nodes[i] * nodes[i]) / dx;
    const double r = state.rho[i];
    cell += -r * u[i] * u[i] * dw - law.pressure(r) * dw + 0.5 * r * u[i] * dw2;
  }
  return viscous + cell * dx;
}

namespace {

std::size_t record_at(const Trajectory& traj, double t) {
  if (t == 0.0) return 0;
  for (std::size_t k = 0; k < traj.output_times.size(); ++k) {
    if (traj.output_times[k] == t) return traj.output_index[k];
  }
  throw std::invalid_argument("diagnostics: time is not a recorded output time");
}

struct RecordTerms {
  double energy;
  double dissipation;
  double work;
};

RecordTerms terms_at(const Record& rec, const NoiseField& noise,
                     const PressureLaw& law, const Viscosity& visc,
                     const Grid1D& grid) {
  const auto u = velocity(rec.state, grid);
  return {relative_energy(rec.state, law, grid), dissipation(u, visc, grid),
          work_rate(rec.state, noise, record_side(rec.kind), law, visc, grid)};
}

}  // namespace

double energy_residual_between(const Trajectory& traj, const NoiseField& noise,
                               const PressureLaw& law, const Viscosity& visc,
                               const Grid1D& grid, std::size_t from,
                               std::size_t to) {
  if (!(from < to) || to >= traj.records.size()) {
    throw std::invalid_argument("energy_residual: need from < to within the trajectory");
  }
  RecordTerms prev = terms_at(traj.records[from], noise, law, visc, grid);
  const double e_start = prev.energy;
  double diss = 0.0;
  double work = 0.0;
  for (std::size_t k = from + 1; k <= to; ++k) {
    const RecordTerms cur = terms_at(traj.records[k], noise, law, visc, grid);
    const double dt = traj.records[k].state.t - traj.records[k - 1].state.t;
    diss += 0.5 * (prev.dissipation + cur.dissipation) * dt;
    work += 0.5 * (prev.work + cur.work) * dt;
    prev = cur;
  }
  return (prev.energy + diss) - (e_start + work);
}

double energy_residual(const Trajectory& traj, const NoiseField& noise,
                       const PressureLaw& law, const Viscosity& visc,
                       const Grid1D& grid, double s, double tau) {
  if (!(s < tau)) throw std::invalid_argument("energy_residual: need s < tau");
  return energy_residual_between(traj, noise, law, visc, grid, record_at(traj, s),
                                 record_at(traj, tau));
}

double energy_residual_tested(const Trajectory& traj, const NoiseField& noise,
                              const PressureLaw& law, const Viscosity& visc,
                              const Grid1D& grid, const TestFunction& psi) {
  if (psi.kind() != TestKind::Time) {
    throw std::invalid_argument("energy_residual_tested: need a time test function");
  }
  RecordTerms prev = terms_at(traj.records.front(), noise, law, visc, grid);
  double lhs = 0.0;
  double rhs = psi.psi(0.0) * prev.energy;
  for (std::size_t k = 1; k < traj.records.size(); ++k) {
    const RecordTerms cur = terms_at(traj.records[k], noise, law, visc, grid);
    const double t0 = traj.records[k - 1].state.t;
    const double t1 = traj.records[k].state.t;
    if (t1 > t0) {
      const double p0 = psi.psi(t0);
      const double p1 = psi.psi(t1);
      lhs += -0.5 * (prev.energy + cur.energy) * (p1 - p0);
      lhs += 0.5 * (prev.dissipation * p0 + cur.dissipation * p1) * (t1 - t0);
      rhs += 0.5 * (prev.work * p0 + cur.work * p1) * (t1 - t0);
    }
    prev = cur;
  }
  return lhs - rhs;
}

double renorm_residual(const Trajectory& traj, const TestFunction& b,
                       const TestFunction& phi, const Grid1D& grid, double tau) {
  if (b.kind() != TestKind::Renormalizer || phi.kind() != TestKind::Space) {
    throw std::invalid_argument("renorm_residual: wrong test function kinds");
  }
  const std::size_t n = grid.size();
  if (phi.values().size() != n) {
    throw std::invalid_argument("renorm_residual: phi does not match the grid");
  }
  const auto v = phi.values();
  const double dx = grid.dx();
  const std::size_t last = record_at(traj, tau);

  auto mass_side = [&](const State& s) {
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) acc += (s.rho[i] + b.b(s.rho[i])) * v[i];
    return acc * dx;
  };
  auto flux_rate = [&](const State& s) {
    const auto u = velocity(s, grid);
    double acc = 0.0;
    for (std::size_t j = 1; j < n; ++j) {
      const double left = s.m[j - 1] + b.b(s.rho[j - 1]) * u[j - 1];
      const double right = s.m[j] + b.b(s.rho[j]) * u[j];
      acc += 0.5 * (left + right) * (v[j] - v[j - 1]);
    }
    for (std::size_t i = 0; i < n; ++i) {
      const double u_left = i == 0 ? 0.0 : 0.5 * (u[i - 1] + u[i]);
      const double u_right = i + 1 == n ? 0.0 : 0.5 * (u[i] + u[i + 1]);
      const double r = s.rho[i];
      acc += (b.b(r) - b.b_prime(r) * r) * (u_right - u_left) * v[i];
    }
    return acc;
  };

  const double lhs = mass_side(traj.records[last].state) - mass_side(traj.records[0].state);
  double rhs = 0.0;
  double prev = flux_rate(traj.records[0].state);
  for (std::size_t k = 1; k <= last; ++k) {
    const double cur = flux_rate(traj.records[k].state);
    rhs += 0.5 * (prev + cur) * (traj.records[k].state.t - traj.records[k - 1].state.t);
    prev = cur;
  }
  return std::abs(lhs - rhs);
}

double weak_pairing(std::span<const double> field, const TestFunction& phi,
                    const Grid1D& grid) {
  const auto v = phi.values();
  if (v.size() != field.size()) {
    throw std::invalid_argument("weak_pairing: size mismatch");
  }
  double acc = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) acc += field[i] * v[i];
  return acc * grid.dx();
}

WeakDistance weak_distance(const Trajectory& a, const Grid1D& grid_a,
                           const Trajectory& b, const Grid1D& grid_b,
                           std::span<const SpatialTest> family) {
  if (a.output_times != b.output_times) {
    throw std::invalid_argument("weak_distance: output times differ");
  }
  std::vector<TestFunction> fa;
  std::vector<TestFunction> fb;
  for (const SpatialTest& f : family) {
    fa.push_back(TestFunction::space(f, grid_a));
    fb.push_back(TestFunction::space(f, grid_b));
  }
  WeakDistance d;
  for (std::size_t k = 0; k < a.output_times.size(); ++k) {
    const State& sa = a.at_output(k);
    const State& sb = b.at_output(k);
    for (std::size_t j = 0; j < family.size(); ++j) {
      d.rho = std::max(d.rho, std::abs(weak_pairing(sa.rho, fa[j], grid_a) -
                                       weak_pairing(sb.rho, fb[j], grid_b)));
      d.rel_momentum =
          std::max(d.rel_momentum, std::abs(weak_pairing(sa.q, fa[j], grid_a) -
                                            weak_pairing(sb.q, fb[j], grid_b)));
    }
  }
  return d;
}

WeakDistance weak_distance(const Trajectory& a, const Trajectory& b,
                           std::span<const SpatialTest> family,
                           const Grid1D& grid) {
  return weak_distance(a, grid, b, grid, family);
}

DiagnosticsReport diagnose(const Trajectory& traj, const NoiseField& noise,
                           const PressureLaw& law, const Viscosity& visc,
                           const Grid1D& grid, const DiagnosticsOptions& options) {
  DiagnosticsReport rep;
  rep.output_times = traj.output_times;
  rep.mass = traj.mass;

  for (const Record& r : traj.records) {
    const double defect = std::abs(total_mass(r.state, grid) - traj.mass) / traj.mass;
    rep.max_mass_defect = std::max(rep.max_mass_defect, defect);
  }
  rep.mass_ok = rep.max_mass_defect <= 1e-12;

  const auto family = default_test_family(grid.length);
  std::vector<TestFunction> tests;
  for (const SpatialTest& f : family) tests.push_back(TestFunction::space(f, grid));

  for (std::size_t k = 0; k < traj.output_times.size(); ++k) {
    const State& s = traj.at_output(k);
    rep.mass_series.push_back(total_mass(s, grid));
    rep.energy_series.push_back(relative_energy(s, law, grid));
    rep.dissipation_series.push_back(dissipation(velocity(s, grid), visc, grid));
    std::vector<double> row;
    for (const TestFunction& t : tests) row.push_back(weak_pairing(s.rho, t, grid));
    rep.weak_pairings.push_back(std::move(row));
  }

  double max_dt = 0.0;
  for (const double dt : traj.dt_history) max_dt = std::max(max_dt, dt);
  rep.energy_tol = options.residual_tol_coeff * (grid.dx() + max_dt);
  rep.energy_ok = true;
  double prev_t = 0.0;
  for (const double tau : traj.output_times) {
    const double from_zero = energy_residual(traj, noise, law, visc, grid, 0.0, tau);
    rep.energy_residuals.push_back({0.0, tau, from_zero});
    if (prev_t > 0.0) {
      rep.energy_residuals.push_back(
          {prev_t, tau, energy_residual(traj, noise, law, visc, grid, prev_t, tau)});
    }
    prev_t = tau;
  }
  for (const auto& c : rep.energy_residuals) {
    if (!(c.residual <= rep.energy_tol)) rep.energy_ok = false;
  }

  const double tau = traj.output_times.back();
  const auto ones = TestFunction::space(std::vector<double>(grid.size(), 1.0));
  const double mass_defect =
      renorm_residual(traj, TestFunction::zero_renormalizer(), ones, grid, tau) / traj.mass;
  double rho_max = 0.0;
  for (const Record& r : traj.records) {
    for (const double v : r.state.rho) rho_max = std::max(rho_max, v);
  }
  const double cap = 4.0 * rho_max;
  const auto bump = smooth_bump_renormalizer(0.5 * rho_max, 0.5 * rho_max, cap);
  const auto plateau = TestFunction::space(family.back(), grid);
  rep.renorm_residuals = {mass_defect, renorm_residual(traj, bump, plateau, grid, tau)};
  rep.renorm_ok = mass_defect <= 1e-12;

  rep.finite = true;
  auto check = [&rep](double v) {
    if (!std::isfinite(v)) rep.finite = false;
  };
  for (const double v : rep.mass_series) check(v);
  for (const double v : rep.energy_series) check(v);
  for (const double v : rep.dissipation_series) check(v);
  for (const auto& c : rep.energy_residuals) check(c.residual);
  for (const double v : rep.renorm_residuals) check(v);
  for (const auto& row : rep.weak_pairings) {
    for (const double v : row) check(v);
  }
  return rep;
}

}  // namespace barostoch
