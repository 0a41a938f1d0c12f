#include "barostoch/noise.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <limits>
#include <numbers>
#include <random>
#include <string>

#include "barostoch/rng.hpp"

namespace barostoch {

LevyMeasureDiscrete::LevyMeasureDiscrete(std::vector<LevyAtom> atoms)
    : atoms_(std::move(atoms)) {
  for (const LevyAtom& a : atoms_) {
    if (a.size == 0.0 || !std::isfinite(a.size)) {
      throw std::invalid_argument("LevyMeasureDiscrete: atom at 0 or non-finite");
    }
    if (!(a.mass > 0.0) || !std::isfinite(a.mass)) {
      throw std::invalid_argument("LevyMeasureDiscrete: masses must be positive");
    }
    total_mass_ += a.mass;
  }
}

double LevyMeasureDiscrete::first_moment() const noexcept {
  double s = 0.0;
  for (const LevyAtom& a : atoms_) s += a.size * a.mass;
  return s;
}

double LevyMeasureDiscrete::second_moment() const noexcept {
  double s = 0.0;
  for (const LevyAtom& a : atoms_) s += a.size * a.size * a.mass;
  return s;
}

void LevySpec::validate() const {
  if (!std::isfinite(drift)) {
    throw std::invalid_argument("LevySpec: drift must be finite");
  }
  if (!(brownian_scale >= 0.0) || !std::isfinite(brownian_scale)) {
    throw std::invalid_argument("LevySpec: brownian_scale must be >= 0");
  }
  if (truncation_radii.size() != jump_layers.size()) {
    throw std::invalid_argument(
        "LevySpec: need exactly one truncation radius per jump layer");
  }
  for (std::size_t i = 0; i < truncation_radii.size(); ++i) {
    if (!(truncation_radii[i] > 0.0)) {
      throw std::invalid_argument("LevySpec: truncation radii must be positive");
    }
    if (i > 0 && !(truncation_radii[i] < truncation_radii[i - 1])) {
      throw std::invalid_argument(
          "LevySpec: overlapping radius bands (radii must strictly decrease)");
    }
  }
  for (std::size_t i = 0; i < jump_layers.size(); ++i) {
    const double lo = truncation_radii[i];
    const double hi = i == 0 ? std::numeric_limits<double>::infinity()
                             : truncation_radii[i - 1];
    if (i > 0 && !jump_layers[i].compensated) {
      throw std::invalid_argument("LevySpec: layer " + std::to_string(i) +
                                  " must be compensated (only the outer "
                                  "layer may be uncompensated)");
    }
    for (const LevyAtom& a : jump_layers[i].measure.atoms()) {
      const double r = std::abs(a.size);
      if (r < lo || r >= hi) {
        throw std::invalid_argument("LevySpec: atom " + std::to_string(a.size) +
                                    " outside the band of layer " +
                                    std::to_string(i));
      }
    }
  }
}

CadlagPath sample_brownian(double sigma, double drift,
                           std::span<const double> grid_times,
                           std::uint64_t seed, double horizon) {
  if (!(sigma >= 0.0)) {
    throw std::invalid_argument("sample_brownian: sigma must be >= 0");
  }
  if (grid_times.empty() || grid_times.front() != 0.0) {
    throw std::invalid_argument("sample_brownian: grid_times must start at 0");
  }
  for (std::size_t k = 1; k < grid_times.size(); ++k) {
    if (!(grid_times[k] > grid_times[k - 1])) {
      throw std::invalid_argument(
          "sample_brownian: grid_times must be strictly increasing");
    }
  }
  const double T = horizon > 0.0 ? horizon : grid_times.back();
  if (!(T > 0.0)) {
    throw std::invalid_argument("sample_brownian: horizon must be positive");
  }

  CounterStream stream(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::vector<double> values(grid_times.size(), 0.0);
  double w = 0.0;
  for (std::size_t k = 1; k < grid_times.size(); ++k) {
    const double dt = grid_times[k] - grid_times[k - 1];
    if (sigma > 0.0) w += sigma * std::sqrt(dt) * normal(stream);
    values[k] = drift * grid_times[k] + w;
  }
  return CadlagPath(T, std::vector<double>(grid_times.begin(), grid_times.end()),
                    std::move(values), {});
}

CadlagPath sample_compound_poisson(const LevyMeasureDiscrete& nu,
                                   double horizon, std::uint64_t seed) {
  if (!(horizon > 0.0)) {
    throw std::invalid_argument("sample_compound_poisson: T must be positive");
  }
  const double rate = nu.total_mass();
  std::vector<Jump> jumps;
  if (rate > 0.0) {
    CounterStream stream(seed);
    std::exponential_distribution<double> wait(rate);
    std::vector<double> weights;
    for (const LevyAtom& a : nu.atoms()) weights.push_back(a.mass);
    std::discrete_distribution<std::size_t> pick(weights.begin(), weights.end());
    double t = 0.0;
    while (true) {
      t += wait(stream);
      if (t > horizon) break;
      const double size = nu.atoms()[pick(stream)].size;
      if (!jumps.empty() && jumps.back().time == t) {
        jumps.back().size += size;
      } else {
        jumps.push_back({t, size});
      }
    }
  }
  return CadlagPath(horizon, {0.0}, {0.0}, std::move(jumps));
}

CadlagPath compensate(const CadlagPath& path, const LevyMeasureDiscrete& nu) {
  const double mean_rate = nu.first_moment();
  if (mean_rate == 0.0) return path;
  std::vector<double> grid(path.grid_times().begin(), path.grid_times().end());
  if (grid.back() < path.horizon()) grid.push_back(path.horizon());
  std::vector<double> values(grid.size());
  for (std::size_t k = 0; k < grid.size(); ++k) {
    values[k] = path.continuous_part(grid[k]) - grid[k] * mean_rate;
  }
  return CadlagPath(path.horizon(), std::move(grid), std::move(values),
                    std::vector<Jump>(path.jumps().begin(), path.jumps().end()));
}

CadlagPath sample_levy(const LevySpec& spec, double horizon,
                       std::span<const double> grid_times, std::uint64_t seed) {
  spec.validate();
  CadlagPath total = sample_brownian(spec.brownian_scale, spec.drift, grid_times,
                                     derive_seed(seed, 0), horizon);
  for (std::size_t i = 0; i < spec.jump_layers.size(); ++i) {
    const JumpLayer& layer = spec.jump_layers[i];
    CadlagPath part =
        sample_compound_poisson(layer.measure, horizon, derive_seed(seed, 1 + i));
    if (layer.compensated) part = compensate(part, layer.measure);
    total = add_paths(total, part);
  }
  return total;
}

// ---------------------------------------------------------------------------

SpatialMode::SpatialMode(std::vector<double> node_values, double domain_length)
    : values_(std::move(node_values)), length_(domain_length) {
  if (values_.size() < 2) {
    throw std::invalid_argument("SpatialMode: need at least one cell");
  }
  if (!(length_ > 0.0)) {
    throw std::invalid_argument("SpatialMode: domain length must be positive");
  }
  if (values_.front() != 0.0 || values_.back() != 0.0) {
    throw std::invalid_argument("SpatialMode: boundary values must be zero");
  }
  const double h = dx();
  for (std::size_t j = 0; j < values_.size(); ++j) {
    sup_norm_ = std::max(sup_norm_, std::abs(values_[j]));
    if (j + 1 < values_.size()) {
      lipschitz_ = std::max(lipschitz_, std::abs(values_[j + 1] - values_[j]) / h);
    }
  }
}

SpatialMode SpatialMode::sine(int k, int n_cells, double domain_length,
                              double decay) {
  if (k < 1 || n_cells < 1) {
    throw std::invalid_argument("SpatialMode::sine: need k >= 1, n_cells >= 1");
  }
  const double amp = std::pow(static_cast<double>(k), -decay);
  std::vector<double> v(static_cast<std::size_t>(n_cells) + 1, 0.0);
  for (int j = 1; j < n_cells; ++j) {
    v[static_cast<std::size_t>(j)] =
        amp * std::sin(k * std::numbers::pi * j / static_cast<double>(n_cells));
  }
  return SpatialMode(std::move(v), domain_length);
}

std::vector<SpatialMode> default_modes(int count, int n_cells,
                                       double domain_length, double decay) {
  std::vector<SpatialMode> modes;
  for (int k = 1; k <= count; ++k) {
    modes.push_back(SpatialMode::sine(k, n_cells, domain_length, decay));
  }
  return modes;
}

NoiseField::NoiseField(std::vector<SpatialMode> modes,
                       std::vector<CadlagPath> paths)
    : modes_(std::move(modes)), paths_(std::move(paths)) {
  if (modes_.empty() || modes_.size() != paths_.size()) {
    throw std::invalid_argument(
        "NoiseField: need equal, non-zero numbers of modes and paths");
  }
  n_cells_ = modes_.front().n_cells();
  length_ = modes_.front().domain_length();
  horizon_ = paths_.front().horizon();
  for (const SpatialMode& m : modes_) {
    if (m.n_cells() != n_cells_ || m.domain_length() != length_) {
      throw std::invalid_argument("NoiseField: modes live on different grids");
    }
  }
  for (const CadlagPath& p : paths_) {
    if (p.horizon() != horizon_) {
      throw std::invalid_argument("NoiseField: paths must share the horizon");
    }
  }

  std::vector<double> times;
  std::vector<double> probes{0.0, horizon_};
  for (const CadlagPath& p : paths_) {
    for (const Jump& j : p.jumps()) times.push_back(j.time);
    probes.insert(probes.end(), p.grid_times().begin(), p.grid_times().end());
  }
  std::sort(times.begin(), times.end());
  for (const double t : times) {
    if (jump_times_.empty() || t - jump_times_.back() > kJumpMergeTol) {
      jump_times_.push_back(t);
    }
  }
  probes.insert(probes.end(), times.begin(), times.end());
  std::sort(probes.begin(), probes.end());
  probes.erase(std::unique(probes.begin(), probes.end()), probes.end());

  // Sum of |L_k| is convex between breakpoints, so its sup sits on one of
  // them (right value or left limit).
  for (const double t : probes) {
    double right = 0.0;
    double left = 0.0;
    for (std::size_t k = 0; k < modes_.size(); ++k) {
      const double weight = modes_[k].sup_norm() + modes_[k].lipschitz_bound();
      right += std::abs(paths_[k].evaluate(t)) * weight;
      left += std::abs(paths_[k].left_limit(t)) * weight;
    }
    forcing_bound_ = std::max({forcing_bound_, right, left});
  }
}

NoiseField NoiseField::zero(int n_cells, double domain_length, double horizon) {
  std::vector<SpatialMode> modes{SpatialMode::sine(1, n_cells, domain_length)};
  std::vector<CadlagPath> paths{CadlagPath::zero(horizon)};
  return NoiseField(std::move(modes), std::move(paths));
}

std::vector<double> NoiseField::nodes_from_coefficients(
    std::span<const double> c) const {
  std::vector<double> nodes(n_cells_ + 1, 0.0);
  for (std::size_t k = 0; k < modes_.size(); ++k) {
    if (c[k] == 0.0) continue;
    const auto phi = modes_[k].values();
    for (std::size_t j = 0; j < nodes.size(); ++j) nodes[j] += c[k] * phi[j];
  }
  return nodes;
}

std::vector<double> NoiseField::cells_from_nodes(
    const std::vector<double>& nodes) const {
  std::vector<double> cells(n_cells_);
  for (std::size_t i = 0; i < n_cells_; ++i) {
    cells[i] = 0.5 * (nodes[i] + nodes[i + 1]);
  }
  return cells;
}

std::vector<double> NoiseField::node_values(double t, Side side) const {
  std::vector<double> c(paths_.size());
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    c[k] = side == Side::Right ? paths_[k].evaluate(t) : paths_[k].left_limit(t);
  }
  return nodes_from_coefficients(c);
}

std::vector<double> NoiseField::cell_values(double t, Side side) const {
  return cells_from_nodes(node_values(t, side));
}

std::vector<double> NoiseField::cell_gradients(double t, Side side) const {
  const auto nodes = node_values(t, side);
  const double h = length_ / static_cast<double>(n_cells_);
  std::vector<double> g(n_cells_);
  for (std::size_t i = 0; i < n_cells_; ++i) g[i] = (nodes[i + 1] - nodes[i]) / h;
  return g;
}

std::vector<double> NoiseField::continuous_cell_values(double t) const {
  std::vector<double> c(paths_.size());
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    c[k] = paths_[k].continuous_part(t);
  }
  return cells_from_nodes(nodes_from_coefficients(c));
}

std::vector<double> NoiseField::jump_cell_increment(double t) const {
  std::vector<double> c(paths_.size());
  for (std::size_t k = 0; k < paths_.size(); ++k) {
    c[k] = paths_[k].jumps_through(t + kJumpMergeTol) -
           paths_[k].jumps_before(t - kJumpMergeTol);
  }
  return cells_from_nodes(nodes_from_coefficients(c));
}

double NoiseField::next_jump_after(double t) const {
  const auto it = std::upper_bound(jump_times_.begin(), jump_times_.end(), t);
  return it == jump_times_.end() ? std::numeric_limits<double>::infinity() : *it;
}

std::uint64_t NoiseField::digest() const {
  std::uint64_t h = mix64(modes_.size());
  auto feed = [&h](double v) {
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    h = mix64(h ^ bits);
  };
  for (const SpatialMode& mode : modes_) {
    for (const double v : mode.values()) feed(v);
  }
  for (const CadlagPath& p : paths_) {
    feed(p.horizon());
    for (const double t : p.grid_times()) feed(t);
    for (const double v : p.continuous_values()) feed(v);
    for (const Jump& j : p.jumps()) {
      feed(j.time);
      feed(j.size);
    }
  }
  return h;
}

NoiseField build_noise_field(std::vector<SpatialMode> modes,
                             std::vector<CadlagPath> paths) {
  return NoiseField(std::move(modes), std::move(paths));
}

}  // namespace barostoch
