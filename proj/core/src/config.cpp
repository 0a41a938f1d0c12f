#include "barostoch/config.hpp"

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <numbers>
#include <set>
#include <sstream>

#include "barostoch/diagnostics.hpp"
#include "barostoch/rng.hpp"

namespace barostoch {

namespace {

std::string join_lines(const std::vector<std::string>& problems) {
  std::string out = "invalid configuration:";
  for (const auto& p : problems) out += "\n  " + p;
  return out;
}

std::string trim(std::string s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

bool parse_double(const std::string& text, double& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

template <typename Int>
bool parse_int(const std::string& text, Int& out) {
  const std::string s = trim(text);
  if (s.empty()) return false;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), out);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

bool parse_bool(const std::string& text, bool& out) {
  const std::string s = trim(text);
  if (s == "true") {
    out = true;
    return true;
  }
  if (s == "false") {
    out = false;
    return true;
  }
  return false;
}

bool parse_list(const std::string& text, std::vector<double>& out) {
  out.clear();
  const std::string s = trim(text);
  if (s.empty()) return true;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    double v = 0.0;
    if (!parse_double(item, v)) return false;
    out.push_back(v);
  }
  return true;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i > 0) out += ",";
    out += fmt(v[i]);
  }
  return out;
}

using Setter = std::function<bool(RunConfig&, const std::string&)>;

Setter real(double RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) { return parse_double(v, c.*field); };
}
Setter integer(int RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) { return parse_int(v, c.*field); };
}
Setter flag(bool RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) { return parse_bool(v, c.*field); };
}
Setter list(std::vector<double> RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) { return parse_list(v, c.*field); };
}
Setter text(std::string RunConfig::*field) {
  return [field](RunConfig& c, const std::string& v) {
    c.*field = trim(v);
    return !(c.*field).empty();
  };
}

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"grid.n_cells", integer(&RunConfig::n_cells)},
      {"grid.length", real(&RunConfig::length)},
      {"pressure.gamma", real(&RunConfig::gamma)},
      {"pressure.coeff", real(&RunConfig::pressure_coeff)},
      {"viscosity.mu_shear", real(&RunConfig::mu_shear)},
      {"viscosity.eta_bulk", real(&RunConfig::eta_bulk)},
      {"noise.modes", integer(&RunConfig::modes)},
      {"noise.decay", real(&RunConfig::decay)},
      {"noise.time_steps", integer(&RunConfig::time_steps)},
      {"noise.drift", real(&RunConfig::drift)},
      {"noise.brownian_scale", real(&RunConfig::brownian_scale)},
      {"initial.profile", text(&RunConfig::profile)},
      {"initial.rho", real(&RunConfig::rho)},
      {"initial.amplitude", real(&RunConfig::amplitude)},
      {"initial.center", real(&RunConfig::center)},
      {"initial.width", real(&RunConfig::width)},
      {"initial.u_amp", real(&RunConfig::u_amp)},
      {"initial.rho_left", real(&RunConfig::rho_left)},
      {"initial.rho_right", real(&RunConfig::rho_right)},
      {"initial.split", real(&RunConfig::split)},
      {"run.T", real(&RunConfig::horizon)},
      {"run.cfl", real(&RunConfig::cfl)},
      {"run.output_times", list(&RunConfig::output_times)},
      {"run.seed",
       [](RunConfig& c, const std::string& v) { return parse_int(v, c.seed); }},
      {"run.ensemble", integer(&RunConfig::ensemble)},
      {"run.threads", integer(&RunConfig::threads)},
      {"run.record_steps", flag(&RunConfig::record_steps)},
      {"run.residual_tol_coeff", real(&RunConfig::residual_tol_coeff)},
      {"stability.widths", list(&RunConfig::widths)},
      {"stability.noise", text(&RunConfig::stability_noise)},
      {"stability.jump_time", real(&RunConfig::jump_time)},
      {"stability.jump_size", real(&RunConfig::jump_size)},
      {"stability.baseline_cells", integer(&RunConfig::baseline_cells)},
  };
  return table;
}

const std::vector<std::string>& required_keys() {
  static const std::vector<std::string> keys = {
      "grid.n_cells", "grid.length", "pressure.gamma", "pressure.coeff",
      "viscosity.mu_shear", "initial.profile", "run.T"};
  return keys;
}

// Layer keys: noise.layerN_sizes, _masses, _compensated, _radius.
bool set_layer_key(RunConfig& c, const std::string& key, const std::string& value,
                   bool& known) {
  known = false;
  if (key.rfind("layer", 0) != 0) return false;
  const auto us = key.find('_');
  if (us == std::string::npos || us == 5) return false;
  std::size_t index = 0;
  if (!parse_int(key.substr(5, us - 5), index) || index > 64) return false;
  const std::string field = key.substr(us + 1);
  if (field != "sizes" && field != "masses" && field != "compensated" && field != "radius") {
    return false;
  }
  known = true;
  if (c.layers.size() <= index) c.layers.resize(index + 1);
  LayerConfig& layer = c.layers[index];
  if (field == "sizes") return parse_list(value, layer.sizes);
  if (field == "masses") return parse_list(value, layer.masses);
  if (field == "compensated") return parse_bool(value, layer.compensated);
  return parse_double(value, layer.radius);
}

bool fraction_open(double v) { return v > 0.0 && v < 1.0; }

}  // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : std::runtime_error(join_lines(problems)), problems_(std::move(problems)) {}

LevySpec RunConfig::levy_spec() const {
  LevySpec spec;
  spec.drift = drift;
  spec.brownian_scale = brownian_scale;
  for (const LayerConfig& l : layers) {
    std::vector<LevyAtom> atoms;
    for (std::size_t i = 0; i < l.sizes.size() && i < l.masses.size(); ++i) {
      atoms.push_back({l.sizes[i], l.masses[i]});
    }
    spec.jump_layers.push_back({LevyMeasureDiscrete(std::move(atoms)), l.compensated});
    spec.truncation_radii.push_back(l.radius);
  }
  return spec;
}

PressureLaw RunConfig::pressure_law() const {
  return PressureLaw(gamma, pressure_coeff, allow_low_gamma);
}

Viscosity RunConfig::viscosity() const { return Viscosity(mu_shear, eta_bulk); }

Grid1D RunConfig::grid() const { return Grid1D(n_cells, length); }

std::vector<double> RunConfig::outputs() const {
  if (output_times.empty()) return {horizon};
  return output_times;
}

std::vector<std::string> validate(const RunConfig& c) {
  std::vector<std::string> p;
  auto need = [&p](bool ok, const std::string& msg) {
    if (!ok) p.push_back(msg);
  };

  need(c.n_cells >= 4, "grid.n_cells: must be >= 4");
  need(c.length > 0.0 && std::isfinite(c.length), "grid.length: must be positive");

  if (c.allow_low_gamma) {
    need(c.gamma > 1.0, "pressure.gamma: must be > 1");
  } else {
    need(c.gamma > 1.5,
         "pressure.gamma: must be > 3/2 (pass --allow-low-gamma to accept gamma > 1)");
  }
  need(c.pressure_coeff > 0.0, "pressure.coeff: must be positive");
  need(c.mu_shear > 0.0, "viscosity.mu_shear: must be positive");
  need(c.eta_bulk >= 0.0, "viscosity.eta_bulk: must be >= 0");

  need(c.modes >= 1, "noise.modes: must be >= 1");
  need(c.decay >= 0.0, "noise.decay: must be >= 0");
  need(c.time_steps >= 1, "noise.time_steps: must be >= 1");
  need(std::isfinite(c.drift), "noise.drift: must be finite");
  need(c.brownian_scale >= 0.0, "noise.brownian_scale: must be >= 0");
  bool layers_ok = true;
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    const LayerConfig& l = c.layers[i];
    const std::string k = "noise.layer" + std::to_string(i);
    auto layer_need = [&](bool ok, const std::string& msg) {
      if (!ok) layers_ok = false;
      need(ok, msg);
    };
    layer_need(!l.sizes.empty(), k + "_sizes: must list at least one jump size");
    layer_need(l.sizes.size() == l.masses.size(),
               k + "_masses: must have one entry per jump size");
    for (const double z : l.sizes) layer_need(z != 0.0, k + "_sizes: sizes must be nonzero");
    for (const double m : l.masses) layer_need(m > 0.0, k + "_masses: masses must be positive");
    layer_need(l.radius > 0.0, k + "_radius: must be positive");
  }
  if (layers_ok) {
    try {
      c.levy_spec().validate();
    } catch (const std::invalid_argument& e) {
      p.push_back(std::string("noise.layers: ") + e.what());
    }
  }

  const bool known_profile =
      c.profile == "uniform" || c.profile == "gaussian-bump" || c.profile == "riemann";
  need(known_profile, "initial.profile: must be uniform, gaussian-bump or riemann");
  need(c.rho >= 0.0, "initial.rho: must be >= 0");
  need(c.amplitude >= 0.0, "initial.amplitude: must be >= 0");
  need(c.center >= 0.0 && c.center <= 1.0, "initial.center: must lie in [0, 1]");
  need(c.width > 0.0, "initial.width: must be positive");
  need(std::isfinite(c.u_amp), "initial.u_amp: must be finite");
  need(c.rho_left >= 0.0, "initial.rho_left: must be >= 0");
  need(c.rho_right >= 0.0, "initial.rho_right: must be >= 0");
  need(fraction_open(c.split), "initial.split: must lie in (0, 1)");
  if (known_profile) {
    double peak = c.rho;
    if (c.profile == "gaussian-bump") peak = c.rho + c.amplitude;
    if (c.profile == "riemann") peak = std::max(c.rho_left, c.rho_right);
    need(peak > 0.0, "initial: total mass M must be positive");
  }

  need(c.horizon > 0.0 && std::isfinite(c.horizon), "run.T: must be positive");
  need(c.cfl > 0.0 && c.cfl <= 1.0, "run.cfl: must lie in (0, 1]");
  for (std::size_t i = 0; i < c.output_times.size(); ++i) {
    const double t = c.output_times[i];
    if (!(t > 0.0 && t <= c.horizon)) {
      p.push_back("run.output_times: every time must lie in (0, T]");
      break;
    }
    if (i > 0 && !(t > c.output_times[i - 1])) {
      p.push_back("run.output_times: must be strictly increasing");
      break;
    }
  }
  need(c.ensemble >= 1, "run.ensemble: must be >= 1");
  need(c.threads >= 1, "run.threads: must be >= 1");
  need(c.residual_tol_coeff > 0.0, "run.residual_tol_coeff: must be positive");

  for (std::size_t i = 0; i < c.widths.size(); ++i) {
    if (!(c.widths[i] > 0.0) || (i > 0 && !(c.widths[i] < c.widths[i - 1]))) {
      p.push_back("stability.widths: must be positive and strictly decreasing");
      break;
    }
  }
  need(c.stability_noise == "single-jump" || c.stability_noise == "sampled",
       "stability.noise: must be single-jump or sampled");
  // The single jump only matters when a stability sweep is configured.
  if (!c.widths.empty() && c.stability_noise == "single-jump") {
    need(c.jump_time > 0.0 && c.jump_time < c.horizon,
         "stability.jump_time: must lie in (0, T)");
  }
  need(std::isfinite(c.jump_size), "stability.jump_size: must be finite");
  need(c.baseline_cells == 0 || c.baseline_cells >= 4,
       "stability.baseline_cells: must be 0 or >= 4");
  return p;
}

RunConfig parse_config(std::istream& in, bool allow_low_gamma) {
  namespace pt = boost::property_tree;
  pt::ptree tree;
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError({std::string("syntax: ") + e.message() + " (line " +
                       std::to_string(e.line()) + ")"});
  }

  RunConfig c;
  c.allow_low_gamma = allow_low_gamma;
  std::vector<std::string> problems;
  std::set<std::string> seen;
  static const std::set<std::string> sections = {"grid",    "pressure", "viscosity", "noise",
                                                 "initial", "run",      "stability"};
  for (const auto& [section, body] : tree) {
    if (!sections.contains(section)) {
      problems.push_back(section + ": unknown section");
      continue;
    }
    for (const auto& [key, node] : body) {
      const std::string full = section + "." + key;
      const std::string value = node.get_value<std::string>();
      seen.insert(full);
      const auto it = setters().find(full);
      if (it != setters().end()) {
        if (!it->second(c, value)) {
          problems.push_back(full + ": cannot parse value '" + value + "'");
        }
        continue;
      }
      bool known = false;
      if (section == "noise") {
        const bool ok = set_layer_key(c, key, value, known);
        if (known && !ok) problems.push_back(full + ": cannot parse value '" + value + "'");
      }
      if (!known) problems.push_back(full + ": unknown key");
    }
  }
  for (const std::string& key : required_keys()) {
    if (!seen.contains(key)) problems.push_back(key + ": missing required key");
  }
  if (problems.empty()) {
    problems = validate(c);
  }
  if (!problems.empty()) throw ConfigError(std::move(problems));
  if (c.gamma <= 1.5 && allow_low_gamma) {
    std::fprintf(stderr, "warning: pressure.gamma = %g is below 3/2\n", c.gamma);
  }
  return c;
}

RunConfig parse_config_string(const std::string& text, bool allow_low_gamma) {
  std::istringstream in(text);
  return parse_config(in, allow_low_gamma);
}

RunConfig load_config(const std::string& path, bool allow_low_gamma) {
  std::ifstream in(path);
  if (!in) throw ConfigError({"--config: cannot open '" + path + "'"});
  return parse_config(in, allow_low_gamma);
}

std::string serialize(const RunConfig& c) {
  std::ostringstream o;
  auto b = [](bool v) { return v ? "true" : "false"; };
  o << "[grid]\n"
    << "n_cells = " << c.n_cells << "\n"
    << "length = " << fmt(c.length) << "\n\n"
    << "[pressure]\n"
    << "gamma = " << fmt(c.gamma) << "\n"
    << "coeff = " << fmt(c.pressure_coeff) << "\n\n"
    << "[viscosity]\n"
    << "mu_shear = " << fmt(c.mu_shear) << "\n"
    << "eta_bulk = " << fmt(c.eta_bulk) << "\n\n"
    << "[noise]\n"
    << "modes = " << c.modes << "\n"
    << "decay = " << fmt(c.decay) << "\n"
    << "time_steps = " << c.time_steps << "\n"
    << "drift = " << fmt(c.drift) << "\n"
    << "brownian_scale = " << fmt(c.brownian_scale) << "\n";
  for (std::size_t i = 0; i < c.layers.size(); ++i) {
    const std::string k = "layer" + std::to_string(i);
    const LayerConfig& l = c.layers[i];
    o << k << "_sizes = " << fmt_list(l.sizes) << "\n"
      << k << "_masses = " << fmt_list(l.masses) << "\n"
      << k << "_compensated = " << b(l.compensated) << "\n"
      << k << "_radius = " << fmt(l.radius) << "\n";
  }
  o << "\n[initial]\n"
    << "profile = " << c.profile << "\n"
    << "rho = " << fmt(c.rho) << "\n"
    << "amplitude = " << fmt(c.amplitude) << "\n"
    << "center = " << fmt(c.center) << "\n"
    << "width = " << fmt(c.width) << "\n"
    << "u_amp = " << fmt(c.u_amp) << "\n"
    << "rho_left = " << fmt(c.rho_left) << "\n"
    << "rho_right = " << fmt(c.rho_right) << "\n"
    << "split = " << fmt(c.split) << "\n\n"
    << "[run]\n"
    << "T = " << fmt(c.horizon) << "\n"
    << "cfl = " << fmt(c.cfl) << "\n"
    << "output_times = " << fmt_list(c.output_times) << "\n"
    << "seed = " << c.seed << "\n"
    << "ensemble = " << c.ensemble << "\n"
    << "threads = " << c.threads << "\n"
    << "record_steps = " << b(c.record_steps) << "\n"
    << "residual_tol_coeff = " << fmt(c.residual_tol_coeff) << "\n\n"
    << "[stability]\n"
    << "widths = " << fmt_list(c.widths) << "\n"
    << "noise = " << c.stability_noise << "\n"
    << "jump_time = " << fmt(c.jump_time) << "\n"
    << "jump_size = " << fmt(c.jump_size) << "\n"
    << "baseline_cells = " << c.baseline_cells << "\n";
  return o.str();
}

std::uint64_t config_digest(const RunConfig& config) {
  RunConfig c = config;
  c.seed = 0;
  // FNV-1a, finished with the splitmix mixer.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char ch : serialize(c)) {
    h ^= ch;
    h *= 0x100000001b3ULL;
  }
  return mix64(h);
}

std::string hex_digest(std::uint64_t digest) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

InitialData make_initial_data(const RunConfig& c) {
  const Grid1D grid = c.grid();
  const std::size_t n = grid.size();
  InitialData d;
  d.rho.assign(n, 0.0);
  d.m.assign(n, 0.0);
  for (int i = 0; i < grid.n_cells; ++i) {
    const double x = grid.center(i);
    const double xi = x / c.length;
    double r = c.rho;
    double u = c.u_amp * std::sin(std::numbers::pi * xi);
    if (c.profile == "gaussian-bump") {
      const double s = (xi - c.center) / c.width;
      r = c.rho + c.amplitude * std::exp(-0.5 * s * s);
    } else if (c.profile == "riemann") {
      r = xi < c.split ? c.rho_left : c.rho_right;
      u = 0.0;
    }
    d.rho[static_cast<std::size_t>(i)] = r;
    d.m[static_cast<std::size_t>(i)] = r > 0.0 ? r * u : 0.0;
  }
  const State s = make_initial_state(d.rho, d.m, grid);
  d.mass = total_mass(s, grid);
  d.energy = relative_energy(s, c.pressure_law(), grid);
  return d;
}

}  // namespace barostoch
