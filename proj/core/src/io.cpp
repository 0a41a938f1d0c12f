#include "barostoch/io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace barostoch {

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_text(const std::filesystem::path& file, const std::string& body) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + file.string());
  out << body;
}

std::string read_text(const std::filesystem::path& file) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + file.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string path_csv(const CadlagPath& path) {
  std::string out = "t,value\n";
  const auto t = path.grid_times();
  const auto v = path.continuous_values();
  for (std::size_t k = 0; k < t.size(); ++k) {
    out += format_double(t[k]) + "," + format_double(v[k]) + "\n";
  }
  if (t.back() < path.horizon()) {
    out += format_double(path.horizon()) + "," + format_double(v.back()) + "\n";
  }
  return out;
}

std::string jumps_csv(const CadlagPath& path) {
  std::string out = "jump_time,jump_size\n";
  for (const Jump& j : path.jumps()) {
    out += format_double(j.time) + "," + format_double(j.size) + "\n";
  }
  return out;
}

void write_path(const std::filesystem::path& dir, const std::string& stem,
                const CadlagPath& path) {
  write_text(dir / (stem + ".csv"), path_csv(path));
  write_text(dir / (stem + "_jumps.csv"), jumps_csv(path));
}

namespace {

std::vector<std::pair<double, double>> parse_pairs(const std::string& csv,
                                                   const std::string& header) {
  std::istringstream in(csv);
  std::string line;
  if (!std::getline(in, line) || line != header) {
    throw std::invalid_argument("expected CSV header '" + header + "'");
  }
  std::vector<std::pair<double, double>> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    try {
      if (comma == std::string::npos) throw std::invalid_argument("");
      const double a = std::stod(line.substr(0, comma));
      const double b = std::stod(line.substr(comma + 1));
      rows.emplace_back(a, b);
    } catch (const std::exception&) {
      throw std::invalid_argument("malformed CSV row " + std::to_string(lineno) + ": " + line);
    }
  }
  return rows;
}

}  // namespace

CadlagPath parse_path(const std::string& values_csv, const std::string& jumps) {
  std::vector<double> t;
  std::vector<double> v;
  for (const auto& [a, b] : parse_pairs(values_csv, "t,value")) {
    t.push_back(a);
    v.push_back(b);
  }
  std::vector<Jump> js;
  if (!jumps.empty()) {
    for (const auto& [a, b] : parse_pairs(jumps, "jump_time,jump_size")) js.push_back({a, b});
  }
  if (t.empty()) throw std::invalid_argument("path CSV has no rows");
  double horizon = t.back();
  if (!js.empty() && js.back().time > horizon) horizon = js.back().time;
  return CadlagPath(horizon, std::move(t), std::move(v), std::move(js));
}

CadlagPath read_path(const std::filesystem::path& file) {
  const std::string values = read_text(file);
  std::filesystem::path sibling = file;
  sibling.replace_filename(file.stem().string() + "_jumps" + file.extension().string());
  std::string jumps;
  if (std::filesystem::exists(sibling)) jumps = read_text(sibling);
  return parse_path(values, jumps);
}

std::string snapshot_csv(const State& state, const Grid1D& grid) {
  const auto u = velocity(state, grid);
  std::string out = "x,rho,m,u,w\n";
  for (int i = 0; i < grid.n_cells; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out += format_double(grid.center(i)) + "," + format_double(state.rho[k]) + "," +
           format_double(state.m[k]) + "," + format_double(u[k]) + "," +
           format_double(state.w[k]) + "\n";
  }
  return out;
}

std::string diagnostics_csv(const DiagnosticsReport& r) {
  std::string out = "t,mass,energy,dissipation\n";
  for (std::size_t k = 0; k < r.output_times.size(); ++k) {
    out += format_double(r.output_times[k]) + "," + format_double(r.mass_series[k]) + "," +
           format_double(r.energy_series[k]) + "," + format_double(r.dissipation_series[k]) +
           "\n";
  }
  return out;
}

std::string energy_residuals_csv(const DiagnosticsReport& r) {
  std::string out = "s,tau,residual\n";
  for (const auto& c : r.energy_residuals) {
    out += format_double(c.s) + "," + format_double(c.tau) + "," + format_double(c.residual) +
           "\n";
  }
  return out;
}

std::string report_json(const DiagnosticsReport& r) {
  nlohmann::ordered_json j;
  j["mass"] = r.mass;
  j["max_mass_defect"] = r.max_mass_defect;
  j["energy_tol"] = r.energy_tol;
  double worst = r.energy_residuals.empty() ? 0.0 : r.energy_residuals.front().residual;
  for (const auto& c : r.energy_residuals) worst = std::max(worst, c.residual);
  j["max_energy_residual"] = worst;
  j["renorm_residuals"] = r.renorm_residuals;
  j["mass_ok"] = r.mass_ok;
  j["energy_ok"] = r.energy_ok;
  j["renorm_ok"] = r.renorm_ok;
  j["finite"] = r.finite;
  j["all_ok"] = r.all_ok();
  return j.dump(2) + "\n";
}

}  // namespace barostoch
