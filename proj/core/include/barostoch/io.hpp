#pragma once

#include <filesystem>
#include <string>

#include "barostoch/diagnostics.hpp"
#include "barostoch/paths.hpp"

namespace barostoch {

/// %.17g; round-trips every finite double.
std::string format_double(double v);

/// Writes bytes verbatim (LF line endings on every platform).
void write_text(const std::filesystem::path& file, const std::string& body);
std::string read_text(const std::filesystem::path& file);

/// `t,value` over the continuous grid (value = continuous part), with a
/// final row at T if the grid stops short of it.
std::string path_csv(const CadlagPath& path);
/// `jump_time,jump_size`.
std::string jumps_csv(const CadlagPath& path);

/// Writes <stem>.csv and <stem>_jumps.csv into `dir`.
void write_path(const std::filesystem::path& dir, const std::string& stem,
                const CadlagPath& path);
/// Reads a `t,value` file and, if present, its `_jumps` sibling.
CadlagPath read_path(const std::filesystem::path& file);
CadlagPath parse_path(const std::string& values_csv, const std::string& jumps_csv);

/// `x,rho,m,u,w` at cell centers.
std::string snapshot_csv(const State& state, const Grid1D& grid);

/// `t,mass,energy,dissipation` at the output times.
std::string diagnostics_csv(const DiagnosticsReport& report);
/// `s,tau,residual`.
std::string energy_residuals_csv(const DiagnosticsReport& report);
/// JSON object with the scalar verdicts and series of the report.
std::string report_json(const DiagnosticsReport& report);

}  // namespace barostoch
