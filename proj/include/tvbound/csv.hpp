#pragma once

#include "tvbound/grid.hpp"
#include "tvbound/solver.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace tvbound {

/// Shortest round-trip-safe text for a double: %.17g.
std::string format_double(double v);

/// Two-column series "<coord_name>,value" with LF line endings.
void write_series_csv(const std::filesystem::path& path, const std::string& coord_name, const Vector& coords,
                      const Vector& values);

struct Series {
  Vector coords;
  Vector values;
};
/// Reads what write_series_csv wrote. Throws Error on malformed input.
Series read_series_csv(const std::filesystem::path& path);

/// Columns k,rel_model_change,split_residual,proj_residual,data_misfit,tv_value,objective.
std::string diagnostics_csv_header();
void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history);

/// Long format: k,x,value, one row per (snapshot, cell).
void write_snapshots_csv(const std::filesystem::path& path, const Vector& coords,
                         const std::vector<Snapshot>& snapshots);

}  // namespace tvbound
