#include "tvbound/csv.hpp"

#include "tvbound/error.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

namespace tvbound {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  return out;
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_series_csv(const std::filesystem::path& path, const std::string& coord_name, const Vector& coords,
                      const Vector& values) {
  if (coords.size() != values.size()) throw DimensionError("write_series_csv: column lengths differ");
  auto out = open_out(path);
  out << coord_name << ",value\n";
  for (Eigen::Index i = 0; i < values.size(); ++i) {
    out << format_double(coords[i]) << ',' << format_double(values[i]) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Series read_series_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line)) throw Error(path.string() + ": empty file");
  std::vector<double> xs;
  std::vector<double> vs;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw Error(path.string() + ":" + std::to_string(lineno) + ": expected 2 columns");
    try {
      xs.push_back(std::stod(line.substr(0, comma)));
      vs.push_back(std::stod(line.substr(comma + 1)));
    } catch (const std::exception&) {
      throw Error(path.string() + ":" + std::to_string(lineno) + ": not a number");
    }
  }
  Series s;
  s.coords = Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()));
  s.values = Eigen::Map<const Vector>(vs.data(), static_cast<Eigen::Index>(vs.size()));
  return s;
}

std::string diagnostics_csv_header() {
  return "k,rel_model_change,split_residual,proj_residual,data_misfit,tv_value,objective";
}

void write_diagnostics_csv(const std::filesystem::path& path, const std::vector<IterationRecord>& history) {
  auto out = open_out(path);
  out << diagnostics_csv_header() << '\n';
  for (const auto& r : history) {
    out << r.k << ',' << format_double(r.rel_model_change) << ',' << format_double(r.split_residual) << ','
        << format_double(r.proj_residual) << ',' << format_double(r.data_misfit) << ','
        << format_double(r.tv_value) << ',' << format_double(r.objective) << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

void write_snapshots_csv(const std::filesystem::path& path, const Vector& coords,
                         const std::vector<Snapshot>& snapshots) {
  auto out = open_out(path);
  out << "k,x,value\n";
  for (const auto& s : snapshots) {
    if (s.m.size() != coords.size()) throw DimensionError("snapshot length differs from coordinates");
    for (Eigen::Index i = 0; i < s.m.size(); ++i) {
      out << s.k << ',' << format_double(coords[i]) << ',' << format_double(s.m[i]) << '\n';
    }
  }
  if (!out) throw Error("write failed: " + path.string());
}

}  // namespace tvbound
