#pragma once

#include "tvbound/diagnostics.hpp"
#include "tvbound/forward.hpp"
#include "tvbound/solver.hpp"

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvbound {

enum class LengthUnit {
  meter,  ///< quadrature weight A / n in meters
  grid,   ///< all lengths divided by the cell size, weight 1
};

/// Synthetic uplift-inversion experiment: geometry, truth, noise and one
/// solver configuration per variant.
struct ExperimentConfig {
  UpliftGeometry geometry;  ///< meters; n_data is kept equal to n_model
  LengthUnit length_unit = LengthUnit::grid;
  std::vector<Block> truth;
  double lower = 0.0;
  double upper = 1.0;
  double sigma_frac = 0.15;
  std::uint64_t seed = 1;

  std::map<Variant, SolverConfig> solvers;  ///< one entry per known variant
  /// Tikhonov beta chosen by matching the bound-constrained misfit when unset.
  std::optional<double> tikhonov_beta;

  std::vector<Variant> variants;
  std::filesystem::path output_dir = "results";
  int snapshot_stride = 1;
  Variant snapshot_variant = Variant::bound_constrained;

  /// Fixed parameter set plus repository choices.
  static ExperimentConfig defaults();

  /// Operator geometry after applying length_unit.
  UpliftGeometry operator_geometry() const;
};

struct ConfigIssue {
  int line = 0;  ///< 0 when not tied to a line
  std::string field;
  std::string message;

  std::string to_string() const;
};

struct ConfigParse {
  ExperimentConfig config;
  std::vector<ConfigIssue> issues;

  bool ok() const { return issues.empty(); }
};

/// Parses the flat INI-style format and validates every field. All problems
/// are collected; parsing never stops at the first one.
ConfigParse parse_experiment_config(std::string_view text);

/// Reads and parses a config file. Throws Error if the file cannot be read.
ConfigParse load_experiment_config(const std::filesystem::path& path);

/// Every problem found in the file (empty when valid).
std::vector<ConfigIssue> validate_config(const std::filesystem::path& path);

/// Checks module-level invariants of an in-memory config.
std::vector<ConfigIssue> validate(const ExperimentConfig& cfg);

struct VariantOutcome {
  Variant variant = Variant::bound_constrained;
  SolveResult result;
  ModelVector reported;  ///< y for projected variants, m otherwise
  MetricsReport metrics;
  double tikhonov_beta = 0.0;
};

struct ExperimentOutcome {
  ModelVector truth;
  DataVector clean;
  DataVector noisy;
  Bounds bounds;
  std::vector<VariantOutcome> variants;

  const VariantOutcome* find(Variant v) const;
};

/// Builds geometry, truth and noisy data, runs every requested variant and,
/// when `write_files` is set, writes the CSV/text artifacts into
/// cfg.output_dir. Throws DomainError on an invalid config and
/// DivergenceError (after writing what exists) when a solve diverges.
ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool write_files = true);

}  // namespace tvbound
