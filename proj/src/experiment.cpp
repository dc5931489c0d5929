#include "tvbound/experiment.hpp"

#include "tvbound/csv.hpp"
#include "tvbound/error.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <tuple>

namespace tvbound {

namespace {

constexpr Variant kAllVariants[] = {Variant::bound_constrained, Variant::unconstrained_tv,
                                    Variant::naive_projection, Variant::tikhonov};

struct Entry {
  std::string section;
  std::string key;
  std::string value;
  int line = 0;
};

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::optional<double> to_double(std::string_view s) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<long long> to_int(std::string_view s) {
  long long v = 0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || s.empty()) return std::nullopt;
  return v;
}

std::optional<bool> to_bool(std::string_view s) {
  if (s == "true" || s == "yes" || s == "on" || s == "1") return true;
  if (s == "false" || s == "no" || s == "off" || s == "0") return false;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::vector<ConfigIssue>& issues) : issues_(issues) {}

  void error(const Entry& e, const std::string& msg) {
    issues_.push_back({e.line, "[" + e.section + "] " + e.key, msg});
  }

  template <typename T, typename Conv>
  void assign(const Entry& e, T& dst, Conv conv, const char* expected) {
    if (auto v = conv(e.value)) {
      dst = static_cast<T>(*v);
    } else {
      error(e, std::string("expected ") + expected + ", got '" + e.value + "'");
    }
  }

  void real(const Entry& e, double& dst) { assign(e, dst, to_double, "a number"); }
  void integer(const Entry& e, int& dst) { assign(e, dst, to_int, "an integer"); }

 private:
  std::vector<ConfigIssue>& issues_;
};

// Applies one solver key. Returns false for keys that are not solver keys.
bool apply_solver_key(Parser& p, const Entry& e, SolverConfig& s) {
  const std::string& k = e.key;
  if (k == "alpha") {
    p.real(e, s.alpha);
  } else if (k == "lambda") {
    p.real(e, s.lambda);
  } else if (k == "delta") {
    p.real(e, s.delta);
  } else if (k == "n_inner") {
    p.integer(e, s.n_inner);
  } else if (k == "n_outer") {
    p.integer(e, s.n_outer);
  } else if (k == "cg_steps") {
    p.integer(e, s.cg_steps);
  } else if (k == "target_accuracy") {
    p.real(e, s.target_accuracy);
  } else if (k == "stop_on_target") {
    p.assign(e, s.stop_on_target, to_bool, "true or false");
  } else if (k == "tv_mode") {
    p.assign(e, s.tv_mode, parse_tv_mode, "anisotropic or isotropic");
  } else if (k == "projection_rule") {
    p.assign(e, s.projection_rule, parse_projection_rule, "shifted or literal");
  } else {
    return false;
  }
  return true;
}

SolverConfig base_solver() {
  SolverConfig s;
  s.alpha = 1.0;
  s.lambda = 2.0;
  s.delta = 2.0;
  s.n_inner = 2;
  s.n_outer = 1000;
  s.cg_steps = 10;
  s.target_accuracy = 1e-6;
  s.stop_on_target = false;
  return s;
}

// Marks the body of a rejected section; its keys are not reported again.
constexpr const char* kSkipSection = "\x01skip";

bool known_section(const std::string& s) {
  static const std::set<std::string> plain = {"geometry", "truth", "bounds", "noise", "solver", "output"};
  if (plain.count(s)) return true;
  return s.rfind("variant.", 0) == 0 && parse_variant(std::string_view(s).substr(8)).has_value();
}

std::string join_issues(const std::vector<ConfigIssue>& issues) {
  std::string msg = "invalid experiment config:";
  for (const auto& i : issues) msg += "\n  " + i.to_string();
  return msg;
}

Vector meter_coords(const UpliftGeometry& g) {
  Vector c(g.n_model);
  for (int j = 0; j < g.n_model; ++j) c[j] = g.model_coord(j);
  return c;
}

}  // namespace

std::string ConfigIssue::to_string() const {
  std::string out;
  if (line > 0) out += "line " + std::to_string(line) + ": ";
  out += field + ": " + message;
  return out;
}

ExperimentConfig ExperimentConfig::defaults() {
  ExperimentConfig cfg;
  cfg.geometry = UpliftGeometry{100.0, 2000.0, 200, 200};
  cfg.length_unit = LengthUnit::grid;
  cfg.truth = {{150.0, 400.0, 0.5},   {400.0, 600.0, 1.0},   {800.0, 1000.0, 0.7},
               {1100.0, 1250.0, 0.3}, {1250.0, 1500.0, 0.9}, {1650.0, 1800.0, 0.6}};
  cfg.lower = 0.0;
  cfg.upper = 1.0;
  cfg.sigma_frac = 0.15;
  cfg.seed = 1;
  for (Variant v : kAllVariants) {
    SolverConfig s = base_solver();
    s.variant = v;
    if (v == Variant::tikhonov) s.cg_steps = 1000;
    cfg.solvers.emplace(v, s);
  }
  cfg.variants.assign(std::begin(kAllVariants), std::end(kAllVariants));
  return cfg;
}

UpliftGeometry ExperimentConfig::operator_geometry() const {
  UpliftGeometry g = geometry;
  g.n_data = g.n_model;
  if (length_unit == LengthUnit::grid && g.n_model > 0) {
    const double cell = g.aperture / g.n_model;
    g.depth /= cell;
    g.aperture /= cell;
  }
  return g;
}

const VariantOutcome* ExperimentOutcome::find(Variant v) const {
  for (const auto& o : variants) {
    if (o.variant == v) return &o;
  }
  return nullptr;
}

ConfigParse parse_experiment_config(std::string_view text) {
  ConfigParse out{ExperimentConfig::defaults(), {}};
  ExperimentConfig& cfg = out.config;
  std::vector<ConfigIssue>& issues = out.issues;
  Parser p(issues);

  std::vector<Entry> entries;
  std::string section;
  int lineno = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++lineno;
    std::string_view line = raw;
    if (const auto hash = line.find_first_of("#;"); hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') {
        issues.push_back({lineno, "section", "unterminated section header"});
        continue;
      }
      section = std::string(trim(line.substr(1, line.size() - 2)));
      if (!known_section(section)) {
        issues.push_back({lineno, "[" + section + "]", section.rfind("variant.", 0) == 0 ? "unknown variant"
                                                                                        : "unknown section"});
        section = kSkipSection;
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      issues.push_back({lineno, "syntax", "expected 'key = value'"});
      continue;
    }
    if (section == kSkipSection) continue;
    if (section.empty()) {
      issues.push_back({lineno, std::string(trim(line.substr(0, eq))), "key outside of any section"});
      continue;
    }
    entries.push_back({section, std::string(trim(line.substr(0, eq))), std::string(trim(line.substr(eq + 1))), lineno});
  }

  // Lines on which solver fields were set, for pinning validation errors.
  std::map<std::string, int> shared_lines;
  std::map<Variant, std::map<std::string, int>> variant_lines;
  std::map<std::string, int> block_lines;
  std::map<std::string, int> plain_lines;
  bool truth_seen = false;

  // Shared solver keys first so [variant.*] sections override them
  // regardless of file order.
  for (const Entry& e : entries) {
    if (e.section != "solver") continue;
    bool known = true;
    for (auto& [v, s] : cfg.solvers) {
      if (v == Variant::tikhonov && e.key == "cg_steps") continue;
      known = apply_solver_key(p, e, s);
      if (!known) break;
    }
    if (!known) {
      p.error(e, "unknown key");
    } else {
      shared_lines[e.key] = e.line;
      // A bad value was reported once per variant; keep one.
      issues.erase(std::unique(issues.begin(), issues.end(),
                               [](const ConfigIssue& a, const ConfigIssue& b) {
                                 return a.line == b.line && a.field == b.field && a.message == b.message;
                               }),
                   issues.end());
    }
  }

  for (const Entry& e : entries) {
    const std::string& s = e.section;
    const std::string& k = e.key;
    if (s == "solver") continue;
    plain_lines["[" + s + "] " + k] = e.line;
    if (s == "geometry") {
      if (k == "depth") {
        p.real(e, cfg.geometry.depth);
      } else if (k == "aperture") {
        p.real(e, cfg.geometry.aperture);
      } else if (k == "n") {
        p.integer(e, cfg.geometry.n_model);
        cfg.geometry.n_data = cfg.geometry.n_model;
      } else if (k == "length_unit") {
        if (e.value == "grid") {
          cfg.length_unit = LengthUnit::grid;
        } else if (e.value == "meter") {
          cfg.length_unit = LengthUnit::meter;
        } else {
          p.error(e, "expected grid or meter, got '" + e.value + "'");
        }
      } else {
        p.error(e, "unknown key");
      }
    } else if (s == "truth") {
      if (k != "block") {
        p.error(e, "unknown key");
        continue;
      }
      if (!truth_seen) cfg.truth.clear();
      truth_seen = true;
      const auto parts = split(e.value, ',');
      std::optional<double> a, b, v;
      if (parts.size() == 3) {
        a = to_double(parts[0]);
        b = to_double(parts[1]);
        v = to_double(parts[2]);
      }
      if (!a || !b || !v) {
        p.error(e, "expected 'start, end, value', got '" + e.value + "'");
        continue;
      }
      cfg.truth.push_back({*a, *b, *v});
      // Range checks need the final geometry, so they run in validate().
      block_lines["block#" + std::to_string(cfg.truth.size() - 1)] = e.line;
    } else if (s == "bounds") {
      if (k == "lower") {
        p.real(e, cfg.lower);
      } else if (k == "upper") {
        p.real(e, cfg.upper);
      } else {
        p.error(e, "unknown key");
      }
    } else if (s == "noise") {
      if (k == "sigma_frac") {
        p.real(e, cfg.sigma_frac);
      } else if (k == "seed") {
        if (auto v = to_int(e.value); v && *v >= 0) {
          cfg.seed = static_cast<std::uint64_t>(*v);
        } else {
          p.error(e, "expected a non-negative integer, got '" + e.value + "'");
        }
      } else {
        p.error(e, "unknown key");
      }
    } else if (s.rfind("variant.", 0) == 0) {
      const auto v = parse_variant(std::string_view(s).substr(8));
      if (*v == Variant::tikhonov && k == "beta") {
        if (e.value == "match") {
          cfg.tikhonov_beta.reset();
        } else if (auto b = to_double(e.value)) {
          cfg.tikhonov_beta = *b;
          cfg.solvers[*v].tikhonov_beta = *b;
          variant_lines[*v]["tikhonov_beta"] = e.line;
        } else {
          p.error(e, "expected a number or 'match', got '" + e.value + "'");
        }
        continue;
      }
      if (!apply_solver_key(p, e, cfg.solvers[*v])) {
        p.error(e, "unknown key");
      } else {
        variant_lines[*v][k] = e.line;
      }
    } else if (s == "output") {
      if (k == "dir") {
        cfg.output_dir = e.value;
      } else if (k == "variants") {
        cfg.variants.clear();
        for (auto name : split(e.value, ',')) {
          if (auto v = parse_variant(name)) {
            cfg.variants.push_back(*v);
          } else {
            p.error(e, "unknown variant '" + std::string(name) + "'");
          }
        }
      } else if (k == "snapshot_stride") {
        p.integer(e, cfg.snapshot_stride);
      } else if (k == "snapshot_variant") {
        p.assign(e, cfg.snapshot_variant, parse_variant, "a variant name");
      } else {
        p.error(e, "unknown key");
      }
    }
  }

  // Semantic validation, pinned to the line that set the offending value.
  for (ConfigIssue issue : validate(cfg)) {
    if (issue.line == 0) {
      const auto colon = issue.field.find(' ');
      const std::string sect = issue.field.substr(0, colon);
      const std::string key = colon == std::string::npos ? "" : issue.field.substr(colon + 1);
      if (sect.rfind("[variant.", 0) == 0) {
        const auto v = parse_variant(sect.substr(9, sect.size() - 10));
        if (v && variant_lines[*v].count(key)) {
          issue.line = variant_lines[*v][key];
        } else if (shared_lines.count(key)) {
          issue.line = shared_lines[key];
          issue.field = "[solver] " + key;
        }
      } else if (sect == "[truth]" && block_lines.count(key)) {
        issue.line = block_lines[key];
        issue.field = "[truth] block";
      } else if (plain_lines.count(issue.field)) {
        issue.line = plain_lines[issue.field];
      }
    }
    const bool dup = std::any_of(issues.begin(), issues.end(), [&](const ConfigIssue& o) {
      return o.line == issue.line && o.field == issue.field && o.message == issue.message;
    });
    if (!dup) issues.push_back(std::move(issue));
  }
  return out;
}

std::vector<ConfigIssue> validate(const ExperimentConfig& cfg) {
  std::vector<ConfigIssue> out;
  const UpliftGeometry& g = cfg.geometry;
  if (!(g.depth > 0.0)) out.push_back({0, "[geometry] depth", "must be > 0"});
  if (!(g.aperture > 0.0)) out.push_back({0, "[geometry] aperture", "must be > 0"});
  if (g.n_model < 2) out.push_back({0, "[geometry] n", "must be >= 2"});
  for (std::size_t i = 0; i < cfg.truth.size(); ++i) {
    const Block& b = cfg.truth[i];
    const std::string field = "[truth] block#" + std::to_string(i);
    if (!(b.start >= 0.0) || !(b.end <= g.aperture)) {
      out.push_back({0, field, "interval must lie inside [0, aperture]"});
    }
    if (!(b.start <= b.end)) out.push_back({0, field, "start must not exceed end"});
    if (!std::isfinite(b.value)) out.push_back({0, field, "value must be finite"});
  }
  if (!std::isfinite(cfg.lower) || !std::isfinite(cfg.upper)) {
    out.push_back({0, "[bounds]", "bounds must be finite"});
  } else if (!(cfg.lower <= cfg.upper)) {
    out.push_back({0, "[bounds] lower", "must be <= upper"});
  }
  if (!(cfg.sigma_frac >= 0.0) || !std::isfinite(cfg.sigma_frac)) {
    out.push_back({0, "[noise] sigma_frac", "must be >= 0"});
  }
  for (const auto& [v, s] : cfg.solvers) {
    for (const std::string& msg : s.violations()) {
      const auto colon = msg.find(':');
      out.push_back({0, "[variant." + std::string(to_string(v)) + "] " + msg.substr(0, colon),
                     std::string(trim(msg.substr(colon + 1)))});
    }
  }
  if (cfg.tikhonov_beta && !(*cfg.tikhonov_beta > 0.0)) {
    out.push_back({0, "[variant.tikhonov] beta", "must be > 0"});
  }
  if (cfg.variants.empty()) out.push_back({0, "[output] variants", "at least one variant is required"});
  if (cfg.snapshot_stride < 0) out.push_back({0, "[output] snapshot_stride", "must be >= 0"});
  return out;
}

ConfigParse load_experiment_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str());
}

std::vector<ConfigIssue> validate_config(const std::filesystem::path& path) {
  return load_experiment_config(path).issues;
}

ExperimentOutcome run_experiment(const ExperimentConfig& cfg, bool write_files) {
  if (auto issues = validate(cfg); !issues.empty()) throw DomainError(join_issues(issues));

  const UpliftGeometry op_geom = cfg.operator_geometry();
  const UpliftOperator F(op_geom);
  ModelVector truth = make_blocky_model(cfg.truth, cfg.geometry);
  DataVector clean = F.apply(truth.values);
  DataVector noisy = add_noise(clean, cfg.sigma_frac, cfg.seed);
  Bounds bounds = Bounds::uniform(truth.grid, cfg.lower, cfg.upper);
  const ModelVector m0 = ModelVector::constant(truth.grid, 0.0);
  const Vector coords = meter_coords(cfg.geometry);
  const std::filesystem::path& dir = cfg.output_dir;

  if (write_files) {
    std::filesystem::create_directories(dir);
    write_series_csv(dir / "truth.csv", "x", coords, truth.values);
    write_series_csv(dir / "data_clean.csv", "x", coords, clean);
    write_series_csv(dir / "data_noisy.csv", "x", coords, noisy);
  }

  ExperimentOutcome outcome{truth, clean, noisy, bounds, {}};

  // Canonical order, so a misfit-matched Tikhonov run can reuse the
  // bound-constrained result.
  std::vector<Variant> order;
  for (Variant v : kAllVariants) {
    if (std::find(cfg.variants.begin(), cfg.variants.end(), v) != cfg.variants.end()) order.push_back(v);
  }

  auto solver_for = [&](Variant v) {
    SolverConfig s = cfg.solvers.at(v);
    s.variant = v;
    s.snapshot_stride = v == cfg.snapshot_variant ? cfg.snapshot_stride : 0;
    return s;
  };
  auto reported_model = [](Variant v, const SolveResult& r) {
    return (v == Variant::bound_constrained || v == Variant::naive_projection) ? r.y : r.m;
  };

  std::string summary = "variant," + metrics_csv_header() + "\n";
  for (Variant v : order) {
    SolverConfig s = solver_for(v);
    const std::string name(to_string(v));
    double beta = 0.0;
    if (v == Variant::tikhonov) {
      if (cfg.tikhonov_beta) {
        beta = *cfg.tikhonov_beta;
      } else {
        double target = 0.0;
        if (const auto* bc = outcome.find(Variant::bound_constrained)) {
          target = bc->metrics.data_misfit;
        } else {
          SolverConfig bs = solver_for(Variant::bound_constrained);
          bs.snapshot_stride = 0;
          const SolveResult r = run(bs, F, noisy, bounds, m0);
          target = measure(r.y, bs, F, noisy).data_misfit;
        }
        beta = tikhonov_match_misfit(F, noisy, truth.grid, target, s.cg_steps).beta;
      }
      s.tikhonov_beta = beta;
    }

    SolveResult result = [&] {
      try {
        return run(s, F, noisy, bounds, m0);
      } catch (const DivergenceError& err) {
        if (write_files) write_diagnostics_csv(dir / ("diagnostics_" + name + ".csv"), err.history());
        throw;
      }
    }();

    ModelVector reported = reported_model(v, result);
    MetricsReport metrics = evaluate(reported, truth, F, noisy, bounds, s);
    if (write_files) {
      write_series_csv(dir / ("model_" + name + ".csv"), "x", coords, reported.values);
      write_diagnostics_csv(dir / ("diagnostics_" + name + ".csv"), result.history);
      std::ofstream mf(dir / ("metrics_" + name + ".txt"), std::ios::binary | std::ios::trunc);
      mf << "variant = " << name << "\n" << to_key_value(metrics);
      if (v == Variant::tikhonov) mf << "tikhonov_beta = " << format_double(beta) << "\n";
      if (v == cfg.snapshot_variant && cfg.snapshot_stride > 0) {
        write_snapshots_csv(dir / "convergence_snapshots.csv", coords, result.snapshots);
      }
    }
    summary += name + "," + to_csv_row(metrics) + "\n";
    outcome.variants.push_back(VariantOutcome{v, std::move(result), std::move(reported), metrics, beta});
  }

  if (write_files) {
    std::ofstream sf(dir / "metrics_summary.csv", std::ios::binary | std::ios::trunc);
    sf << summary;
  }
  return outcome;
}

}  // namespace tvbound
