// Acceptance checks. Prints one PASS/FAIL line per criterion and exits
// nonzero if any fails.
#include "support.hpp"

#include "tvbound/csv.hpp"
#include "tvbound/diagnostics.hpp"
#include "tvbound/experiment.hpp"

#include <chrono>
#include <cstdio>
#include <fstream>
#include <functional>
#include <optional>
#include <sstream>
#include <string>

using namespace tvbound;
using tvtest::random_vector;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [x]");
  }
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), f, v);
  return buf;
}

GradField random_field(std::mt19937_64& rng, const Grid& g) {
  std::vector<Vector> comps;
  for (int a = 0; a < g.ndim(); ++a) comps.push_back(random_vector(rng, g.size()));
  return GradField(g, comps);
}

Verdict operators_adjoint() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(1);
  double worst_grad = 0.0;
  for (const Grid& g : {Grid(200, 10.0), Grid(20, 15, 1.0, 2.0)}) {
    for (int i = 0; i < 100; ++i) {
      const ModelVector m(g, random_vector(rng, g.size()));
      const GradField f = random_field(rng, g);
      const GradField gm = grad_forward(m);
      const double err = std::abs(gm.dot(f) - m.values.dot(grad_adjoint(f).values)) /
                         (m.values.norm() * f.norm() + gm.norm() * f.norm());
      worst_grad = std::max(worst_grad, err);
    }
  }
  const UpliftGeometry geom;
  const UpliftOperator F(geom);
  double worst_f = 0.0;
  for (int i = 0; i < 100; ++i) {
    const Vector m = random_vector(rng, geom.n_model);
    const Vector u = random_vector(rng, geom.n_data);
    const DataVector fm = F.apply(m);
    worst_f = std::max(worst_f, std::abs(fm.dot(u) - m.dot(F.adjoint(u))) / (fm.norm() * u.norm()));
  }
  const double t = seconds_since(t0);
  v.require(worst_grad <= 1e-12, "grad rel err " + fmt("%.2e", worst_grad));
  v.require(worst_f <= 1e-12, "uplift rel err " + fmt("%.2e", worst_f));
  v.require(t < 1.0, "time " + fmt("%.3f", t) + " s");
  return v;
}

Verdict prox_oracle() {
  Verdict v;
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> vd(-3.0, 3.0);
  std::uniform_real_distribution<double> gd(0.05, 2.0);
  const double step = 1e-4;
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const double x = vd(rng);
    const double gamma = gd(rng);
    worst = std::max(worst, std::abs(shrink(x, gamma) - tvtest::brute_prox(x, gamma, step)));
  }
  v.require(worst <= step, "max |shrink - search| " + fmt("%.2e", worst));

  const Grid g(2, 2, 1.0, 1.0);
  GradField f = GradField::zeros(g);
  f.components[0][0] = 3.0;
  f.components[1][0] = 4.0;
  const GradField s = shrink(f, 1.0, ShrinkMode::grouped);
  const double e = std::max(std::abs(s.components[0][0] - 2.4), std::abs(s.components[1][0] - 3.2));
  v.require(e <= 1e-12, "grouped (3,4) err " + fmt("%.1e", e));
  return v;
}

Verdict forward_analytics() {
  Verdict v;
  const UpliftGeometry wide{100.0, 2000.0, 400, 401};
  const double c = 0.7;
  const double mid = uplift_apply(ModelVector::constant(model_grid(wide), c), wide)[wide.n_data / 2];
  const double rel = std::abs(mid - 2.0 * wide.depth * c) / (2.0 * wide.depth * c);
  v.require(rel <= 0.01, "mid-aperture vs 2Dc " + fmt("%.2e", rel));

  std::mt19937_64 rng(3);
  const UpliftGeometry g;
  double worst = 0.0;
  for (int i = 0; i < 5; ++i) {
    const Vector m = random_vector(rng, g.n_model, 0.0, 1.0);
    const DataVector u = uplift_apply(ModelVector(model_grid(g), m), g);
    const Vector ref = tvtest::refined_uplift(m, g, 10);
    worst = std::max(worst, ((u - ref).array().abs() / ref.array()).maxCoeff());
  }
  v.require(worst <= 0.005, "vs 10x refined " + fmt("%.2e", worst));
  return v;
}

Verdict small_oracle() {
  Verdict v;
  const auto t0 = Clock::now();
  std::mt19937_64 rng(4);
  double worst = 0.0;
  for (int n : {4, 5, 6, 7, 8}) {
    const Grid g(n);
    const IdentityOperator F(n);
    const Vector d = random_vector(rng, n, -0.5, 1.5);
    SolverConfig cfg;
    cfg.cg_steps = 50;
    cfg.n_outer = 4000;
    cfg.stop_on_target = false;
    const SolveResult r = run(cfg, F, d, Bounds::uniform(g, 0, 1), ModelVector::constant(g, 0.0));
    const double f_admm = tvtest::denoise_objective(r.y.values, d, cfg.alpha);
    const double f_oracle =
        tvtest::denoise_objective(tvtest::projected_subgradient(d, 0.0, 1.0, cfg.alpha, 1000000), d, cfg.alpha);
    worst = std::max(worst, std::abs(f_admm - f_oracle) / f_oracle);
  }
  const double t = seconds_since(t0);
  v.require(worst <= 1e-4, "max rel objective gap " + fmt("%.2e", worst));
  v.require(t < 30.0, "time " + fmt("%.2f", t) + " s");
  return v;
}

struct ReferenceRun {
  ExperimentOutcome outcome;
  double seconds;
};

ReferenceRun reference_experiment(std::uint64_t seed, std::vector<Variant> variants, int snapshot_stride) {
  ExperimentConfig c = ExperimentConfig::defaults();
  c.seed = seed;
  c.variants = std::move(variants);
  c.snapshot_stride = snapshot_stride;
  const auto t0 = Clock::now();
  ExperimentOutcome out = run_experiment(c, false);
  return {std::move(out), seconds_since(t0)};
}

Verdict reference_regression(const ReferenceRun& run) {
  Verdict v;
  const auto& o = run.outcome;
  const auto* bc = o.find(Variant::bound_constrained);
  const auto* un = o.find(Variant::unconstrained_tv);
  const auto* tk = o.find(Variant::tikhonov);
  const double lower = o.bounds.lower.values.minCoeff();

  const double min_bc = bc->reported.values.minCoeff();
  const double min_un = un->reported.values.minCoeff();
  v.require(min_bc >= lower - 1e-6, "(a) constrained min " + fmt("%.3g", min_bc));
  v.require(min_un < 0.0, "unconstrained min " + fmt("%.3g", min_un));
  v.require(bc->metrics.rmse_vs_truth < un->metrics.rmse_vs_truth,
            "(b) rmse " + fmt("%.4f", bc->metrics.rmse_vs_truth) + " < " + fmt("%.4f", un->metrics.rmse_vs_truth));

  const auto edges = tvtest::edge_cells(o.truth.values);
  const double e_bc = tvtest::subset_rmse(bc->reported.values, o.truth.values, edges);
  const double e_un = tvtest::subset_rmse(un->reported.values, o.truth.values, edges);
  const double e_tk = tvtest::subset_rmse(tk->reported.values, o.truth.values, edges);
  v.require(e_bc < e_tk && e_un < e_tk, "(c) edge rmse constrained " + fmt("%.4f", e_bc) + ", unconstrained " +
                                            fmt("%.4f", e_un) + " vs tikhonov " + fmt("%.4f", e_tk));
  v.require(run.seconds < 60.0, "time " + fmt("%.2f", run.seconds) + " s");
  return v;
}

Verdict naive_failure(const ReferenceRun& first) {
  Verdict v;
  int stable = 0;
  std::string ratios;
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    std::optional<ReferenceRun> r;
    if (seed > 1) r = reference_experiment(seed, {Variant::bound_constrained, Variant::naive_projection}, 0);
    const ExperimentOutcome& o = r ? r->outcome : first.outcome;
    const auto& bc = o.find(Variant::bound_constrained)->metrics;
    const auto& nv = o.find(Variant::naive_projection)->metrics;
    const bool ok = nv.objective > bc.objective && nv.stationarity_residual > bc.stationarity_residual;
    stable += ok;
    ratios += (ratios.empty() ? "" : ", ") + fmt("%.3g", nv.objective / bc.objective) + "/" +
              fmt("%.2g", bc.stationarity_residual);
  }
  v.require(stable == 5, std::to_string(stable) + "/5 seeds naive worse (objective ratio/constrained residual: " +
                             ratios + ")");
  return v;
}

ReferenceRun reference_first_seed() {
  return reference_experiment(1, {Variant::bound_constrained, Variant::unconstrained_tv, Variant::naive_projection,
                              Variant::tikhonov},
                          1);
}

Verdict stabilization(const ReferenceRun& run) {
  Verdict v;
  const auto& snaps = run.outcome.find(Variant::bound_constrained)->result.snapshots;
  const Vector& last = snaps.back().m;
  double worst = 0.0;
  for (const auto& s : snaps) {
    if (s.k >= 100) worst = std::max(worst, (s.m - last).norm() / last.norm());
  }
  v.require(snaps.back().k == 1000, "last k " + std::to_string(snaps.back().k));
  v.require(worst <= 0.05, "max_{k>=100} rel dist " + fmt("%.4f", worst));
  return v;
}

Verdict scaled_equivalence() {
  Verdict v;
  std::mt19937_64 rng(8);
  const int n = 8;
  const Grid g(n);
  double worst = 0.0;
  for (int trial = 0; trial < 50; ++trial) {
    Eigen::MatrixXd Fm(n + 2, n);
    for (int j = 0; j < n; ++j) Fm.col(j) = random_vector(rng, n + 2);
    const MatrixOperator F(Fm);
    const Vector d = random_vector(rng, n + 2);
    const Bounds box = Bounds::uniform(g, -0.3, 0.4);
    SolverConfig cfg;
    cfg.alpha = 0.5 + trial * 0.05;
    cfg.lambda = 1.5;
    cfg.delta = 2.5;
    cfg.cg_steps = 4;

    SolverState s = init_state(ModelVector(g, random_vector(rng, n)), box);
    s.x = GradField(g, {random_vector(rng, n)});
    s.b = GradField(g, {random_vector(rng, n)});
    s.c = ModelVector(g, random_vector(rng, n));
    s.y = project(ModelVector(g, random_vector(rng, n)), box);
    tvtest::UnscaledState u{s.m.values, s.x.components, s.y.values, {cfg.lambda * s.b.components[0]},
                            cfg.delta * s.c.values};
    admm_step(s, cfg, F, d, box);
    tvtest::unscaled_step(u, cfg, Fm, d, g, -0.3, 0.4);
    const double scale = 1.0 + u.m.norm() + u.mu[0].norm() + u.nu.norm();
    const double e = ((s.m.values - u.m).norm() + (s.x.components[0] - u.x[0]).norm() + (s.y.values - u.y).norm() +
                      (cfg.lambda * s.b.components[0] - u.mu[0]).norm() + (cfg.delta * s.c.values - u.nu).norm()) /
                     scale;
    worst = std::max(worst, e);
  }
  v.require(worst <= 1e-12, "max rel state diff " + fmt("%.2e", worst));
  return v;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict determinism(const std::filesystem::path& config) {
  Verdict v;
  ConfigParse p = load_experiment_config(config);
  if (!p.ok()) {
    v.require(false, "default config invalid");
    return v;
  }
  const auto base = std::filesystem::temp_directory_path() / "tvbound_acceptance";
  std::filesystem::remove_all(base);
  for (const char* sub : {"a", "b"}) {
    p.config.output_dir = base / sub;
    run_experiment(p.config);
  }
  int files = 0;
  int same = 0;
  for (const auto& e : std::filesystem::directory_iterator(base / "a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    same += slurp(e.path()) == slurp(base / "b" / e.path().filename());
  }
  std::filesystem::remove_all(base);
  v.require(files >= 12 && same == files, std::to_string(same) + "/" + std::to_string(files) + " CSVs identical");
  return v;
}

}  // namespace

int main(int argc, char** argv) {
  const std::filesystem::path config =
      argc > 1 ? std::filesystem::path(argv[1])
               : std::filesystem::path(TVBOUND_SOURCE_DIR) / "configs" / "default.cfg";
  int failures = 0;
  auto report = [&](int id, const char* name, const std::function<Verdict()>& fn) {
    Verdict v;
    try {
      v = fn();
    } catch (const std::exception& e) {
      v.pass = false;
      v.detail = std::string("exception: ") + e.what();
    }
    failures += !v.pass;
    std::printf("%s criterion %d %s: %s\n", v.pass ? "PASS" : "FAIL", id, name, v.detail.c_str());
    std::fflush(stdout);
  };

  report(1, "operator adjoints", operators_adjoint);
  report(2, "prox oracle", prox_oracle);
  report(3, "forward analytics", forward_analytics);
  report(4, "small-instance oracle", small_oracle);
  std::optional<ReferenceRun> reference;
  report(5, "reference experiment regression", [&] {
    reference = reference_first_seed();
    return reference_regression(*reference);
  });
  report(6, "naive projection failure", [&] {
    if (!reference) throw std::runtime_error("reference experiment unavailable");
    return naive_failure(*reference);
  });
  report(7, "convergence stabilization", [&] {
    if (!reference) throw std::runtime_error("reference experiment unavailable");
    return stabilization(*reference);
  });
  report(8, "scaled/unscaled equivalence", scaled_equivalence);
  report(9, "end-to-end determinism", [&] { return determinism(config); });

  std::printf("%d of 9 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
