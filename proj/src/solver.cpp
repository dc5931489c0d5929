#include "tvbound/solver.hpp"

#include "tvbound/linalg.hpp"

#include <cmath>
#include <limits>

namespace tvbound {

namespace {

constexpr double kDivergenceFactor = 1e6;

void check_problem(const LinearOperator& F, const DataVector& d, const Bounds& bounds, const ModelVector& m0) {
  if (F.domain_size() != m0.size()) throw DimensionError("operator domain does not match model size");
  if (F.range_size() != d.size()) throw DimensionError("operator range does not match data size");
  require_same_grid(m0.grid, bounds.grid(), "bounds vs. starting model");
  if (!d.allFinite()) throw DomainError("data contain non-finite values");
}

double rel_change(const Vector& next, const Vector& prev) {
  const double denom = std::max(prev.norm(), std::numeric_limits<double>::epsilon());
  return (next - prev).norm() / denom;
}

IterationRecord make_record(const SolverState& s, const Vector& prev_m, const SolverConfig& cfg,
                            const LinearOperator& F, const DataVector& d) {
  IterationRecord rec = measure(s.m, cfg, F, d);
  rec.k = s.k;
  rec.rel_model_change = rel_change(s.m.values, prev_m);
  rec.split_residual = (phi_anisotropic(s.m) - s.x).norm();
  rec.proj_residual = (s.m.values - s.y.values).norm();
  return rec;
}

void guard_divergence(const SolverState& s, double initial_objective) {
  const IterationRecord& rec = s.history.back();
  if (!std::isfinite(rec.objective)) {
    throw DivergenceError("non-finite objective at iteration " + std::to_string(rec.k), s.history);
  }
  const double limit = kDivergenceFactor * std::max(initial_objective, std::numeric_limits<double>::min());
  if (rec.objective > limit) {
    throw DivergenceError("objective exceeded 1e6 x its initial value at iteration " + std::to_string(rec.k),
                          s.history);
  }
}

void maybe_snapshot(const SolverState& s, const SolverConfig& cfg, std::vector<Snapshot>& out) {
  if (cfg.snapshot_stride > 0 && s.k % cfg.snapshot_stride == 0) out.push_back({s.k, s.m.values});
}

}  // namespace

std::string_view to_string(Variant v) {
  switch (v) {
    case Variant::bound_constrained: return "bound_constrained";
    case Variant::unconstrained_tv: return "unconstrained_tv";
    case Variant::naive_projection: return "naive_projection";
    case Variant::tikhonov: return "tikhonov";
  }
  return "unknown";
}

std::optional<Variant> parse_variant(std::string_view name) {
  for (Variant v : {Variant::bound_constrained, Variant::unconstrained_tv, Variant::naive_projection,
                    Variant::tikhonov}) {
    if (to_string(v) == name) return v;
  }
  return std::nullopt;
}

std::string_view to_string(TvMode mode) { return mode == TvMode::isotropic ? "isotropic" : "anisotropic"; }

std::optional<TvMode> parse_tv_mode(std::string_view name) {
  if (name == "anisotropic") return TvMode::anisotropic;
  if (name == "isotropic") return TvMode::isotropic;
  return std::nullopt;
}

std::string_view to_string(ProjectionRule r) { return r == ProjectionRule::literal ? "literal" : "shifted"; }

std::optional<ProjectionRule> parse_projection_rule(std::string_view name) {
  if (name == "shifted") return ProjectionRule::shifted;
  if (name == "literal") return ProjectionRule::literal;
  return std::nullopt;
}

std::string_view to_string(StopReason r) {
  return r == StopReason::target_reached ? "target_reached" : "iteration_cap";
}

std::vector<std::string> SolverConfig::violations() const {
  std::vector<std::string> out;
  auto finite = [](double v) { return std::isfinite(v); };
  if (!(alpha > 0.0) || !finite(alpha)) out.emplace_back("alpha: must be > 0");
  if (!(lambda > 0.0) || !finite(lambda)) out.emplace_back("lambda: must be > 0");
  if (!(delta >= 0.0) || !finite(delta)) out.emplace_back("delta: must be >= 0");
  if (n_inner < 1) out.emplace_back("n_inner: must be >= 1");
  if (n_outer < 1) out.emplace_back("n_outer: must be >= 1");
  if (cg_steps < 1) out.emplace_back("cg_steps: must be >= 1");
  if (!(target_accuracy > 0.0) || !finite(target_accuracy)) out.emplace_back("target_accuracy: must be > 0");
  if (!(tikhonov_beta > 0.0) || !finite(tikhonov_beta)) out.emplace_back("tikhonov_beta: must be > 0");
  if (snapshot_stride < 0) out.emplace_back("snapshot_stride: must be >= 0");
  return out;
}

void SolverConfig::validate() const {
  const auto errs = violations();
  if (errs.empty()) return;
  std::string msg = "invalid solver config:";
  for (const auto& e : errs) msg += "\n  " + e;
  throw DomainError(msg);
}

IterationRecord measure(const ModelVector& m, const SolverConfig& cfg, const LinearOperator& F,
                        const DataVector& d) {
  IterationRecord rec;
  rec.data_misfit = 0.5 * (F.apply(m.values) - d).squaredNorm();
  rec.tv_value = tv_value(m, cfg.tv_mode);
  rec.objective = rec.tv_value + cfg.alpha * rec.data_misfit;
  return rec;
}

SolverState init_state(const ModelVector& m0, const Bounds& bounds) {
  require_same_grid(m0.grid, bounds.grid(), "init_state");
  return SolverState{
      .m = m0,
      .x = GradField::zeros(m0.grid),
      .y = project(m0, bounds),
      .b = GradField::zeros(m0.grid),
      .c = ModelVector::constant(m0.grid, 0.0),
  };
}

ModelVector solve_m_subproblem(SolverState& state, const SolverConfig& cfg, const LinearOperator& F,
                               const DataVector& d) {
  const Grid& grid = state.m.grid;
  const double lambda = cfg.lambda;
  const double alpha = cfg.alpha;
  const double delta = cfg.delta;

  auto normal_op = [&](const Vector& v) -> Vector {
    Vector out = lambda * grad_adjoint(grad_forward(ModelVector(grid, v))).values;
    out.noalias() += alpha * F.normal(v);
    if (delta != 0.0) out += delta * v;
    return out;
  };

  Vector rhs = lambda * grad_adjoint(state.x - state.b).values;
  rhs.noalias() += alpha * F.adjoint(d);
  if (delta != 0.0) rhs += delta * (state.y.values + state.c.values);

  Vector m = state.m.values;
  const CgReport rep = conjugate_gradient(normal_op, rhs, m, cfg.cg_steps);
  if (rep.breakdown) ++state.cg_breakdowns;
  if (!m.allFinite()) {
    throw DivergenceError("non-finite model in m-subproblem at iteration " + std::to_string(state.k),
                          state.history);
  }
  return ModelVector(grid, std::move(m));
}

void inner_cycle(SolverState& state, const SolverConfig& cfg, const LinearOperator& F, const DataVector& d) {
  const ShrinkMode mode = shrink_mode_for(cfg.tv_mode);
  for (int i = 0; i < cfg.n_inner; ++i) {
    state.m = solve_m_subproblem(state, cfg, F, d);
    state.x = shrink(phi_anisotropic(state.m) + state.b, 1.0 / cfg.lambda, mode);
  }
}

void admm_step(SolverState& state, const SolverConfig& cfg, const LinearOperator& F, const DataVector& d,
               const Bounds& bounds) {
  const Vector prev_m = state.m.values;
  inner_cycle(state, cfg, F, d);

  state.b += phi_anisotropic(state.m) - state.x;
  if (cfg.variant != Variant::unconstrained_tv) {
    // c uses the y from before this step's projection.
    state.c.values += state.y.values - state.m.values;
  }
  if (cfg.projection_rule == ProjectionRule::shifted && cfg.variant != Variant::unconstrained_tv) {
    state.y = project(ModelVector(state.m.grid, state.m.values - state.c.values), bounds);
  } else {
    state.y = project(state.m, bounds);
  }
  ++state.k;
  state.history.push_back(make_record(state, prev_m, cfg, F, d));
}

SolveResult run(const SolverConfig& cfg, const LinearOperator& F, const DataVector& d, const Bounds& bounds,
                const ModelVector& m0) {
  check_problem(F, d, bounds, m0);
  cfg.validate();

  if (cfg.variant == Variant::naive_projection) return naive_projected_solve(cfg, F, d, bounds, m0);
  if (cfg.variant == Variant::tikhonov) {
    TikhonovResult t = tikhonov_solve(F, d, m0.grid, cfg.tikhonov_beta, cfg.cg_steps);
    SolveResult res{.m = t.m, .y = project(t.m, bounds)};
    res.iterations = t.cg_iterations;
    res.stop_reason = t.converged ? StopReason::target_reached : StopReason::iteration_cap;
    return res;
  }

  SolverConfig eff = cfg;
  if (eff.variant == Variant::unconstrained_tv) eff.delta = 0.0;

  SolverState state = init_state(m0, bounds);
  const double initial_objective = measure(m0, eff, F, d).objective;
  std::vector<Snapshot> snapshots;
  maybe_snapshot(state, eff, snapshots);

  StopReason reason = StopReason::iteration_cap;
  for (int it = 0; it < eff.n_outer; ++it) {
    admm_step(state, eff, F, d, bounds);
    guard_divergence(state, initial_objective);
    maybe_snapshot(state, eff, snapshots);
    if (eff.stop_on_target && state.history.back().rel_model_change <= eff.target_accuracy) {
      reason = StopReason::target_reached;
      break;
    }
  }

  SolveResult res{.m = state.m, .y = state.y};
  res.iterations = state.k;
  res.stop_reason = reason;
  res.cg_breakdowns = state.cg_breakdowns;
  res.history = std::move(state.history);
  res.snapshots = std::move(snapshots);
  return res;
}

SolveResult naive_projected_solve(const SolverConfig& cfg, const LinearOperator& F, const DataVector& d,
                                  const Bounds& bounds, const ModelVector& m0) {
  check_problem(F, d, bounds, m0);
  cfg.validate();

  SolverConfig eff = cfg;
  eff.variant = Variant::unconstrained_tv;
  eff.delta = 0.0;

  SolverState state = init_state(m0, bounds);
  const double initial_objective = measure(m0, eff, F, d).objective;
  std::vector<Snapshot> snapshots;
  maybe_snapshot(state, eff, snapshots);

  StopReason reason = StopReason::iteration_cap;
  for (int it = 0; it < eff.n_outer; ++it) {
    const Vector prev_m = state.m.values;
    admm_step(state, eff, F, d, bounds);
    state.m = project(state.m, bounds);
    state.y = state.m;
    state.history.back() = make_record(state, prev_m, eff, F, d);
    guard_divergence(state, initial_objective);
    maybe_snapshot(state, eff, snapshots);
    if (eff.stop_on_target && state.history.back().rel_model_change <= eff.target_accuracy) {
      reason = StopReason::target_reached;
      break;
    }
  }

  SolveResult res{.m = state.m, .y = state.y};
  res.iterations = state.k;
  res.stop_reason = reason;
  res.cg_breakdowns = state.cg_breakdowns;
  res.history = std::move(state.history);
  res.snapshots = std::move(snapshots);
  return res;
}

TikhonovResult tikhonov_solve(const LinearOperator& F, const DataVector& d, const Grid& grid, double beta,
                              int cg_steps) {
  if (!(beta > 0.0)) throw DomainError("tikhonov beta must be > 0");
  if (cg_steps < 1) throw DomainError("cg_steps must be >= 1");
  if (F.domain_size() != grid.size()) throw DimensionError("operator domain does not match grid");
  if (F.range_size() != d.size()) throw DimensionError("operator range does not match data size");

  auto normal_op = [&](const Vector& v) -> Vector {
    Vector out = F.normal(v);
    out.noalias() += beta * grad_adjoint(grad_forward(ModelVector(grid, v))).values;
    return out;
  };
  Vector m = Vector::Zero(grid.size());
  const CgReport rep = conjugate_gradient(normal_op, F.adjoint(d), m, cg_steps, 1e-13);
  if (!m.allFinite()) throw DivergenceError("non-finite Tikhonov solution", {});
  return TikhonovResult{ModelVector(grid, std::move(m)), rep.iterations, rep.converged};
}

TikhonovMatch tikhonov_match_misfit(const LinearOperator& F, const DataVector& d, const Grid& grid,
                                    double target_misfit, int cg_steps) {
  auto misfit = [&](const TikhonovResult& t) { return 0.5 * (F.apply(t.m.values) - d).squaredNorm(); };

  // Misfit grows monotonically with beta.
  double lo = -8.0;
  double hi = 8.0;
  TikhonovResult best = tikhonov_solve(F, d, grid, std::pow(10.0, lo), cg_steps);
  double best_beta = std::pow(10.0, lo);
  if (misfit(best) >= target_misfit) return {best_beta, std::move(best)};
  TikhonovResult top = tikhonov_solve(F, d, grid, std::pow(10.0, hi), cg_steps);
  if (misfit(top) <= target_misfit) return {std::pow(10.0, hi), std::move(top)};

  for (int it = 0; it < 60; ++it) {
    const double mid = 0.5 * (lo + hi);
    TikhonovResult t = tikhonov_solve(F, d, grid, std::pow(10.0, mid), cg_steps);
    if (misfit(t) < target_misfit) {
      lo = mid;
    } else {
      hi = mid;
    }
    best = std::move(t);
    best_beta = std::pow(10.0, mid);
    if (hi - lo < 1e-6) break;
  }
  return {best_beta, std::move(best)};
}

}  // namespace tvbound
