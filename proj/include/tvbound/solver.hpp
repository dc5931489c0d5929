#pragma once

#include "tvbound/error.hpp"
#include "tvbound/grid.hpp"
#include "tvbound/linear_operator.hpp"
#include "tvbound/operators.hpp"

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace tvbound {

enum class Variant { bound_constrained, unconstrained_tv, naive_projection, tikhonov };

/// How the projected copy y is refreshed after the multiplier update
/// c += y_old - m.
enum class ProjectionRule {
  /// y = project(m - c). Fixed points satisfy the box KKT conditions.
  shifted,
  /// y = project(m). Converges to a feasible point, but interior cells keep
  /// m + c frozen, so the limit is generally not the constrained minimizer.
  literal,
};

std::string_view to_string(Variant v);
std::optional<Variant> parse_variant(std::string_view name);
std::string_view to_string(TvMode mode);
std::optional<TvMode> parse_tv_mode(std::string_view name);
std::string_view to_string(ProjectionRule r);
std::optional<ProjectionRule> parse_projection_rule(std::string_view name);

/// Parameters of the bound-constrained TV problem
///   ||phi(m)||_1 + alpha/2 ||F m - d||^2  ->  min,   m1 <= m <= m2
/// and of the ADMM iteration that solves it.
struct SolverConfig {
  double alpha = 1.0;   ///< data-fit weight
  double lambda = 2.0;  ///< penalty on x = phi(m)
  double delta = 2.0;   ///< penalty on m = y; 0 drops the bound coupling
  int n_inner = 2;      ///< alternating m/x cycles per outer iteration
  int n_outer = 1000;
  int cg_steps = 10;    ///< CG budget per m-subproblem
  double target_accuracy = 1e-6;
  /// When false the relative-change test is still recorded but never stops
  /// the run, so exactly n_outer iterations are performed.
  bool stop_on_target = true;
  TvMode tv_mode = TvMode::anisotropic;
  Variant variant = Variant::bound_constrained;
  ProjectionRule projection_rule = ProjectionRule::shifted;
  double tikhonov_beta = 1.0;
  /// Keep m^k for every k divisible by this stride (0 keeps none).
  int snapshot_stride = 0;

  /// Every violated constraint, phrased as "<field>: <constraint>".
  std::vector<std::string> violations() const;
  /// Throws DomainError listing all violations.
  void validate() const;
};

/// Per-outer-iteration diagnostics.
struct IterationRecord {
  int k = 0;
  double rel_model_change = 0.0;  ///< ||m^{k+1} - m^k|| / max(||m^k||, eps)
  double split_residual = 0.0;    ///< ||phi(m) - x||
  double proj_residual = 0.0;     ///< ||m - y||
  double data_misfit = 0.0;       ///< 1/2 ||F m - d||^2
  double tv_value = 0.0;
  double objective = 0.0;         ///< tv_value + alpha * data_misfit
};

/// Iterate bundle. b and c are the scaled multipliers mu / lambda and
/// nu / delta; the unscaled ones are never stored.
struct SolverState {
  ModelVector m;
  GradField x;
  ModelVector y;  ///< always the projection of some iterate
  GradField b;
  ModelVector c;
  int k = 0;
  int cg_breakdowns = 0;
  std::vector<IterationRecord> history;
};

enum class StopReason { target_reached, iteration_cap };
std::string_view to_string(StopReason r);

struct Snapshot {
  int k = 0;
  Vector m;
};

struct SolveResult {
  ModelVector m;
  ModelVector y;
  int iterations = 0;
  StopReason stop_reason = StopReason::iteration_cap;
  int cg_breakdowns = 0;
  std::vector<IterationRecord> history;
  std::vector<Snapshot> snapshots;
};

/// Raised when the iteration produces non-finite values or the objective
/// grows beyond 1e6 times its starting value. Carries the history so far.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, std::vector<IterationRecord> history)
      : Error(what), history_(std::move(history)) {}
  const std::vector<IterationRecord>& history() const { return history_; }

 private:
  std::vector<IterationRecord> history_;
};

/// m = m0, x = 0, y = project(m0), b = 0, c = 0, k = 0.
SolverState init_state(const ModelVector& m0, const Bounds& bounds);

/// Approximate argmin over m of
///   lambda/2 ||x - phi(m) - b||^2 + alpha/2 ||F m - d||^2 + delta/2 ||m - y - c||^2
/// by at most cfg.cg_steps CG iterations on the normal equations, warm-started
/// from state.m. A CG breakdown returns the last iterate and bumps
/// state.cg_breakdowns.
ModelVector solve_m_subproblem(SolverState& state, const SolverConfig& cfg, const LinearOperator& F,
                               const DataVector& d);

/// cfg.n_inner cycles of {m-update; x = shrink(phi(m) + b, 1/lambda)}.
void inner_cycle(SolverState& state, const SolverConfig& cfg, const LinearOperator& F, const DataVector& d);

/// One outer iteration: inner cycles, then
///   b += phi(m) - x,  c += y_old - m,  y = project(m - c),  k += 1
/// (y = project(m) under ProjectionRule::literal)
/// and a diagnostics record. With cfg.variant == unconstrained_tv, c is left
/// alone and y is only refreshed for reporting.
void admm_step(SolverState& state, const SolverConfig& cfg, const LinearOperator& F, const DataVector& d,
               const Bounds& bounds);

/// Full solve dispatched on cfg.variant.
SolveResult run(const SolverConfig& cfg, const LinearOperator& F, const DataVector& d, const Bounds& bounds,
                const ModelVector& m0);

/// Negative baseline: the unconstrained TV iteration with m clamped to the
/// bounds after every outer iteration, no y/c coupling.
SolveResult naive_projected_solve(const SolverConfig& cfg, const LinearOperator& F, const DataVector& d,
                                  const Bounds& bounds, const ModelVector& m0);

struct TikhonovResult {
  ModelVector m;
  int cg_iterations = 0;
  bool converged = false;
};

/// argmin 1/2 ||F m - d||^2 + beta/2 ||grad m||^2 by CG on the normal
/// equations from m = 0.
TikhonovResult tikhonov_solve(const LinearOperator& F, const DataVector& d, const Grid& grid, double beta,
                              int cg_steps);

/// Picks beta by bisection in log(beta) so that the Tikhonov misfit
/// 1/2 ||F m - d||^2 matches `target_misfit`, then returns that solve.
struct TikhonovMatch {
  double beta = 0.0;
  TikhonovResult result;
};
TikhonovMatch tikhonov_match_misfit(const LinearOperator& F, const DataVector& d, const Grid& grid,
                                    double target_misfit, int cg_steps);

/// Objective, misfit and TV of `m` as recorded in IterationRecord.
IterationRecord measure(const ModelVector& m, const SolverConfig& cfg, const LinearOperator& F, const DataVector& d);

}  // namespace tvbound
