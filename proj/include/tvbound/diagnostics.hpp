#pragma once

#include "tvbound/grid.hpp"
#include "tvbound/linear_operator.hpp"
#include "tvbound/solver.hpp"

#include <string>

namespace tvbound {

struct MetricsReport {
  double rmse_vs_truth = 0.0;        ///< ||m - truth|| / sqrt(n)
  double max_bound_violation = 0.0;  ///< largest distance outside [m1, m2], >= 0
  double data_misfit = 0.0;          ///< 1/2 ||F m - d||^2
  double tv_value = 0.0;
  double objective = 0.0;            ///< tv_value + alpha * data_misfit
  double stationarity_residual = 0.0;
};

struct StationarityOptions {
  /// |grad m| at or below this counts as zero, leaving the TV subgradient free.
  double tol_grad = 1e-8;
  /// Weight of the TV term in the objective being checked.
  double tv_weight = 1.0;
  /// Budget for choosing the free part of the subgradient.
  int max_iter = 20000;
};

/// First-order optimality residual ||m - P(m - g)||_inf of the box-constrained
/// problem at P(m), where g = alpha F^T (F m - d) + tv_weight * grad^T s and s
/// is a TV subgradient. On cells with |grad m| > tol_grad, s is fixed to
/// sign(grad m) (or grad m / |grad m| when grouped); elsewhere s is chosen in
/// the unit ball to minimize the active-set-aware residual. Zero at a
/// first-order-optimal point.
double stationarity_check(const ModelVector& m, const LinearOperator& F, const DataVector& d, const Bounds& bounds,
                          const SolverConfig& cfg, const StationarityOptions& opts = {});

/// Every metric for one model. Stationarity is measured at project(m).
MetricsReport evaluate(const ModelVector& m, const ModelVector& truth, const LinearOperator& F, const DataVector& d,
                       const Bounds& bounds, const SolverConfig& cfg);

/// "key = value" lines, one per field, 17 significant digits.
std::string to_key_value(const MetricsReport& r);
std::string metrics_csv_header();
std::string to_csv_row(const MetricsReport& r);

}  // namespace tvbound
