#include "tvbound/diagnostics.hpp"

#include "tvbound/csv.hpp"
#include "tvbound/operators.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace tvbound {

namespace {

enum class Activity { interior, lower, upper };

// Residual component a bound-aware projected gradient would leave behind.
double active_part(double g, Activity a) {
  switch (a) {
    case Activity::lower: return std::min(g, 0.0);
    case Activity::upper: return std::max(g, 0.0);
    case Activity::interior: return g;
  }
  return g;
}

// Groups of gradient-field entries sharing one subgradient constraint: a
// single scalar (componentwise) or all axes of one cell (grouped).
struct SubgradientLayout {
  GradField fixed;
  std::vector<Eigen::Index> free_cells;
};

SubgradientLayout split_subgradient(const GradField& grad, ShrinkMode mode, double tol) {
  SubgradientLayout out{GradField::zeros(grad.grid), {}};
  const Eigen::Index n = grad.grid.size();
  if (mode == ShrinkMode::componentwise) {
    for (int a = 0; a < grad.ncomponents(); ++a) {
      for (Eigen::Index i = 0; i < n; ++i) {
        const double t = grad.components[a][i];
        if (std::abs(t) > tol) {
          out.fixed.components[a][i] = t > 0.0 ? 1.0 : -1.0;
        } else {
          out.free_cells.push_back(a * n + i);
        }
      }
    }
    return out;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double sq = 0.0;
    for (const auto& c : grad.components) sq += c[i] * c[i];
    const double mag = std::sqrt(sq);
    if (mag > tol) {
      for (int a = 0; a < grad.ncomponents(); ++a) out.fixed.components[a][i] = grad.components[a][i] / mag;
    } else {
      out.free_cells.push_back(i);
    }
  }
  return out;
}

// Projects the free entries of `s` onto their unit balls and zeros the rest.
void project_free(GradField& s, ShrinkMode mode, const std::vector<char>& is_free) {
  const Eigen::Index n = s.grid.size();
  if (mode == ShrinkMode::componentwise) {
    for (int a = 0; a < s.ncomponents(); ++a) {
      for (Eigen::Index i = 0; i < n; ++i) {
        double& v = s.components[a][i];
        v = is_free[a * n + i] ? std::clamp(v, -1.0, 1.0) : 0.0;
      }
    }
    return;
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    double sq = 0.0;
    for (const auto& c : s.components) sq += c[i] * c[i];
    const double mag = std::sqrt(sq);
    const double scale = !is_free[i] ? 0.0 : (mag > 1.0 ? 1.0 / mag : 1.0);
    for (auto& c : s.components) c[i] *= scale;
  }
}

}  // namespace

double stationarity_check(const ModelVector& m_in, const LinearOperator& F, const DataVector& d,
                          const Bounds& bounds, const SolverConfig& cfg, const StationarityOptions& opts) {
  const ModelVector m = project(m_in, bounds);
  const Grid& grid = m.grid;
  const Eigen::Index n = grid.size();
  const ShrinkMode mode = shrink_mode_for(cfg.tv_mode);
  const double w = opts.tv_weight;

  std::vector<Activity> activity(n, Activity::interior);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (m.values[i] <= bounds.lower.values[i]) {
      activity[i] = Activity::lower;
    } else if (m.values[i] >= bounds.upper.values[i]) {
      activity[i] = Activity::upper;
    }
  }

  const Vector smooth = cfg.alpha * F.adjoint(F.apply(m.values) - d);
  Vector g = smooth;

  if (w != 0.0) {
    SubgradientLayout layout = split_subgradient(grad_forward(m), mode, opts.tol_grad);
    g += w * grad_adjoint(layout.fixed).values;

    if (!layout.free_cells.empty()) {
      const Eigen::Index slots = mode == ShrinkMode::componentwise ? n * grid.ndim() : n;
      std::vector<char> is_free(slots, 0);
      for (Eigen::Index c : layout.free_cells) is_free[c] = 1;

      // FISTA on 1/2 ||active_part(g0 + w grad^T s)||^2 over the free entries
      // of s, each restricted to its unit ball.
      double lip = 0.0;
      for (int a = 0; a < grid.ndim(); ++a) lip += 4.0 / (grid.spacing(a) * grid.spacing(a));
      lip *= w * w;
      const double step = 1.0 / lip;

      const Vector g0 = g;
      auto residual = [&](const GradField& s) {
        Vector gs = g0 + w * grad_adjoint(s).values;
        for (Eigen::Index i = 0; i < n; ++i) gs[i] = active_part(gs[i], activity[i]);
        return gs;
      };

      GradField s = GradField::zeros(grid);
      GradField z = s;
      double t = 1.0;
      for (int it = 0; it < opts.max_iter; ++it) {
        const Vector r = residual(z);
        GradField next = z - (step * w) * grad_forward(ModelVector(grid, r));
        project_free(next, mode, is_free);
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const GradField diff = next - s;
        z = next + ((t - 1.0) / t_next) * diff;
        s = std::move(next);
        t = t_next;
        if (diff.norm() <= 1e-15 * (1.0 + s.norm())) break;
      }
      g = g0 + w * grad_adjoint(s).values;
    }
  }

  const Vector stepped = (m.values - g).cwiseMin(bounds.upper.values).cwiseMax(bounds.lower.values);
  return (m.values - stepped).lpNorm<Eigen::Infinity>();
}

MetricsReport evaluate(const ModelVector& m, const ModelVector& truth, const LinearOperator& F, const DataVector& d,
                       const Bounds& bounds, const SolverConfig& cfg) {
  require_same_grid(m.grid, truth.grid, "evaluate: truth");
  require_same_grid(m.grid, bounds.grid(), "evaluate: bounds");
  if (F.domain_size() != m.size() || F.range_size() != d.size()) {
    throw DimensionError("evaluate: operator does not match model/data sizes");
  }

  const IterationRecord rec = measure(m, cfg, F, d);
  MetricsReport r;
  r.rmse_vs_truth = (m.values - truth.values).norm() / std::sqrt(static_cast<double>(m.size()));
  const double above = (m.values - bounds.upper.values).maxCoeff();
  const double below = (bounds.lower.values - m.values).maxCoeff();
  r.max_bound_violation = std::max({0.0, above, below});
  r.data_misfit = rec.data_misfit;
  r.tv_value = rec.tv_value;
  r.objective = rec.objective;
  r.stationarity_residual = stationarity_check(m, F, d, bounds, cfg);
  return r;
}

std::string to_key_value(const MetricsReport& r) {
  std::string out;
  auto line = [&](const char* key, double v) { out += std::string(key) + " = " + format_double(v) + "\n"; };
  line("rmse_vs_truth", r.rmse_vs_truth);
  line("max_bound_violation", r.max_bound_violation);
  line("data_misfit", r.data_misfit);
  line("tv_value", r.tv_value);
  line("objective", r.objective);
  line("stationarity_residual", r.stationarity_residual);
  return out;
}

std::string metrics_csv_header() {
  return "rmse_vs_truth,max_bound_violation,data_misfit,tv_value,objective,stationarity_residual";
}

std::string to_csv_row(const MetricsReport& r) {
  return format_double(r.rmse_vs_truth) + "," + format_double(r.max_bound_violation) + "," +
         format_double(r.data_misfit) + "," + format_double(r.tv_value) + "," + format_double(r.objective) + "," +
         format_double(r.stationarity_residual);
}

}  // namespace tvbound
