// Independent oracles shared by the unit tests and the acceptance binary.
#pragma once

#include "tvbound/forward.hpp"
#include "tvbound/grid.hpp"
#include "tvbound/linalg.hpp"
#include "tvbound/operators.hpp"
#include "tvbound/solver.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

namespace tvtest {

using tvbound::Vector;

inline Vector random_vector(std::mt19937_64& rng, Eigen::Index n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (auto& x : v) x = u(rng);
  return v;
}

// Explicit forward-difference matrix of a 1-D grid, built entry by entry.
inline Eigen::MatrixXd difference_matrix(int n, double h) {
  Eigen::MatrixXd D = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i + 1 < n; ++i) {
    D(i, i) = -1.0 / h;
    D(i, i + 1) = 1.0 / h;
  }
  return D;
}

// argmin_x |x| + (x - v)^2 / (2 gamma) by scanning x in [-2|v|, 2|v|].
inline double brute_prox(double v, double gamma, double step) {
  const double r = 2.0 * std::abs(v);
  double best_x = 0.0;
  double best_f = std::abs(v) * std::abs(v) / (2.0 * gamma);
  const long steps = static_cast<long>(std::ceil(2.0 * r / step));
  for (long i = 0; i <= steps; ++i) {
    const double x = -r + static_cast<double>(i) * step;
    const double f = std::abs(x) + (x - v) * (x - v) / (2.0 * gamma);
    if (f < best_f) {
      best_f = f;
      best_x = x;
    }
  }
  return best_x;
}

// sum_i |m_{i+1} - m_i| + alpha/2 ||m - d||^2 on a unit-spacing 1-D grid.
inline double denoise_objective(const Vector& m, const Vector& d, double alpha) {
  double tv = 0.0;
  for (Eigen::Index i = 0; i + 1 < m.size(); ++i) tv += std::abs(m[i + 1] - m[i]);
  return tv + 0.5 * alpha * (m - d).squaredNorm();
}

// Projected subgradient method for the box-constrained denoising problem.
// The objective is alpha-strongly convex, so step 2 / (alpha (k + 1)) with
// k-weighted averaging converges at O(1/k).
inline Vector projected_subgradient(const Vector& d, double lo, double hi, double alpha, long iterations) {
  const Eigen::Index n = d.size();
  Vector m = d.cwiseMax(lo).cwiseMin(hi);
  Vector avg = Vector::Zero(n);
  double weight_sum = 0.0;
  Vector g(n);
  for (long k = 1; k <= iterations; ++k) {
    g = alpha * (m - d);
    for (Eigen::Index i = 0; i + 1 < n; ++i) {
      const double diff = m[i + 1] - m[i];
      const double s = diff > 0.0 ? 1.0 : (diff < 0.0 ? -1.0 : 0.0);
      g[i] -= s;
      g[i + 1] += s;
    }
    const double w = static_cast<double>(k);
    weight_sum += w;
    avg += (w / weight_sum) * (m - avg);
    m -= (2.0 / (alpha * static_cast<double>(k + 1))) * g;
    m = m.cwiseMax(lo).cwiseMin(hi);
  }
  return avg;
}

// Unscaled multipliers mu = lambda b, nu = delta c.
struct UnscaledState {
  Vector m;
  std::vector<Vector> x;
  Vector y;
  std::vector<Vector> mu;
  Vector nu;
};

// One outer step written with the unscaled Lagrangian
//   |x|_1 + mu^T (phi m - x) + lambda/2 ||x - phi m||^2 + alpha/2 ||F m - d||^2
//   + nu^T (y - m) + delta/2 ||m - y||^2,
// for a 1-D grid and anisotropic TV, using the shifted projection.
inline void unscaled_step(UnscaledState& s, const tvbound::SolverConfig& cfg, const Eigen::MatrixXd& F,
                          const Vector& d, const tvbound::Grid& grid, double lo, double hi) {
  const int n = static_cast<int>(grid.size());
  const Eigen::MatrixXd D = difference_matrix(n, grid.spacing(0));
  const Eigen::MatrixXd A = cfg.lambda * D.transpose() * D + cfg.alpha * F.transpose() * F +
                            cfg.delta * Eigen::MatrixXd::Identity(n, n);
  for (int it = 0; it < cfg.n_inner; ++it) {
    const Vector rhs = cfg.lambda * D.transpose() * s.x[0] - D.transpose() * s.mu[0] +
                       cfg.alpha * F.transpose() * d + cfg.delta * s.y + s.nu;
    tvbound::conjugate_gradient([&](const Vector& v) { return Vector(A * v); }, rhs, s.m, cfg.cg_steps);
    const Vector t = D * s.m + s.mu[0] / cfg.lambda;
    for (int i = 0; i < n; ++i) s.x[0][i] = tvbound::shrink(t[i], 1.0 / cfg.lambda);
  }
  s.mu[0] += cfg.lambda * (D * s.m - s.x[0]);
  s.nu += cfg.delta * (s.y - s.m);
  s.y = (s.m - s.nu / cfg.delta).cwiseMax(lo).cwiseMin(hi);
}

// Uplift of a piecewise-constant model evaluated with `refine` midpoint
// sub-cells per model cell.
inline Vector refined_uplift(const Vector& m, const tvbound::UpliftGeometry& g, int refine) {
  const int n_fine = g.n_model * refine;
  const double h = g.aperture / n_fine;
  Vector u = Vector::Zero(g.n_data);
  for (int i = 0; i < g.n_data; ++i) {
    const double x = g.data_coord(i);
    double acc = 0.0;
    for (int j = 0; j < n_fine; ++j) {
      const double xi = (j + 0.5) * h;
      const double r = x - xi;
      acc += m[j / refine] * std::pow(g.depth, 3) / std::pow(g.depth * g.depth + r * r, 1.5) * h;
    }
    u[i] = acc;
  }
  return u;
}

// Cells on either side of every jump of the truth model.
inline std::vector<Eigen::Index> edge_cells(const Vector& truth) {
  std::vector<Eigen::Index> cells;
  for (Eigen::Index i = 0; i + 1 < truth.size(); ++i) {
    if (truth[i + 1] != truth[i]) {
      cells.push_back(i);
      cells.push_back(i + 1);
    }
  }
  std::sort(cells.begin(), cells.end());
  cells.erase(std::unique(cells.begin(), cells.end()), cells.end());
  return cells;
}

inline double subset_rmse(const Vector& a, const Vector& b, const std::vector<Eigen::Index>& cells) {
  double acc = 0.0;
  for (auto i : cells) acc += (a[i] - b[i]) * (a[i] - b[i]);
  return std::sqrt(acc / static_cast<double>(cells.size()));
}

inline double rel_diff(const Vector& a, const Vector& b) {
  return (a - b).norm() / std::max(b.norm(), std::numeric_limits<double>::min());
}

}  // namespace tvtest
