#include "tvbound/operators.hpp"

#include "tvbound/error.hpp"

#include <algorithm>
#include <cmath>

namespace tvbound {

namespace {

// Visits every (cell, neighbour-along-axis) pair that has an interior forward
// difference. `fn(i, j)` gets linear indices with j = i + stride(axis).
template <typename Fn>
void for_each_forward_pair(const Grid& g, int axis, Fn&& fn) {
  const Eigen::Index stride = g.stride(axis);
  const Eigen::Index n = g.size();
  const Eigen::Index len = g.dim(axis);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::Index pos = (i / stride) % len;
    if (pos + 1 < len) fn(i, i + stride);
  }
}

}  // namespace

GradField grad_forward(const ModelVector& m) {
  const Grid& g = m.grid;
  std::vector<Vector> comps(g.ndim(), Vector::Zero(g.size()));
  for (int a = 0; a < g.ndim(); ++a) {
    const double inv_h = 1.0 / g.spacing(a);
    Vector& c = comps[a];
    for_each_forward_pair(g, a, [&](Eigen::Index i, Eigen::Index j) {
      c[i] = (m.values[j] - m.values[i]) * inv_h;
    });
  }
  return GradField(g, std::move(comps));
}

ModelVector grad_adjoint(const GradField& gf) {
  const Grid& g = gf.grid;
  Vector out = Vector::Zero(g.size());
  for (int a = 0; a < g.ndim(); ++a) {
    const double inv_h = 1.0 / g.spacing(a);
    const Vector& c = gf.components[a];
    for_each_forward_pair(g, a, [&](Eigen::Index i, Eigen::Index j) {
      out[i] -= c[i] * inv_h;
      out[j] += c[i] * inv_h;
    });
  }
  return ModelVector(g, std::move(out));
}

GradField phi_anisotropic(const ModelVector& m) { return grad_forward(m); }

ModelVector phi_isotropic(const ModelVector& m) {
  const GradField gf = grad_forward(m);
  Vector sq = Vector::Zero(m.size());
  for (const auto& c : gf.components) sq.array() += c.array().square();
  return ModelVector(m.grid, sq.array().sqrt().matrix());
}

double tv_value(const ModelVector& m, TvMode mode) {
  if (mode == TvMode::isotropic) return phi_isotropic(m).values.lpNorm<1>();
  return phi_anisotropic(m).l1_norm();
}

double shrink(double t, double gamma) {
  const double mag = std::abs(t) - gamma;
  if (mag <= 0.0) return 0.0;
  return std::copysign(mag, t);
}

GradField shrink(const GradField& v, double gamma, ShrinkMode mode) {
  if (!(gamma > 0.0)) throw DomainError("shrink threshold must be positive");
  GradField out = v;
  if (mode == ShrinkMode::componentwise) {
    for (auto& c : out.components) {
      for (Eigen::Index i = 0; i < c.size(); ++i) c[i] = shrink(c[i], gamma);
    }
    return out;
  }
  const Eigen::Index n = v.grid.size();
  for (Eigen::Index i = 0; i < n; ++i) {
    double sq = 0.0;
    for (const auto& c : v.components) sq += c[i] * c[i];
    const double mag = std::sqrt(sq);
    const double scale = mag > gamma ? (mag - gamma) / mag : 0.0;
    for (auto& c : out.components) c[i] *= scale;
  }
  return out;
}

ModelVector project(const ModelVector& m, const Bounds& bounds) {
  require_same_grid(m.grid, bounds.grid(), "project");
  Vector out = m.values.cwiseMin(bounds.upper.values).cwiseMax(bounds.lower.values);
  return ModelVector(m.grid, std::move(out));
}

}  // namespace tvbound
