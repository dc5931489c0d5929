#pragma once

#include "tvbound/grid.hpp"

namespace tvbound {

/// Total-variation flavour. In 1-D both modes give the same penalty.
enum class TvMode { anisotropic, isotropic };

/// How shrinkage treats the per-axis entries of a cell.
enum class ShrinkMode {
  componentwise,  ///< every scalar entry independently (anisotropic TV)
  grouped,        ///< the per-cell vector across axes (isotropic TV)
};

/// Shrinkage that goes with a TV mode.
constexpr ShrinkMode shrink_mode_for(TvMode mode) {
  return mode == TvMode::isotropic ? ShrinkMode::grouped : ShrinkMode::componentwise;
}

/// Forward differences (m[i+1] - m[i]) / h along every axis; the last cell
/// along each axis gets 0 (homogeneous Neumann).
GradField grad_forward(const ModelVector& m);

/// Exact transpose of grad_forward (negative discrete divergence).
ModelVector grad_adjoint(const GradField& g);

/// Split-variable map for anisotropic TV: the stacked per-axis gradients.
/// This is also the map the ADMM solver splits on in isotropic mode, where
/// the grouping happens inside shrink().
GradField phi_anisotropic(const ModelVector& m);

/// Per-cell gradient magnitude sqrt(sum over axes of (d_a m)^2), a vector of
/// model-space dimension. On a 1-D grid this is |grad_forward(m)|.
ModelVector phi_isotropic(const ModelVector& m);

/// Discrete TV value: l1 norm of the mode's phi.
double tv_value(const ModelVector& m, TvMode mode);

/// Proximal map of gamma * ||.||_1 (componentwise) or of gamma times the
/// sum of per-cell Euclidean norms (grouped). Zero-magnitude cells map to 0.
GradField shrink(const GradField& v, double gamma, ShrinkMode mode);

/// Scalar soft threshold sign(t) * max(|t| - gamma, 0).
double shrink(double t, double gamma);

/// Component-wise clamp onto the box.
ModelVector project(const ModelVector& m, const Bounds& bounds);

}  // namespace tvbound
