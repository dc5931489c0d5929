#pragma once

#include "tvbound/grid.hpp"

#include <functional>

namespace tvbound {

/// Symmetric positive (semi-)definite operator v -> A v.
using SymmetricOperator = std::function<Vector(const Vector&)>;

struct CgReport {
  int iterations = 0;
  /// A search direction had non-positive curvature; `x` holds the last good
  /// iterate.
  bool breakdown = false;
  /// Residual fell below the requested tolerance before the step budget ran out.
  bool converged = false;
  double residual_norm = 0.0;
};

/// Plain conjugate gradients on A x = rhs, warm-started from `x`, for at most
/// `max_steps` iterations. Stops early once ||r|| <= rel_tol * ||rhs||
/// (rel_tol = 0 only stops on an exactly zero residual).
CgReport conjugate_gradient(const SymmetricOperator& apply, const Vector& rhs, Vector& x, int max_steps,
                            double rel_tol = 0.0);

}  // namespace tvbound
