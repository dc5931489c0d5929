#include "tvbound/linalg.hpp"

#include <cmath>

namespace tvbound {

CgReport conjugate_gradient(const SymmetricOperator& apply, const Vector& rhs, Vector& x, int max_steps,
                            double rel_tol) {
  CgReport report;
  Vector r = rhs - apply(x);
  double rr = r.squaredNorm();
  const double stop = rel_tol * rhs.norm();
  report.residual_norm = std::sqrt(rr);
  if (rr == 0.0 || report.residual_norm <= stop) {
    report.converged = true;
    return report;
  }
  Vector p = r;
  for (int it = 0; it < max_steps; ++it) {
    const Vector ap = apply(p);
    const double curvature = p.dot(ap);
    if (!(curvature > 0.0) || !std::isfinite(curvature)) {
      report.breakdown = true;
      break;
    }
    const double step = rr / curvature;
    x.noalias() += step * p;
    r.noalias() -= step * ap;
    const double rr_next = r.squaredNorm();
    report.iterations = it + 1;
    report.residual_norm = std::sqrt(rr_next);
    if (rr_next == 0.0 || report.residual_norm <= stop) {
      report.converged = true;
      break;
    }
    p = r + (rr_next / rr) * p;
    rr = rr_next;
  }
  return report;
}

}  // namespace tvbound
