#pragma once

#include "tvbound/grid.hpp"

#include <Eigen/Core>

namespace tvbound {

using DataVector = Eigen::VectorXd;

/// Matrix-free linear forward operator F with its adjoint.
///
/// The solver only touches F through apply/adjoint/normal, so a nonlinear
/// operator can later slot in by linearizing around the current model.
class LinearOperator {
 public:
  virtual ~LinearOperator() = default;

  virtual Eigen::Index domain_size() const = 0;
  virtual Eigen::Index range_size() const = 0;

  virtual DataVector apply(const Vector& m) const = 0;
  virtual Vector adjoint(const DataVector& d) const = 0;

  /// F^T F m. Implementations may override with a cached product.
  virtual Vector normal(const Vector& m) const { return adjoint(apply(m)); }
};

class IdentityOperator final : public LinearOperator {
 public:
  explicit IdentityOperator(Eigen::Index n) : n_(n) {}

  Eigen::Index domain_size() const override { return n_; }
  Eigen::Index range_size() const override { return n_; }
  DataVector apply(const Vector& m) const override;
  Vector adjoint(const DataVector& d) const override;
  Vector normal(const Vector& m) const override;

 private:
  Eigen::Index n_;
};

/// Explicit dense matrix. Caches F^T F for the normal-equation product.
class MatrixOperator : public LinearOperator {
 public:
  explicit MatrixOperator(Eigen::MatrixXd matrix);

  Eigen::Index domain_size() const override { return matrix_.cols(); }
  Eigen::Index range_size() const override { return matrix_.rows(); }
  DataVector apply(const Vector& m) const override;
  Vector adjoint(const DataVector& d) const override;
  Vector normal(const Vector& m) const override;

  const Eigen::MatrixXd& matrix() const { return matrix_; }

 private:
  Eigen::MatrixXd matrix_;
  Eigen::MatrixXd gram_;
};

}  // namespace tvbound
