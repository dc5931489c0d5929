#include "tvbound/linear_operator.hpp"

#include "tvbound/error.hpp"

#include <string>

namespace tvbound {

namespace {

void check_length(Eigen::Index got, Eigen::Index want, const char* what) {
  if (got != want) {
    throw DimensionError(std::string(what) + ": expected length " + std::to_string(want) +
                         ", got " + std::to_string(got));
  }
}

}  // namespace

DataVector IdentityOperator::apply(const Vector& m) const {
  check_length(m.size(), n_, "IdentityOperator::apply");
  return m;
}

Vector IdentityOperator::adjoint(const DataVector& d) const {
  check_length(d.size(), n_, "IdentityOperator::adjoint");
  return d;
}

Vector IdentityOperator::normal(const Vector& m) const { return apply(m); }

MatrixOperator::MatrixOperator(Eigen::MatrixXd matrix)
    : matrix_(std::move(matrix)), gram_(matrix_.transpose() * matrix_) {
  if (!matrix_.allFinite()) throw DomainError("operator matrix contains non-finite entries");
}

DataVector MatrixOperator::apply(const Vector& m) const {
  check_length(m.size(), domain_size(), "MatrixOperator::apply");
  return matrix_ * m;
}

Vector MatrixOperator::adjoint(const DataVector& d) const {
  check_length(d.size(), range_size(), "MatrixOperator::adjoint");
  return matrix_.transpose() * d;
}

Vector MatrixOperator::normal(const Vector& m) const {
  check_length(m.size(), domain_size(), "MatrixOperator::normal");
  return gram_ * m;
}

}  // namespace tvbound
