#pragma once

#include "tvbound/grid.hpp"
#include "tvbound/linear_operator.hpp"

#include <cstdint>
#include <vector>

namespace tvbound {

/// Reservoir segment [0, A] at depth D observed from the surface over the
/// same segment. Model and data points sit at cell centres of uniform grids.
struct UpliftGeometry {
  double depth = 100.0;      ///< D, meters
  double aperture = 2000.0;  ///< A, meters
  int n_model = 200;
  int n_data = 200;

  /// Throws DomainError unless D > 0, A > 0 and both counts >= 2.
  void validate() const;

  double model_cell() const { return aperture / n_model; }
  double model_coord(int j) const { return (j + 0.5) * aperture / n_model; }
  double data_coord(int i) const { return (i + 0.5) * aperture / n_data; }
};

/// Zero-offset-normalized uplift kernel D^3 / (D^2 + r^2)^{3/2}.
double uplift_kernel(double depth, double offset);

/// Midpoint-rule discretization of the vertical-uplift integral
///   u(x) = int_0^A D^3 m(xi) / (D^2 + (x - xi)^2)^{3/2} dxi
/// with weights A / n_model.
class UpliftOperator final : public MatrixOperator {
 public:
  explicit UpliftOperator(const UpliftGeometry& geom);

  const UpliftGeometry& geometry() const { return geom_; }

 private:
  UpliftGeometry geom_;
};

/// Dense kernel matrix of UpliftOperator (n_data x n_model).
Eigen::MatrixXd uplift_matrix(const UpliftGeometry& geom);

DataVector uplift_apply(const ModelVector& m, const UpliftGeometry& geom);
ModelVector uplift_adjoint(const DataVector& u, const UpliftGeometry& geom);

/// One compartment [start, end) in meters carrying a constant value.
struct Block {
  double start = 0.0;
  double end = 0.0;
  double value = 0.0;
};

/// Piecewise-constant model on the 1-D grid of `geom`: a cell takes the value
/// of the last block containing its centre, 0 if none does. Throws
/// DomainError for blocks outside [0, A] or with start > end.
ModelVector make_blocky_model(const std::vector<Block>& blocks, const UpliftGeometry& geom);

/// 1-D model grid of `geom` in grid units (spacing 1).
Grid model_grid(const UpliftGeometry& geom);

/// d + eps with eps ~ N(0, (sigma_frac * max|d|)^2) i.i.d., seeded
/// deterministically. sigma_frac = 0 returns d unchanged.
DataVector add_noise(const DataVector& d, double sigma_frac, std::uint64_t seed);

}  // namespace tvbound
