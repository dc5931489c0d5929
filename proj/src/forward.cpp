#include "tvbound/forward.hpp"

#include "tvbound/error.hpp"

#include <cmath>
#include <random>
#include <string>

namespace tvbound {

void UpliftGeometry::validate() const {
  if (!(depth > 0.0) || !std::isfinite(depth)) throw DomainError("depth must be positive");
  if (!(aperture > 0.0) || !std::isfinite(aperture)) throw DomainError("aperture must be positive");
  if (n_model < 2) throw DomainError("n_model must be at least 2");
  if (n_data < 2) throw DomainError("n_data must be at least 2");
}

double uplift_kernel(double depth, double offset) {
  const double r2 = depth * depth + offset * offset;
  return depth * depth * depth / (r2 * std::sqrt(r2));
}

Eigen::MatrixXd uplift_matrix(const UpliftGeometry& geom) {
  geom.validate();
  const double w = geom.model_cell();
  Eigen::MatrixXd k(geom.n_data, geom.n_model);
  for (int i = 0; i < geom.n_data; ++i) {
    const double x = geom.data_coord(i);
    for (int j = 0; j < geom.n_model; ++j) {
      k(i, j) = w * uplift_kernel(geom.depth, x - geom.model_coord(j));
    }
  }
  return k;
}

UpliftOperator::UpliftOperator(const UpliftGeometry& geom)
    : MatrixOperator(uplift_matrix(geom)), geom_(geom) {}

DataVector uplift_apply(const ModelVector& m, const UpliftGeometry& geom) {
  if (m.size() != geom.n_model) {
    throw DimensionError("uplift_apply: model has " + std::to_string(m.size()) + " cells, geometry expects " +
                         std::to_string(geom.n_model));
  }
  return uplift_matrix(geom) * m.values;
}

ModelVector uplift_adjoint(const DataVector& u, const UpliftGeometry& geom) {
  if (u.size() != geom.n_data) {
    throw DimensionError("uplift_adjoint: data has " + std::to_string(u.size()) + " samples, geometry expects " +
                         std::to_string(geom.n_data));
  }
  return ModelVector(model_grid(geom), uplift_matrix(geom).transpose() * u);
}

Grid model_grid(const UpliftGeometry& geom) { return Grid(geom.n_model, 1.0); }

ModelVector make_blocky_model(const std::vector<Block>& blocks, const UpliftGeometry& geom) {
  geom.validate();
  Vector v = Vector::Zero(geom.n_model);
  for (const Block& b : blocks) {
    if (!(b.start >= 0.0) || !(b.end <= geom.aperture) || !(b.start <= b.end)) {
      throw DomainError("block [" + std::to_string(b.start) + ", " + std::to_string(b.end) +
                        ") is not inside [0, " + std::to_string(geom.aperture) + "]");
    }
    if (!std::isfinite(b.value)) throw DomainError("block value must be finite");
    for (int j = 0; j < geom.n_model; ++j) {
      const double xi = geom.model_coord(j);
      if (xi >= b.start && xi < b.end) v[j] = b.value;
    }
  }
  return ModelVector(model_grid(geom), std::move(v));
}

DataVector add_noise(const DataVector& d, double sigma_frac, std::uint64_t seed) {
  if (!(sigma_frac >= 0.0)) throw DomainError("sigma_frac must be non-negative");
  if (sigma_frac == 0.0 || d.size() == 0) return d;
  const double sigma = sigma_frac * d.cwiseAbs().maxCoeff();
  if (sigma == 0.0) return d;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, sigma);
  DataVector out = d;
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] += normal(rng);
  return out;
}

}  // namespace tvbound
