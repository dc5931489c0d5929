#include "tvbound/grid.hpp"

#include "tvbound/error.hpp"

#include <cmath>
#include <string>

namespace tvbound {

namespace {

void check_axis(int n, double h) {
  if (n < 2) {
    throw DomainError("grid axis must have at least 2 cells, got " + std::to_string(n));
  }
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw DomainError("grid spacing must be positive and finite");
  }
}

}  // namespace

Grid::Grid(int n, double h) : dims_{n}, spacing_{h} { check_axis(n, h); }

Grid::Grid(int nx, int ny, double hx, double hy) : dims_{nx, ny}, spacing_{hx, hy} {
  check_axis(nx, hx);
  check_axis(ny, hy);
}

Eigen::Index Grid::size() const {
  Eigen::Index n = 1;
  for (int d : dims_) n *= d;
  return n;
}

Eigen::Index Grid::stride(int axis) const {
  Eigen::Index s = 1;
  for (int a = ndim() - 1; a > axis; --a) s *= dims_[a];
  return s;
}

void require_same_grid(const Grid& a, const Grid& b, const char* what) {
  if (!(a == b)) throw DimensionError(std::string(what) + ": grid mismatch");
}

ModelVector::ModelVector(Grid g, Vector v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid.size()) {
    throw DimensionError("model has " + std::to_string(values.size()) + " values, grid has " +
                         std::to_string(grid.size()) + " cells");
  }
  if (!values.allFinite()) throw DomainError("model contains non-finite values");
}

ModelVector ModelVector::constant(const Grid& g, double value) {
  return ModelVector(g, Vector::Constant(g.size(), value));
}

GradField::GradField(Grid g, std::vector<Vector> c) : grid(std::move(g)), components(std::move(c)) {
  if (static_cast<int>(components.size()) != grid.ndim()) {
    throw DimensionError("gradient field needs one component per axis");
  }
  for (const auto& comp : components) {
    if (comp.size() != grid.size()) throw DimensionError("gradient component has wrong length");
    if (!comp.allFinite()) throw DomainError("gradient field contains non-finite values");
  }
}

GradField GradField::zeros(const Grid& g) {
  return GradField(g, std::vector<Vector>(g.ndim(), Vector::Zero(g.size())));
}

GradField& GradField::operator+=(const GradField& o) {
  require_same_grid(grid, o.grid, "GradField +=");
  for (std::size_t a = 0; a < components.size(); ++a) components[a] += o.components[a];
  return *this;
}

GradField& GradField::operator-=(const GradField& o) {
  require_same_grid(grid, o.grid, "GradField -=");
  for (std::size_t a = 0; a < components.size(); ++a) components[a] -= o.components[a];
  return *this;
}

GradField& GradField::operator*=(double s) {
  for (auto& c : components) c *= s;
  return *this;
}

double GradField::dot(const GradField& o) const {
  require_same_grid(grid, o.grid, "GradField dot");
  double s = 0.0;
  for (std::size_t a = 0; a < components.size(); ++a) s += components[a].dot(o.components[a]);
  return s;
}

double GradField::squared_norm() const {
  double s = 0.0;
  for (const auto& c : components) s += c.squaredNorm();
  return s;
}

double GradField::norm() const { return std::sqrt(squared_norm()); }

double GradField::l1_norm() const {
  double s = 0.0;
  for (const auto& c : components) s += c.lpNorm<1>();
  return s;
}

GradField operator+(GradField a, const GradField& b) { return a += b; }
GradField operator-(GradField a, const GradField& b) { return a -= b; }
GradField operator*(double s, GradField a) { return a *= s; }

Bounds::Bounds(ModelVector lo, ModelVector hi) : lower(std::move(lo)), upper(std::move(hi)) {
  require_same_grid(lower.grid, upper.grid, "Bounds");
  if ((lower.values.array() > upper.values.array()).any()) {
    throw DomainError("lower bound exceeds upper bound");
  }
}

Bounds Bounds::uniform(const Grid& g, double lo, double hi) {
  return Bounds(ModelVector::constant(g, lo), ModelVector::constant(g, hi));
}

}  // namespace tvbound
