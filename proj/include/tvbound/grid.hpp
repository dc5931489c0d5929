#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <vector>

namespace tvbound {

using Vector = Eigen::VectorXd;

/// Uniform 1-D or 2-D cell grid. Values are stored with the last axis
/// varying fastest: cell (i, j) of a 2-D grid lives at i * dims[1] + j.
class Grid {
 public:
  /// 1-D grid of `n` cells with spacing `h`.
  explicit Grid(int n, double h = 1.0);
  /// 2-D grid of `nx` by `ny` cells.
  Grid(int nx, int ny, double hx, double hy);

  int ndim() const { return static_cast<int>(dims_.size()); }
  int dim(int axis) const { return dims_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  Eigen::Index size() const;

  /// Linear stride between neighbours along `axis`.
  Eigen::Index stride(int axis) const;

  bool operator==(const Grid& other) const = default;

 private:
  std::vector<int> dims_;
  std::vector<double> spacing_;
};

/// Model values on a grid. Construction validates size and finiteness.
struct ModelVector {
  Grid grid;
  Vector values;

  ModelVector(Grid g, Vector v);
  /// All-`value` model on `g`.
  static ModelVector constant(const Grid& g, double value);

  Eigen::Index size() const { return values.size(); }
};

/// One array per spatial axis, each of model length.
struct GradField {
  Grid grid;
  std::vector<Vector> components;

  GradField(Grid g, std::vector<Vector> c);
  static GradField zeros(const Grid& g);

  int ncomponents() const { return static_cast<int>(components.size()); }

  GradField& operator+=(const GradField& o);
  GradField& operator-=(const GradField& o);
  GradField& operator*=(double s);

  /// Sum over components of the Euclidean inner products.
  double dot(const GradField& o) const;
  double squared_norm() const;
  double norm() const;
  /// Sum of absolute values of every entry.
  double l1_norm() const;
};

GradField operator+(GradField a, const GradField& b);
GradField operator-(GradField a, const GradField& b);
GradField operator*(double s, GradField a);

/// Component-wise box m1 <= m <= m2 on a shared grid.
struct Bounds {
  ModelVector lower;
  ModelVector upper;

  Bounds(ModelVector lo, ModelVector hi);
  /// Same scalar bounds at every cell.
  static Bounds uniform(const Grid& g, double lo, double hi);

  const Grid& grid() const { return lower.grid; }
};

/// Throws DimensionError when `a` and `b` live on different grids.
void require_same_grid(const Grid& a, const Grid& b, const char* what);

}  // namespace tvbound
