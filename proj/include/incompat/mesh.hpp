#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <vector>

#include "incompat/tensor.hpp"

namespace incompat {

/// Axis-aligned box [origin, origin + size].
struct Box {
  Vec3 origin = Vec3::Zero();
  Vec3 size = Vec3::Ones();

  double volume() const { return size.prod(); }
  double diameter() const { return size.norm(); }
  bool contains(const Vec3& x) const {
    return ((x - origin).array() >= 0.0).all() && ((x - origin - size).array() <= 0.0).all();
  }
};

/// Structured hexahedral mesh of a box: trilinear elements, 2x2x2 Gauss rule.
///
/// Nodes and elements are numbered with x fastest. Gauss point g of an
/// element sits at local coordinates (gauss_coord(g & 1), gauss_coord(g >> 1 & 1),
/// gauss_coord(g >> 2 & 1)) in units of the cell size.
class HexMesh {
 public:
  static constexpr int kGaussPerCell = 8;

  HexMesh() = default;
  HexMesh(const Box& box, std::array<int, 3> cells);

  const Box& box() const { return box_; }
  const std::array<int, 3>& cells() const { return n_; }
  const Vec3& spacing() const { return h_; }

  std::size_t num_cells() const { return std::size_t(n_[0]) * n_[1] * n_[2]; }
  std::size_t num_nodes() const { return std::size_t(n_[0] + 1) * (n_[1] + 1) * (n_[2] + 1); }
  std::size_t num_gauss() const { return num_cells() * kGaussPerCell; }

  std::size_t cell_index(int i, int j, int k) const {
    return (std::size_t(k) * n_[1] + j) * n_[0] + i;
  }
  std::size_t node_index(int i, int j, int k) const {
    return (std::size_t(k) * (n_[1] + 1) + j) * (n_[0] + 1) + i;
  }
  std::array<int, 3> cell_ijk(std::size_t c) const {
    return {int(c % n_[0]), int((c / n_[0]) % n_[1]), int(c / (std::size_t(n_[0]) * n_[1]))};
  }
  std::array<int, 3> node_ijk(std::size_t n) const {
    const std::size_t nx = n_[0] + 1, ny = n_[1] + 1;
    return {int(n % nx), int((n / nx) % ny), int(n / (nx * ny))};
  }

  /// Node numbers of an element, local order a = ax + 2 ay + 4 az.
  std::array<std::size_t, 8> cell_nodes(std::size_t c) const;

  Vec3 node_position(std::size_t n) const;
  Vec3 cell_center(std::size_t c) const;
  Vec3 gauss_point(std::size_t c, int g) const;
  double gauss_weight() const { return h_.prod() / kGaussPerCell; }
  double cell_volume() const { return h_.prod(); }

  static double gauss_coord(int side);
  /// Local offset of Gauss point g in units of the spacing.
  static Vec3 gauss_offset(int g);

  /// Shape-function gradients (physical units) at Gauss point g, one row per local node.
  const Eigen::Matrix<double, 8, 3>& shape_gradients(int g) const { return grad_[g]; }
  /// Shape-function values at Gauss point g.
  static const Eigen::Matrix<double, 8, 1>& shape_values(int g);

 private:
  Box box_;
  std::array<int, 3> n_{0, 0, 0};
  Vec3 h_ = Vec3::Zero();
  std::array<Eigen::Matrix<double, 8, 3>, 8> grad_;
};

/// Matrix-valued field sampled at the Gauss points of a mesh.
class TensorField {
 public:
  TensorField() = default;
  explicit TensorField(const HexMesh& mesh) : mesh_(mesh), v_(mesh.num_gauss(), Mat3::Zero()) {}
  TensorField(const HexMesh& mesh, const std::function<Mat3(const Vec3&)>& f);

  const HexMesh& mesh() const { return mesh_; }
  std::size_t size() const { return v_.size(); }
  Mat3& operator[](std::size_t n) { return v_[n]; }
  const Mat3& operator[](std::size_t n) const { return v_[n]; }
  Mat3& at(std::size_t cell, int g) { return v_[cell * HexMesh::kGaussPerCell + g]; }
  const Mat3& at(std::size_t cell, int g) const { return v_[cell * HexMesh::kGaussPerCell + g]; }
  const std::vector<Mat3>& values() const { return v_; }

  TensorField& operator+=(const TensorField& o);
  TensorField& operator-=(const TensorField& o);
  TensorField& operator*=(double s);
  friend TensorField operator+(TensorField a, const TensorField& b) { return a += b; }
  friend TensorField operator-(TensorField a, const TensorField& b) { return a -= b; }
  friend TensorField operator*(double s, TensorField a) { return a *= s; }

  /// Integral over the mesh box.
  Mat3 integral() const;
  /// Integral of the Frobenius product with another field.
  double inner(const TensorField& o) const;
  /// Largest entry magnitude.
  double max_abs() const;
  bool all_finite() const;
  /// Average of the eight Gauss values of each cell.
  std::vector<Mat3> cell_averages() const;

 private:
  HexMesh mesh_;
  std::vector<Mat3> v_;
};

/// (int_Omega |f|^p)^(1/p), Gauss quadrature on the mesh samples, Frobenius norm pointwise.
double lp_norm(const TensorField& f, double p);

/// Nodal 3-vector field with trilinear interpolation.
class VectorField {
 public:
  VectorField() = default;
  explicit VectorField(const HexMesh& mesh) : mesh_(mesh), v_(mesh.num_nodes(), Vec3::Zero()) {}
  VectorField(const HexMesh& mesh, const std::function<Vec3(const Vec3&)>& f);

  const HexMesh& mesh() const { return mesh_; }
  std::size_t size() const { return v_.size(); }
  Vec3& operator[](std::size_t n) { return v_[n]; }
  const Vec3& operator[](std::size_t n) const { return v_[n]; }
  const std::vector<Vec3>& values() const { return v_; }

  VectorField& operator+=(const VectorField& o);
  VectorField& operator-=(const VectorField& o);
  VectorField& operator*=(double s);
  friend VectorField operator+(VectorField a, const VectorField& b) { return a += b; }
  friend VectorField operator-(VectorField a, const VectorField& b) { return a -= b; }
  friend VectorField operator*(double s, VectorField a) { return a *= s; }

  /// Du at the Gauss points, (Du)_ij = d u_i / d x_j.
  TensorField gradient() const;
  /// Value at Gauss point g of a cell.
  Vec3 value_at(std::size_t cell, int g) const;
  /// Integral of u over the box (Gauss quadrature).
  Vec3 integral() const;
  double max_abs() const;

 private:
  HexMesh mesh_;
  std::vector<Vec3> v_;
};

/// (int |u|^p + |Du|^p)^(1/p) by Gauss quadrature.
double w1p_norm(const VectorField& u, double p);

}  // namespace incompat
