#include "incompat/mesh.hpp"

#include <cmath>
#include <stdexcept>

namespace incompat {

double HexMesh::gauss_coord(int side) {
  const double d = 0.5 / std::sqrt(3.0);
  return side == 0 ? 0.5 - d : 0.5 + d;
}

Vec3 HexMesh::gauss_offset(int g) {
  return Vec3(gauss_coord(g & 1), gauss_coord((g >> 1) & 1), gauss_coord((g >> 2) & 1));
}

const Eigen::Matrix<double, 8, 1>& HexMesh::shape_values(int g) {
  static const std::array<Eigen::Matrix<double, 8, 1>, 8> table = [] {
    std::array<Eigen::Matrix<double, 8, 1>, 8> t;
    for (int q = 0; q < 8; ++q) {
      const Vec3 xi = gauss_offset(q);
      for (int a = 0; a < 8; ++a) {
        double n = 1.0;
        for (int d = 0; d < 3; ++d) n *= ((a >> d) & 1) ? xi(d) : 1.0 - xi(d);
        t[q](a) = n;
      }
    }
    return t;
  }();
  return table[g];
}

HexMesh::HexMesh(const Box& box, std::array<int, 3> cells) : box_(box), n_(cells) {
  for (int d = 0; d < 3; ++d) {
    if (n_[d] <= 0 || !(box_.size(d) > 0.0)) {
      throw std::invalid_argument("mesh needs positive resolution and box size");
    }
    h_(d) = box_.size(d) / n_[d];
  }
  for (int q = 0; q < 8; ++q) {
    const Vec3 xi = gauss_offset(q);
    for (int a = 0; a < 8; ++a) {
      for (int d = 0; d < 3; ++d) {
        double g = 1.0;
        for (int e = 0; e < 3; ++e) {
          const int bit = (a >> e) & 1;
          if (e == d) {
            g *= (bit ? 1.0 : -1.0) / h_(e);
          } else {
            g *= bit ? xi(e) : 1.0 - xi(e);
          }
        }
        grad_[q](a, d) = g;
      }
    }
  }
}

std::array<std::size_t, 8> HexMesh::cell_nodes(std::size_t c) const {
  const auto [i, j, k] = cell_ijk(c);
  std::array<std::size_t, 8> out;
  for (int a = 0; a < 8; ++a) out[a] = node_index(i + (a & 1), j + ((a >> 1) & 1), k + ((a >> 2) & 1));
  return out;
}

Vec3 HexMesh::node_position(std::size_t n) const {
  const auto [i, j, k] = node_ijk(n);
  return box_.origin + Vec3(i * h_(0), j * h_(1), k * h_(2));
}

Vec3 HexMesh::cell_center(std::size_t c) const {
  const auto [i, j, k] = cell_ijk(c);
  return box_.origin + Vec3((i + 0.5) * h_(0), (j + 0.5) * h_(1), (k + 0.5) * h_(2));
}

Vec3 HexMesh::gauss_point(std::size_t c, int g) const {
  const auto [i, j, k] = cell_ijk(c);
  const Vec3 off = gauss_offset(g);
  return box_.origin + Vec3((i + off(0)) * h_(0), (j + off(1)) * h_(1), (k + off(2)) * h_(2));
}

// --- TensorField ---------------------------------------------------------

TensorField::TensorField(const HexMesh& mesh, const std::function<Mat3(const Vec3&)>& f)
    : TensorField(mesh) {
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g) at(c, g) = f(mesh.gauss_point(c, g));
}

TensorField& TensorField::operator+=(const TensorField& o) {
  if (o.size() != size()) throw std::invalid_argument("tensor field size mismatch");
  for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += o.v_[n];
  return *this;
}

TensorField& TensorField::operator-=(const TensorField& o) {
  if (o.size() != size()) throw std::invalid_argument("tensor field size mismatch");
  for (std::size_t n = 0; n < v_.size(); ++n) v_[n] -= o.v_[n];
  return *this;
}

TensorField& TensorField::operator*=(double s) {
  for (auto& m : v_) m *= s;
  return *this;
}

Mat3 TensorField::integral() const {
  Mat3 s = Mat3::Zero();
  for (const auto& m : v_) s += m;
  return s * mesh_.gauss_weight();
}

double TensorField::inner(const TensorField& o) const {
  if (o.size() != size()) throw std::invalid_argument("tensor field size mismatch");
  double s = 0.0;
  for (std::size_t n = 0; n < v_.size(); ++n) s += dot(v_[n], o.v_[n]);
  return s * mesh_.gauss_weight();
}

double TensorField::max_abs() const {
  double m = 0.0;
  for (const auto& v : v_) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

bool TensorField::all_finite() const {
  for (const auto& v : v_)
    if (!v.allFinite()) return false;
  return true;
}

std::vector<Mat3> TensorField::cell_averages() const {
  std::vector<Mat3> out(mesh_.num_cells(), Mat3::Zero());
  for (std::size_t c = 0; c < out.size(); ++c) {
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g) out[c] += at(c, g);
    out[c] /= HexMesh::kGaussPerCell;
  }
  return out;
}

double lp_norm(const TensorField& f, double p) {
  if (f.size() == 0) return 0.0;
  double s = 0.0;
  for (const auto& m : f.values()) s += std::pow(m.norm(), p);
  return std::pow(s * f.mesh().gauss_weight(), 1.0 / p);
}

// --- VectorField ---------------------------------------------------------

VectorField::VectorField(const HexMesh& mesh, const std::function<Vec3(const Vec3&)>& f)
    : VectorField(mesh) {
  for (std::size_t n = 0; n < v_.size(); ++n) v_[n] = f(mesh.node_position(n));
}

VectorField& VectorField::operator+=(const VectorField& o) {
  if (o.size() != size()) throw std::invalid_argument("vector field size mismatch");
  for (std::size_t n = 0; n < v_.size(); ++n) v_[n] += o.v_[n];
  return *this;
}

VectorField& VectorField::operator-=(const VectorField& o) {
  if (o.size() != size()) throw std::invalid_argument("vector field size mismatch");
  for (std::size_t n = 0; n < v_.size(); ++n) v_[n] -= o.v_[n];
  return *this;
}

VectorField& VectorField::operator*=(double s) {
  for (auto& v : v_) v *= s;
  return *this;
}

TensorField VectorField::gradient() const {
  TensorField out(mesh_);
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c) {
    const auto nodes = mesh_.cell_nodes(c);
    Eigen::Matrix<double, 3, 8> ue;
    for (int a = 0; a < 8; ++a) ue.col(a) = v_[nodes[a]];
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g) out.at(c, g) = ue * mesh_.shape_gradients(g);
  }
  return out;
}

Vec3 VectorField::value_at(std::size_t cell, int g) const {
  const auto nodes = mesh_.cell_nodes(cell);
  const auto& n = HexMesh::shape_values(g);
  Vec3 s = Vec3::Zero();
  for (int a = 0; a < 8; ++a) s += n(a) * v_[nodes[a]];
  return s;
}

Vec3 VectorField::integral() const {
  Vec3 s = Vec3::Zero();
  for (std::size_t c = 0; c < mesh_.num_cells(); ++c)
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g) s += value_at(c, g);
  return s * mesh_.gauss_weight();
}

double VectorField::max_abs() const {
  double m = 0.0;
  for (const auto& v : v_) m = std::max(m, v.cwiseAbs().maxCoeff());
  return m;
}

double w1p_norm(const VectorField& u, double p) {
  const auto& mesh = u.mesh();
  const TensorField du = u.gradient();
  double s = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g)
      s += std::pow(u.value_at(c, g).norm(), p) + std::pow(du.at(c, g).norm(), p);
  return std::pow(s * mesh.gauss_weight(), 1.0 / p);
}

}  // namespace incompat
