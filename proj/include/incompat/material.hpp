#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "incompat/mesh.hpp"
#include "incompat/tensor.hpp"

namespace incompat {

/// Cell-wise elasticity tensor over the cells of a HexMesh.
///
/// Stored as a palette of distinct tensors plus one palette index per cell;
/// all generators produce a handful of phases, which keeps element stiffness
/// matrices shareable.
class ElasticTensorField {
 public:
  ElasticTensorField() = default;
  ElasticTensorField(const HexMesh& mesh, std::vector<Tensor4> palette, std::vector<std::uint16_t> phase);

  static ElasticTensorField constant(const HexMesh& mesh, const Tensor4& c);
  static ElasticTensorField isotropic(const HexMesh& mesh, double lambda, double mu) {
    return constant(mesh, Tensor4::isotropic(lambda, mu));
  }
  /// Layers normal to coordinate axis `axis`: phase_a occupies the first `fraction`
  /// of every period. Throws std::invalid_argument unless the interfaces fall on
  /// cell faces.
  static ElasticTensorField laminate(const HexMesh& mesh, int axis, double fraction, const Tensor4& phase_a,
                                     const Tensor4& phase_b, double period);
  /// C(x) = C_Y((x - origin) / eps) where cell is defined on the unit cube.
  static ElasticTensorField periodic_sampled(const HexMesh& mesh, const ElasticTensorField& cell, double eps);

  const HexMesh& mesh() const { return mesh_; }
  const std::vector<Tensor4>& palette() const { return palette_; }
  const std::vector<std::uint16_t>& phases() const { return phase_; }
  const Tensor4& at(std::size_t cell) const { return palette_[phase_[cell]]; }

  /// Volume average <C>.
  Tensor4 mean() const;
  /// (<C^-1>)^-1, inverses on symmetric matrices.
  Tensor4 harmonic_mean() const;
  ElasticTensorField scaled(double s) const;
  /// Worst-case ellipticity over all cells.
  EllipticityResult check_ellipticity(double c0, double c1) const;
  /// Volume fraction of each palette entry.
  std::vector<double> fractions() const;

 private:
  HexMesh mesh_;
  std::vector<Tensor4> palette_;
  std::vector<std::uint16_t> phase_;
};

/// Apply the cell tensor pointwise to a Gauss-point field.
TensorField apply_tensor(const ElasticTensorField& c, const TensorField& beta);

struct VmoReport {
  std::vector<double> radii;     // after clamping to diam(Omega)
  std::vector<double> modulus;   // omega(r_i)
  std::vector<bool> clamped;
  bool monotone = true;          // omega non-increasing as r decreases
  int center_stride = 1;         // ball centers: every stride-th cell center per axis
  std::string lattice;           // description of the ball lattice
};

/// Mean-oscillation modulus sup_{B_rho, rho <= r} avg_B |C - avg_B C| approximated
/// over balls centred at cell centres with rho in {r, r/2, r/4}. Balls are
/// intersected with Omega and discretized by cell-centre membership.
VmoReport vmo_modulus(const ElasticTensorField& field, const std::vector<double>& radii, int max_centers = 4096);

}  // namespace incompat
