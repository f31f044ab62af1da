#pragma once

#include <Eigen/Dense>
#include <array>

namespace incompat {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec6 = Eigen::Matrix<double, 6, 1>;
using Mat6 = Eigen::Matrix<double, 6, 6>;

inline Mat3 sym(const Mat3& m) { return 0.5 * (m + m.transpose()); }
inline Mat3 skew(const Mat3& m) { return 0.5 * (m - m.transpose()); }

/// Frobenius inner product.
inline double dot(const Mat3& a, const Mat3& b) { return (a.array() * b.array()).sum(); }

/// Orthonormal basis of the symmetric matrices, ordered 11, 22, 33, 23, 13, 12.
/// The off-diagonal elements are (e_i (x) e_j + e_j (x) e_i) / sqrt(2).
Mat3 sym_basis(int a);

/// Coordinates of sym(m) in the orthonormal basis above (Mandel form).
Vec6 to_mandel(const Mat3& m);
Mat3 from_mandel(const Vec6& v);

/// Fourth-order elasticity tensor with minor and major symmetry.
///
/// Stored as the symmetric 6x6 matrix of the quadratic form C xi . xi restricted
/// to symmetric matrices, expressed in the orthonormal basis returned by
/// sym_basis(). Because the basis is orthonormal the eigenvalues of this matrix
/// are the eigenvalues of the quadratic form itself.
class Tensor4 {
 public:
  Tensor4() : m_(Mat6::Zero()) {}

  /// Takes the 6x6 form; it is symmetrized, so callers that need a symmetry
  /// check should go through from_components().
  explicit Tensor4(const Mat6& mandel) : m_(0.5 * (mandel + mandel.transpose())) {}

  static Tensor4 isotropic(double lambda, double mu);

  /// Row-major upper triangle of the 6x6 form (21 entries).
  static Tensor4 from_upper_triangle(const std::array<double, 21>& coeffs);

  /// Full component array a_ij^hk, index ((i*3 + j)*3 + h)*3 + k. Throws
  /// SymmetryViolation if minor or major symmetry fails by more than tol
  /// (absolute, after normalizing by the largest entry).
  static Tensor4 from_components(const std::array<double, 81>& a, double tol = 1e-12);

  const Mat6& mandel() const { return m_; }
  std::array<double, 21> upper_triangle() const;
  std::array<double, 81> components() const;

  /// Component a_ij^hk.
  double operator()(int i, int j, int h, int k) const;

  Mat3 apply(const Mat3& xi) const { return from_mandel(m_ * to_mandel(xi)); }

  /// Inverse on the symmetric subspace.
  Tensor4 inverse_on_sym() const;

  double norm() const { return m_.norm(); }

  Tensor4 operator+(const Tensor4& o) const { return Tensor4(m_ + o.m_); }
  Tensor4 operator-(const Tensor4& o) const { return Tensor4(m_ - o.m_); }
  Tensor4 operator*(double s) const { return Tensor4(m_ * s); }
  friend Tensor4 operator*(double s, const Tensor4& t) { return t * s; }

 private:
  Mat6 m_;
};

inline Mat3 apply_tensor(const Tensor4& c, const Mat3& xi) { return c.apply(xi); }

struct EllipticityResult {
  bool pass = false;
  // Extremal eigenvalues of C xi . xi relative to |xi + xi^T|^2 on symmetric xi.
  double min_relative = 0.0;
  double max_relative = 0.0;
};

/// Two-sided bound c0 |xi+xi^T|^2 <= C xi.xi <= c1 |xi+xi^T|^2.
EllipticityResult check_ellipticity(const Tensor4& c, double c0, double c1);

/// Same, from raw components: the symmetry check runs first.
EllipticityResult check_ellipticity(const std::array<double, 81>& a, double c0, double c1);

}  // namespace incompat
