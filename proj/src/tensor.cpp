#include "incompat/tensor.hpp"

#include <cmath>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

constexpr std::array<std::array<int, 2>, 6> kPairs = {{{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}}};

const std::array<Mat3, 6>& basis() {
  static const std::array<Mat3, 6> b = [] {
    std::array<Mat3, 6> out;
    const double r = 1.0 / std::sqrt(2.0);
    for (int a = 0; a < 6; ++a) {
      Mat3 e = Mat3::Zero();
      const auto [i, j] = kPairs[a];
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = r;
        e(j, i) = r;
      }
      out[a] = e;
    }
    return out;
  }();
  return b;
}

}  // namespace

Mat3 sym_basis(int a) { return basis()[a]; }

Vec6 to_mandel(const Mat3& m) {
  const double r = std::sqrt(2.0);
  Vec6 v;
  v << m(0, 0), m(1, 1), m(2, 2), 0.5 * r * (m(1, 2) + m(2, 1)), 0.5 * r * (m(0, 2) + m(2, 0)),
      0.5 * r * (m(0, 1) + m(1, 0));
  return v;
}

Mat3 from_mandel(const Vec6& v) {
  const double r = 1.0 / std::sqrt(2.0);
  Mat3 m;
  m << v(0), r * v(5), r * v(4),
       r * v(5), v(1), r * v(3),
       r * v(4), r * v(3), v(2);
  return m;
}

Tensor4 Tensor4::isotropic(double lambda, double mu) {
  Mat6 m = Mat6::Zero();
  m.topLeftCorner<3, 3>().setConstant(lambda);
  for (int a = 0; a < 6; ++a) m(a, a) += 2.0 * mu;
  return Tensor4(m);
}

Tensor4 Tensor4::from_upper_triangle(const std::array<double, 21>& coeffs) {
  Mat6 m;
  int n = 0;
  for (int a = 0; a < 6; ++a) {
    for (int b = a; b < 6; ++b) {
      m(a, b) = coeffs[n];
      m(b, a) = coeffs[n];
      ++n;
    }
  }
  return Tensor4(m);
}

Tensor4 Tensor4::from_components(const std::array<double, 81>& a, double tol) {
  auto at = [&](int i, int j, int h, int k) { return a[((i * 3 + j) * 3 + h) * 3 + k]; };
  double scale = 0.0;
  for (double v : a) scale = std::max(scale, std::abs(v));
  if (scale == 0.0) scale = 1.0;

  double defect = 0.0;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k) {
          const double v = at(i, j, h, k);
          defect = std::max({defect, std::abs(v - at(j, i, h, k)), std::abs(v - at(i, j, k, h)),
                             std::abs(v - at(h, k, i, j))});
        }
  if (defect / scale > tol) {
    throw SymmetryViolation("elasticity tensor symmetry defect " + std::to_string(defect / scale) +
                            " exceeds tolerance");
  }

  Mat6 m = Mat6::Zero();
  const auto& e = basis();
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int h = 0; h < 3; ++h)
            for (int k = 0; k < 3; ++k) s += e[p](i, j) * at(i, j, h, k) * e[q](h, k);
      m(p, q) = s;
    }
  return Tensor4(m);
}

std::array<double, 21> Tensor4::upper_triangle() const {
  std::array<double, 21> out{};
  int n = 0;
  for (int a = 0; a < 6; ++a)
    for (int b = a; b < 6; ++b) out[n++] = m_(a, b);
  return out;
}

double Tensor4::operator()(int i, int j, int h, int k) const {
  const auto& e = basis();
  double s = 0.0;
  for (int p = 0; p < 6; ++p) {
    if (e[p](i, j) == 0.0) continue;
    for (int q = 0; q < 6; ++q) s += e[p](i, j) * m_(p, q) * e[q](h, k);
  }
  return s;
}

std::array<double, 81> Tensor4::components() const {
  std::array<double, 81> out{};
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int h = 0; h < 3; ++h)
        for (int k = 0; k < 3; ++k) out[((i * 3 + j) * 3 + h) * 3 + k] = (*this)(i, j, h, k);
  return out;
}

Tensor4 Tensor4::inverse_on_sym() const { return Tensor4(Mat6(m_.inverse())); }

EllipticityResult check_ellipticity(const Tensor4& c, double c0, double c1) {
  // |xi + xi^T|^2 = 4 |sym xi|^2 and the basis is orthonormal, so the
  // relative eigenvalues are the eigenvalues of the 6x6 form divided by 4.
  Eigen::SelfAdjointEigenSolver<Mat6> es(c.mandel(), Eigen::EigenvaluesOnly);
  EllipticityResult r;
  r.min_relative = es.eigenvalues().minCoeff() / 4.0;
  r.max_relative = es.eigenvalues().maxCoeff() / 4.0;
  const double slack = 1e-12 * std::max({1.0, std::abs(c0), std::abs(c1)});
  r.pass = r.min_relative >= c0 - slack && r.max_relative <= c1 + slack;
  return r;
}

EllipticityResult check_ellipticity(const std::array<double, 81>& a, double c0, double c1) {
  return check_ellipticity(Tensor4::from_components(a), c0, c1);
}

}  // namespace incompat
