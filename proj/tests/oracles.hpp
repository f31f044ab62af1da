#pragma once

// Closed-form references kept independent of the library's tensor code.

#include <Eigen/Dense>
#include <cmath>
#include <utility>
#include <vector>

namespace oracle {

using M3 = Eigen::Matrix3d;
using M6 = Eigen::Matrix<double, 6, 6>;

struct Iso {
  double lambda, mu;
  M3 stress(const M3& e) const { return lambda * e.trace() * M3::Identity() + 2.0 * mu * 0.5 * (e + e.transpose()); }
};

// Orthonormal basis of symmetric matrices, order 11 22 33 23 13 12.
inline M3 unit_strain(int a) {
  static const int p[6][2] = {{0, 0}, {1, 1}, {2, 2}, {1, 2}, {0, 2}, {0, 1}};
  M3 e = M3::Zero();
  const int i = p[a][0], j = p[a][1];
  if (i == j) {
    e(i, i) = 1.0;
  } else {
    e(i, j) = e(j, i) = 1.0 / std::sqrt(2.0);
  }
  return e;
}

inline double frob(const M3& a, const M3& b) { return (a.array() * b.array()).sum(); }

// Layers normal to e_axis with volume fractions f_p. In each layer the strain is
// E + sym(a_p x n) with the traction C_p(E + a_p x n) n = t equal across layers
// and <a_p> = 0, which is the exact periodic corrector of the laminate.
inline M6 laminate(const std::vector<std::pair<double, Iso>>& layers, int axis) {
  const Eigen::Vector3d n = Eigen::Vector3d::Unit(axis);
  M6 out;
  for (int a = 0; a < 6; ++a) {
    const M3 e = unit_strain(a);
    M3 kinv_mean = M3::Zero();
    Eigen::Vector3d rhs = Eigen::Vector3d::Zero();
    std::vector<M3> kinv;
    std::vector<Eigen::Vector3d> sn;
    for (const auto& [f, c] : layers) {
      const M3 k = (c.lambda + c.mu) * n * n.transpose() + c.mu * M3::Identity();
      kinv.push_back(k.inverse());
      sn.push_back(c.stress(e) * n);
      kinv_mean += f * kinv.back();
      rhs += f * kinv.back() * sn.back();
    }
    const Eigen::Vector3d t = kinv_mean.inverse() * rhs;
    M3 s = M3::Zero();
    for (std::size_t p = 0; p < layers.size(); ++p) {
      const Eigen::Vector3d jump = kinv[p] * (t - sn[p]);
      s += layers[p].first * layers[p].second.stress(e + jump * n.transpose());
    }
    for (int b = 0; b < 6; ++b) out(b, a) = frob(s, unit_strain(b));
  }
  return out;
}

}  // namespace oracle
