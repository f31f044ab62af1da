#include "incompat/dictionary.hpp"

#include <array>

namespace incompat {

std::vector<TestField> test_dictionary(const Box& box) {
  const Vec3 o = box.origin, l = box.size;
  const Vec3 inv = l.cwiseInverse();
  auto coords = [o, l](const Vec3& x) -> Vec3 { return (x - o).cwiseQuotient(l) - Vec3::Constant(0.5); };
  // d/dx_j = (1 / l_j) d/dt_j
  auto chain = [inv](const Mat3& dt) -> Mat3 { return dt * inv.asDiagonal(); };

  std::vector<TestField> out;
  for (int a = 0; a < 6; ++a) {
    const Mat3 s = sym_basis(a);
    out.push_back({"linear_" + std::to_string(a), [=](const Vec3& x) { return Vec3(s * coords(x)); },
                   [=](const Vec3&) { return chain(s); }});
  }
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) {
      out.push_back({"quadratic_" + std::to_string(i) + std::to_string(j),
                     [=](const Vec3& x) {
                       const double t = coords(x)(j);
                       return Vec3(t * t * Vec3::Unit(i));
                     },
                     [=](const Vec3& x) {
                       Mat3 g = Mat3::Zero();
                       g(i, j) = 2.0 * coords(x)(j);
                       return chain(g);
                     }});
    }
  for (int i = 0; i < 3; ++i) {
    out.push_back({"cubic_xyz_" + std::to_string(i),
                   [=](const Vec3& x) {
                     const Vec3 t = coords(x);
                     return Vec3(t.prod() * Vec3::Unit(i));
                   },
                   [=](const Vec3& x) {
                     const Vec3 t = coords(x);
                     Mat3 g = Mat3::Zero();
                     g(i, 0) = t(1) * t(2);
                     g(i, 1) = t(0) * t(2);
                     g(i, 2) = t(0) * t(1);
                     return chain(g);
                   }});
  }
  for (int i = 0; i < 3; ++i) {
    const int r = (i + 1) % 3;
    out.push_back({"cubic_" + std::to_string(i),
                   [=](const Vec3& x) {
                     const double t = coords(x)(i);
                     return Vec3(t * t * t * Vec3::Unit(r));
                   },
                   [=](const Vec3& x) {
                     const double t = coords(x)(i);
                     Mat3 g = Mat3::Zero();
                     g(r, i) = 3.0 * t * t;
                     return chain(g);
                   }});
  }
  const double radius = 0.3;
  const std::array<Vec3, 3> centres = {Vec3(0.1, -0.1, 0.05), Vec3(-0.15, 0.1, -0.1), Vec3(0.0, 0.15, 0.15)};
  for (int a = 0; a < 3; ++a) {
    const Vec3 c = centres[a];
    const Mat3 s = sym_basis(a) + sym_basis(3 + a);
    out.push_back({"bump_" + std::to_string(a),
                   [=](const Vec3& x) {
                     const Vec3 d = coords(x) - c;
                     const double q = 1.0 - d.squaredNorm() / (radius * radius);
                     if (q <= 0.0) return Vec3(Vec3::Zero());
                     return Vec3(q * q * q * (s * d));
                   },
                   [=](const Vec3& x) {
                     const Vec3 d = coords(x) - c;
                     const double q = 1.0 - d.squaredNorm() / (radius * radius);
                     if (q <= 0.0) return Mat3(Mat3::Zero());
                     const Vec3 db = -6.0 * q * q * d / (radius * radius);
                     return chain(q * q * q * s + (s * d) * db.transpose());
                   }});
  }
  return out;
}

TensorField sample_gradient(const HexMesh& mesh, const TestField& f) { return TensorField(mesh, f.grad); }

VectorField sample_field(const HexMesh& mesh, const TestField& f) { return VectorField(mesh, f.phi); }

}  // namespace incompat
