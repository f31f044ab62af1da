#pragma once

#include <functional>
#include <string>
#include <vector>

#include "incompat/mesh.hpp"

namespace incompat {

/// Smooth vector test field phi with its analytic gradient.
struct TestField {
  std::string name;
  std::function<Vec3(const Vec3&)> phi;
  std::function<Mat3(const Vec3&)> grad;
};

/// Fixed family of 24 smooth test fields on a box, in centred coordinates
/// t = (x - origin) / size - 1/2:
///   linear   S_a t                      (6, S_a orthonormal symmetric)
///   quadratic t_j^2 e_i                 (9)
///   cubic    t0 t1 t2 e_i, t_i^3 e_{i+1} (6)
///   bump     b(t - c_a) S_a (t - c_a)    (3, b = (1 - |s|^2 / R^2)^3, R = 0.3)
std::vector<TestField> test_dictionary(const Box& box);

/// Analytic gradient sampled at the Gauss points.
TensorField sample_gradient(const HexMesh& mesh, const TestField& f);

/// Nodal interpolant of phi.
VectorField sample_field(const HexMesh& mesh, const TestField& f);

}  // namespace incompat
