#pragma once

#include <array>

#include "incompat/fem.hpp"
#include "incompat/material.hpp"
#include "incompat/mesh.hpp"

namespace incompat {

/// Three translations and three infinitesimal rotations x -> xi x + b, xi skew,
/// sampled at the mesh nodes.
struct RigidMotionBasis {
  std::array<VectorField, 6> fields;
  /// Gram matrix of the fields in L2 (Gauss quadrature).
  Eigen::Matrix<double, 6, 6> gram;

  explicit RigidMotionBasis(const HexMesh& mesh);
};

/// Forcing H - mean skew part, so that int F is symmetric.
struct AdmissibleForcing {
  TensorField forcing;
  Mat3 correction = Mat3::Zero();  // the subtracted constant skew matrix
  double correction_norm = 0.0;
};

AdmissibleForcing project_admissible(const TensorField& h);

/// Removes the rigid motion that makes int u = 0 and skew(int Du) = 0.
VectorField project_rigid(const VectorField& u);

struct NeumannSolution {
  VectorField u;
  SolverStats stats;
};

/// Traction-free problem int C Du . Dphi = -int F . Dphi for all discrete phi,
/// solution normalized into the rigid-motion complement. Throws NotAdmissible
/// if |skew int F| exceeds 1e-10 relative to int |F|, NoConvergence if the
/// iteration cap is reached. `warm_start`, if non-empty, seeds the iteration.
NeumannSolution solve_neumann(const ElasticTensorField& c, const TensorField& f, const SolverOptions& opts = {},
                              const VectorField* warm_start = nullptr);
NeumannSolution solve_neumann(const ElasticTensorField& c, const AdmissibleForcing& f,
                              const SolverOptions& opts = {}, const VectorField* warm_start = nullptr);

/// Same solve on a prebuilt operator (reused across many right-hand sides).
NeumannSolution solve_neumann(const ElasticOperator& op, const TensorField& f, const SolverOptions& opts,
                              const VectorField* warm_start = nullptr);

struct KornEstimate {
  /// Smallest eigenvalue of int C Du.Du / int |u|^2 on the rigid-motion complement.
  double min_eigenvalue = 0.0;
  /// Largest Rayleigh quotient over the rigid basis; ~0 confirms the kernel.
  double rigid_rayleigh_max = 0.0;
  int iterations = 0;
};

/// Projected block inverse iteration with Rayleigh-Ritz on the discrete space.
KornEstimate korn_coercivity_check(const ElasticTensorField& c, const SolverOptions& opts = {},
                                   int block = 4, int max_iterations = 60, double tol = 1e-9);

}  // namespace incompat
