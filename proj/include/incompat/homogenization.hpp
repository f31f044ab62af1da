#pragma once

#include <array>
#include <string>
#include <vector>

#include "incompat/duality.hpp"
#include "incompat/fem.hpp"
#include "incompat/material.hpp"

namespace incompat {

/// Reference cell Y = [0,1]^3 with periodic coefficients C_Y.
struct UnitCell {
  ElasticTensorField c;

  /// Throws ConfigError unless the mesh is the unit cube.
  void validate() const;
};

/// Periodic correctors chi_a for the unit strains E_a = sym_basis(a), zero mean.
struct CellCorrectors {
  std::array<VectorField, 6> chi;
  std::array<SolverStats, 6> stats;
};

CellCorrectors cell_correctors(const UnitCell& cell, const SolverOptions& opts = {});

struct EffectiveTensor {
  Tensor4 c_hat;
  /// Cell energies C (E_a + D chi_a) . (E_a + D chi_a).
  std::array<double, 6> energies{};
  /// max |C_ab - C_ba| before symmetrization, relative to the largest entry.
  double asymmetry = 0.0;
  EllipticityResult ellipticity;
  /// Phase envelope: smallest and largest relative eigenvalue over the phases present.
  double envelope_min = 0.0, envelope_max = 0.0;
};

EffectiveTensor effective_tensor(const UnitCell& cell, const CellCorrectors& chi);

struct BoundCertificate {
  double voigt_gap = 0.0;  // min eig(<C> - C_hat)
  double reuss_gap = 0.0;  // min eig(C_hat - <C^-1>^-1)
  Vec6 voigt_vector = Vec6::Zero();
  Vec6 reuss_vector = Vec6::Zero();
  Vec6 reuss_spectrum = Vec6::Zero();  // all eigenvalues of C_hat - <C^-1>^-1, ascending
  bool pass = false;
};

/// Eigenvalue gaps of the Voigt and Reuss bounds as quadratic forms on symmetric
/// matrices (Mandel basis). pass iff both gaps >= -tol.
BoundCertificate voigt_reuss_gaps(const Tensor4& c_hat, const ElasticTensorField& cell, double tol = 1e-10);

/// Same, but throws BoundViolation naming the offending eigenvector.
BoundCertificate voigt_reuss_check(const Tensor4& c_hat, const ElasticTensorField& cell, double tol = 1e-10);

struct GStudyReport {
  std::vector<double> epsilons;
  std::vector<std::string> dictionary;
  /// d_G(eps) = |int G . (beta_eps - beta_0)| per epsilon and dictionary entry,
  /// both fields taken with their mean skew part removed.
  std::vector<std::vector<double>> d_g;
  std::vector<double> max_d_g;
  /// ||beta_eps - beta_0||_{3/2} / ||beta_0||_{3/2}.
  std::vector<double> strong_distance;
  std::vector<VmoReport> vmo;
  EffectiveTensor effective;
  BoundCertificate bounds;
  double beta0_norm = 0.0;
  /// max_d_g at the smallest epsilon below the largest, with at most one increase along the way.
  bool weak_trend = false;
  std::vector<SolveReport> runs;  // one per epsilon, then the homogenized run
};

/// For each eps (1/eps an integer dividing the mesh resolution) solve the
/// incompatible problem with C_Y(x / eps); once more with the constant
/// effective tensor; compare on the test dictionary. `base` provides the mesh
/// (through base.c), measure and solver settings; its c is replaced per run.
GStudyReport gconv_study(const UnitCell& cell, const IncompatibleProblem& base, const std::vector<double>& epsilons,
                         const SolverOptions& cell_opts = {});

/// |int G . (a - b)| for every dictionary gradient G, after removing mean skew parts.
std::vector<double> weak_functionals(const TensorField& a, const TensorField& b);

/// Remove the mean skew part (1/|Omega|) skew int f.
TensorField remove_mean_skew(const TensorField& f);

}  // namespace incompat
