#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "incompat/curl_inverse.hpp"
#include "incompat/dislocation.hpp"
#include "incompat/errors.hpp"
#include "incompat/fem.hpp"
#include "incompat/neumann.hpp"

namespace incompat {

/// Decreasing filter widths (standard deviations of the Gaussian, length
/// units) and the relative W^{1,3/2} Cauchy tolerance.
struct MollificationSchedule {
  std::vector<double> widths;
  double tol = 1e-6;

  /// widths h/2, h/4, ..., h/2^K with h the largest mesh spacing. Widths below
  /// about h/20 leave Gauss-point data unchanged, so the tail of the schedule
  /// reproduces the unfiltered problem.
  static MollificationSchedule standard(const HexMesh& mesh, int stages = 6, double tol = 1e-6);
  /// Throws ConfigError unless the widths are positive and strictly decreasing.
  void validate() const;
};

/// Separable Gaussian filter on the Gauss-point lattice. Each axis pass is
/// renormalized per target point (no reflection at the box faces) and taps are
/// cut at 3 sigma, so a small enough sigma returns the field unchanged.
TensorField gaussian_filter(const TensorField& f, double sigma);

struct DualityStage {
  double width = 0.0;
  /// ||u_k - u_{k-1}||_{W^{1,3/2}} / ||u_{k-1}||_{W^{1,3/2}}; NaN for the first stage.
  double defect = 0.0;
  double forcing_change = 0.0;  // ||F_k - F||_{3/2} / ||F||_{3/2}
  SolverStats stats;
};

struct DualitySolution {
  VectorField u;
  std::vector<DualityStage> stages;
  bool converged = false;
};

class NotCauchy : public Error {
 public:
  NotCauchy(const std::string& what, DualitySolution partial)
      : Error("NotCauchy", ErrorClass::Solver, what), partial_(std::move(partial)) {}
  const DualitySolution& partial() const { return partial_; }

 private:
  DualitySolution partial_;
};

/// Duality solution as the limit of variational solutions with filtered data
/// F_k = filter(F, delta_k), each projected admissible and warm-started from
/// the previous stage. Stops when the W^{1,3/2} Cauchy defect drops below tol;
/// throws NotCauchy (carrying the last iterate and history) if the schedule runs out.
DualitySolution solve_duality(const ElasticOperator& op, const TensorField& f, const MollificationSchedule& schedule,
                              const SolverOptions& opts = {});
DualitySolution solve_duality(const ElasticTensorField& c, const TensorField& f,
                              const MollificationSchedule& schedule, const SolverOptions& opts = {});

struct DualityCheck {
  double lhs = 0.0;  // int G . Du, u the duality solution for F
  double rhs = 0.0;  // int F . Dv, v the variational solution for G
  double defect = 0.0;
};

/// |int G.Du - int F.Dv| / (||F||_{3/2} ||G||_3), both forcings projected admissible first.
DualityCheck verify_duality_identity(const ElasticOperator& op, const TensorField& f, const TensorField& g,
                                     const MollificationSchedule& schedule, const SolverOptions& opts = {});

struct IncompatibleProblem {
  ElasticTensorField c;
  LineMeasure measure;
  /// Mollification width; 0 selects 3 times the largest mesh spacing.
  double delta = 0.0;
  /// Padding cells per face; empty selects max(4 delta, 25% of the side).
  std::optional<std::array<int, 3>> pad;
  /// Empty widths select MollificationSchedule::standard.
  MollificationSchedule schedule;
  SolverOptions solver;
  /// Optional gauge potential w; the FE gradient of its nodal interpolant, with the
  /// rigid part removed, is added to beta^mu.
  std::function<Vec3(const Vec3&)> gauge;
};

struct SolveReport {
  // measure
  double total_variation = 0.0;
  double delta = 0.0;
  std::array<int, 3> grid_dims{0, 0, 0};
  Vec3 grid_origin = Vec3::Zero();
  Vec3 grid_spacing = Vec3::Zero();
  double deposit_mass = 0.0;
  double grid_mass = 0.0;
  double mean_correction = 0.0;
  double projection_change = 0.0;
  double measure_divergence = 0.0;
  // curl inverse
  double curl_residual = 0.0;
  double div_residual = 0.0;
  double gradient_curl_mismatch = 0.0;
  // forcing and duality solve
  double admissible_correction = 0.0;
  std::vector<DualityStage> stages;
  bool cauchy_converged = false;
  // result
  double beta_mu_norm = 0.0;  // ||beta^mu||_{3/2} on the mesh
  double beta_norm = 0.0;     // ||beta||_{3/2}
  double u_norm = 0.0;        // ||u||_{W^{1,3/2}}
  Mat3 mean_skew = Mat3::Zero();
  double estimate_ratio = 0.0;  // ||beta - mean skew||_{3/2} / |mu|, NaN when |mu| = 0
  double momentum_residual = 0.0;
  std::string momentum_worst;
  double rigid_translation = 0.0;  // |int u|
  double rigid_rotation = 0.0;     // |skew int Du|
  /// Wall-clock seconds per stage; kept out of report files so they stay reproducible.
  std::vector<std::pair<std::string, double>> timings;
};

struct IncompatibleSolution {
  TensorField beta;
  TensorField beta_mu;
  VectorField u;
  SolveReport report;
};

/// beta = beta^mu + Du: beta^mu from the periodic curl inverse of the
/// mollified measure restricted to the Gauss points, u the duality solution
/// for F = C beta^mu.
IncompatibleSolution solve_incompatible(const IncompatibleProblem& problem);

/// max over the test dictionary of |int C beta . D phi_h| / (||C beta||_{3/2} ||D phi_h||_3),
/// phi_h the nodal interpolants. Returns the value and the name of the worst entry.
std::pair<double, std::string> momentum_residual(const ElasticTensorField& c, const TensorField& beta);

/// max over interior faces of the jump of the tangential columns of Du,
/// relative to max |Du| (zero for a continuous trilinear u).
double gradient_curl_mismatch(const VectorField& u);

struct SkewQuotient {
  double distance = 0.0;  // min over constant skew K of ||d - K||_{3/2}
  Mat3 k = Mat3::Zero();
  int iterations = 0;
};

/// Iteratively reweighted least squares from the L2 minimizer (the mean skew part).
SkewQuotient skew_quotient_distance(const TensorField& d);

struct UniquenessReport {
  SkewQuotient quotient;
  double relative = 0.0;  // distance / ||beta_1||_{3/2}
};

/// Solves both problems (same mesh) and measures beta_1 - beta_2 modulo constant skew matrices.
UniquenessReport uniqueness_check(const IncompatibleProblem& a, const IncompatibleProblem& b);

}  // namespace incompat
