#include "incompat/neumann.hpp"

#include <cmath>
#include <random>
#include <sstream>

#include "incompat/errors.hpp"

namespace incompat {

RigidMotionBasis::RigidMotionBasis(const HexMesh& mesh) {
  const Vec3 centre = mesh.box().origin + 0.5 * mesh.box().size;
  for (int i = 0; i < 3; ++i) {
    fields[i] = VectorField(mesh, [i](const Vec3&) { return Vec3(Vec3::Unit(i)); });
    fields[3 + i] = VectorField(mesh, [i, centre](const Vec3& x) { return Vec3(Vec3::Unit(i).cross(x - centre)); });
  }
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) {
      double s = 0.0;
      for (std::size_t c = 0; c < mesh.num_cells(); ++c)
        for (int g = 0; g < HexMesh::kGaussPerCell; ++g) s += fields[a].value_at(c, g).dot(fields[b].value_at(c, g));
      gram(a, b) = s * mesh.gauss_weight();
    }
}

AdmissibleForcing project_admissible(const TensorField& h) {
  AdmissibleForcing out;
  const double vol = h.mesh().box().volume();
  out.correction = skew(h.integral()) / vol;
  out.correction_norm = out.correction.norm();
  out.forcing = h;
  for (std::size_t n = 0; n < out.forcing.size(); ++n) out.forcing[n] -= out.correction;
  return out;
}

VectorField project_rigid(const VectorField& u) {
  const HexMesh& mesh = u.mesh();
  const double vol = mesh.box().volume();
  const Vec3 centre = mesh.box().origin + 0.5 * mesh.box().size;
  const Mat3 xi = skew(u.gradient().integral()) / vol;
  VectorField out = u;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] -= xi * (mesh.node_position(n) - centre);
  const Vec3 b = out.integral() / vol;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] -= b;
  return out;
}

NeumannSolution solve_neumann(const ElasticOperator& op, const TensorField& f, const SolverOptions& opts,
                              const VectorField* warm_start) {
  if (!f.all_finite()) throw NotAdmissible("forcing field has non-finite entries");
  double l1 = 0.0;
  for (const auto& m : f.values()) l1 += m.norm();
  l1 *= f.mesh().gauss_weight();
  const double skew_defect = skew(f.integral()).norm();
  if (skew_defect > 1e-10 * l1) {
    std::ostringstream os;
    os << "forcing violates the compatibility condition: |skew int F| = " << skew_defect
       << " relative " << skew_defect / l1;
    throw NotAdmissible(os.str());
  }

  const Eigen::VectorXd b = op.load(f);
  Eigen::VectorXd x = warm_start ? op.to_dofs(*warm_start) : Eigen::VectorXd::Zero(op.num_dofs());
  NeumannSolution sol;
  sol.stats = projected_cg(op, b, x, opts);
  if (!sol.stats.converged) {
    std::ostringstream os;
    os << "conjugate gradients stopped after " << sol.stats.iterations
       << " iterations at relative residual " << sol.stats.relative_residual;
    throw NoConvergence(os.str());
  }
  sol.u = op.kind() == BoundaryKind::Free ? project_rigid(op.to_field(x)) : op.to_field(x);
  return sol;
}

NeumannSolution solve_neumann(const ElasticTensorField& c, const TensorField& f, const SolverOptions& opts,
                              const VectorField* warm_start) {
  const ElasticOperator op(c, BoundaryKind::Free, opts.threads);
  return solve_neumann(op, f, opts, warm_start);
}

NeumannSolution solve_neumann(const ElasticTensorField& c, const AdmissibleForcing& f, const SolverOptions& opts,
                              const VectorField* warm_start) {
  return solve_neumann(c, f.forcing, opts, warm_start);
}

KornEstimate korn_coercivity_check(const ElasticTensorField& c, const SolverOptions& opts, int block,
                                   int max_iterations, double tol) {
  const ElasticOperator op(c, BoundaryKind::Free, opts.threads);
  const Eigen::Index n = op.num_dofs();
  const Eigen::MatrixXd& r = op.kernel();

  Eigen::MatrixXd mr(n, r.cols());
  {
    Eigen::VectorXd y;
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      op.apply_mass(r.col(j), y);
      mr.col(j) = y;
    }
  }
  const Eigen::MatrixXd rmr = r.transpose() * mr;
  auto m_project = [&](Eigen::VectorXd& x) { x -= r * rmr.ldlt().solve(mr.transpose() * x); };

  KornEstimate est;
  {
    Eigen::VectorXd ar, mrv;
    for (Eigen::Index j = 0; j < r.cols(); ++j) {
      op.apply(r.col(j), ar);
      est.rigid_rayleigh_max = std::max(est.rigid_rayleigh_max, r.col(j).dot(ar) / r.col(j).dot(mr.col(j)));
    }
  }

  std::mt19937_64 rng(12345);
  std::uniform_real_distribution<double> uni(-1.0, 1.0);
  Eigen::MatrixXd x(n, block);
  for (Eigen::Index i = 0; i < n; ++i)
    for (int j = 0; j < block; ++j) x(i, j) = uni(rng);

  SolverOptions inner = opts;
  inner.rtol = std::min(opts.rtol, 1e-10);
  double prev = 0.0;
  Eigen::VectorXd tmp, y;
  for (int it = 0; it < max_iterations; ++it) {
    Eigen::MatrixXd yb(n, block);
    for (int j = 0; j < block; ++j) {
      Eigen::VectorXd xj = x.col(j);
      m_project(xj);
      op.apply_mass(xj, tmp);
      y = Eigen::VectorXd::Zero(n);
      projected_cg(op, tmp, y, inner);
      m_project(y);
      yb.col(j) = y;
    }
    // Rayleigh-Ritz on span(yb).
    Eigen::MatrixXd ay(n, block), my(n, block);
    for (int j = 0; j < block; ++j) {
      op.apply(yb.col(j), tmp);
      ay.col(j) = tmp;
      op.apply_mass(yb.col(j), tmp);
      my.col(j) = tmp;
    }
    Eigen::MatrixXd ka = yb.transpose() * ay, km = yb.transpose() * my;
    ka = 0.5 * (ka + ka.transpose());
    km = 0.5 * (km + km.transpose());
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(ka, km);
    x = yb * ges.eigenvectors();
    for (int j = 0; j < block; ++j) x.col(j).normalize();
    const double lam = ges.eigenvalues()(0);
    est.min_eigenvalue = lam;
    est.iterations = it + 1;
    if (it > 0 && std::abs(lam - prev) <= tol * std::abs(lam)) break;
    prev = lam;
  }
  return est;
}

}  // namespace incompat
