#include "incompat/homogenization.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>
#include <sstream>

#include "incompat/dictionary.hpp"

namespace incompat {

namespace {

std::string format_vector(const Vec6& v) {
  std::ostringstream os;
  os << "[";
  for (int i = 0; i < 6; ++i) os << (i ? ", " : "") << v(i);
  os << "]";
  return os.str();
}

}  // namespace

void UnitCell::validate() const {
  const Box& b = c.mesh().box();
  if (b.origin.norm() != 0.0 || (b.size - Vec3::Ones()).norm() != 0.0)
    throw ConfigError("unit cell mesh must cover [0,1]^3");
  if (c.palette().empty()) throw ConfigError("unit cell has no material");
}

CellCorrectors cell_correctors(const UnitCell& cell, const SolverOptions& opts) {
  cell.validate();
  const HexMesh& mesh = cell.c.mesh();
  const ElasticOperator op(cell.c, BoundaryKind::Periodic, opts.threads);
  const double vol = mesh.box().volume();
  CellCorrectors out;
  for (int a = 0; a < 6; ++a) {
    const Mat3 e = sym_basis(a);
    const TensorField f = apply_tensor(cell.c, TensorField(mesh, [&](const Vec3&) { return e; }));
    Eigen::VectorXd x = Eigen::VectorXd::Zero(op.num_dofs());
    out.stats[a] = projected_cg(op, op.load(f), x, opts);
    if (!out.stats[a].converged) {
      std::ostringstream os;
      os << "cell problem " << a << " did not converge: relative residual " << out.stats[a].relative_residual
         << " after " << out.stats[a].iterations << " iterations";
      throw NoConvergence(os.str());
    }
    VectorField chi = op.to_field(x);
    const Vec3 mean = chi.integral() / vol;
    for (std::size_t n = 0; n < chi.size(); ++n) chi[n] -= mean;
    out.chi[a] = std::move(chi);
  }
  return out;
}

EffectiveTensor effective_tensor(const UnitCell& cell, const CellCorrectors& chi) {
  const HexMesh& mesh = cell.c.mesh();
  const double vol = mesh.box().volume();
  std::array<TensorField, 6> strain, stress;
  for (int a = 0; a < 6; ++a) {
    const Mat3 e = sym_basis(a);
    strain[a] = chi.chi[a].gradient();
    for (std::size_t n = 0; n < strain[a].size(); ++n) strain[a][n] += e;
    stress[a] = apply_tensor(cell.c, strain[a]);
  }
  Mat6 m;
  for (int a = 0; a < 6; ++a)
    for (int b = 0; b < 6; ++b) m(a, b) = stress[a].inner(strain[b]) / vol;

  EffectiveTensor out;
  out.asymmetry = (m - m.transpose()).cwiseAbs().maxCoeff() / m.cwiseAbs().maxCoeff();
  out.c_hat = Tensor4(m);
  for (int a = 0; a < 6; ++a) out.energies[a] = m(a, a);

  out.envelope_min = std::numeric_limits<double>::infinity();
  out.envelope_max = -std::numeric_limits<double>::infinity();
  const auto frac = cell.c.fractions();
  for (std::size_t p = 0; p < frac.size(); ++p) {
    if (frac[p] == 0.0) continue;
    const auto e = check_ellipticity(cell.c.palette()[p], 0.0, 0.0);
    out.envelope_min = std::min(out.envelope_min, e.min_relative);
    out.envelope_max = std::max(out.envelope_max, e.max_relative);
  }
  out.ellipticity = check_ellipticity(out.c_hat, out.envelope_min, out.envelope_max);
  return out;
}

BoundCertificate voigt_reuss_gaps(const Tensor4& c_hat, const ElasticTensorField& cell, double tol) {
  BoundCertificate out;
  const Mat6 v = cell.mean().mandel() - c_hat.mandel();
  const Mat6 r = c_hat.mandel() - cell.harmonic_mean().mandel();
  Eigen::SelfAdjointEigenSolver<Mat6> ev(0.5 * (v + v.transpose()));
  Eigen::SelfAdjointEigenSolver<Mat6> er(0.5 * (r + r.transpose()));
  out.voigt_gap = ev.eigenvalues()(0);
  out.voigt_vector = ev.eigenvectors().col(0);
  out.reuss_gap = er.eigenvalues()(0);
  out.reuss_vector = er.eigenvectors().col(0);
  out.reuss_spectrum = er.eigenvalues();
  out.pass = out.voigt_gap >= -tol && out.reuss_gap >= -tol;
  return out;
}

BoundCertificate voigt_reuss_check(const Tensor4& c_hat, const ElasticTensorField& cell, double tol) {
  const BoundCertificate b = voigt_reuss_gaps(c_hat, cell, tol);
  if (b.voigt_gap < -tol) {
    std::ostringstream os;
    os << "Voigt bound violated: eigenvalue " << b.voigt_gap << " along Mandel vector " << format_vector(b.voigt_vector);
    throw BoundViolation(os.str());
  }
  if (b.reuss_gap < -tol) {
    std::ostringstream os;
    os << "Reuss bound violated: eigenvalue " << b.reuss_gap << " along Mandel vector " << format_vector(b.reuss_vector);
    throw BoundViolation(os.str());
  }
  return b;
}

TensorField remove_mean_skew(const TensorField& f) {
  const Mat3 k = skew(f.integral()) / f.mesh().box().volume();
  TensorField out = f;
  for (std::size_t n = 0; n < out.size(); ++n) out[n] -= k;
  return out;
}

std::vector<double> weak_functionals(const TensorField& a, const TensorField& b) {
  const TensorField d = remove_mean_skew(a) - remove_mean_skew(b);
  std::vector<double> out;
  for (const auto& t : test_dictionary(a.mesh().box())) out.push_back(std::abs(sample_gradient(a.mesh(), t).inner(d)));
  return out;
}

GStudyReport gconv_study(const UnitCell& cell, const IncompatibleProblem& base, const std::vector<double>& epsilons,
                         const SolverOptions& cell_opts) {
  const HexMesh& mesh = base.c.mesh();
  if (epsilons.empty()) throw ConfigError("gconv needs at least one epsilon");
  for (std::size_t i = 0; i < epsilons.size(); ++i) {
    const double eps = epsilons[i];
    if (!(eps > 0.0)) throw ConfigError("epsilon must be positive");
    if (i > 0 && !(eps < epsilons[i - 1])) throw ConfigError("epsilons must be strictly decreasing");
    for (int d = 0; d < 3; ++d) {
      const double periods = mesh.box().size(d) / eps;
      const long k = std::lround(periods);
      if (std::abs(periods - double(k)) > 1e-9 * periods || k < 1 || mesh.cells()[d] % k != 0) {
        std::ostringstream os;
        os << "epsilon " << eps << " is not commensurate with the mesh along axis " << d;
        throw ConfigError(os.str());
      }
    }
  }

  GStudyReport rep;
  rep.epsilons = epsilons;
  for (const auto& t : test_dictionary(mesh.box())) rep.dictionary.push_back(t.name);

  const CellCorrectors chi = cell_correctors(cell, cell_opts);
  rep.effective = effective_tensor(cell, chi);
  rep.bounds = voigt_reuss_gaps(rep.effective.c_hat, cell.c);

  IncompatibleProblem p = base;
  p.c = ElasticTensorField::constant(mesh, rep.effective.c_hat);
  const IncompatibleSolution s0 = solve_incompatible(p);
  const TensorField beta0 = remove_mean_skew(s0.beta);
  rep.beta0_norm = lp_norm(beta0, 1.5);

  for (double eps : epsilons) {
    p.c = ElasticTensorField::periodic_sampled(mesh, cell.c, eps);
    rep.vmo.push_back(vmo_modulus(p.c, {0.5, 0.25, 0.125}));
    const IncompatibleSolution s = solve_incompatible(p);
    rep.d_g.push_back(weak_functionals(s.beta, s0.beta));
    double m = 0.0;
    for (double v : rep.d_g.back()) m = std::max(m, v);
    rep.max_d_g.push_back(m);
    const double dist = lp_norm(remove_mean_skew(s.beta) - beta0, 1.5);
    rep.strong_distance.push_back(rep.beta0_norm > 0.0 ? dist / rep.beta0_norm : dist);
    rep.runs.push_back(s.report);
  }
  rep.runs.push_back(s0.report);

  int increases = 0;
  for (std::size_t i = 1; i < rep.max_d_g.size(); ++i)
    if (rep.max_d_g[i] > rep.max_d_g[i - 1]) ++increases;
  rep.weak_trend = rep.max_d_g.size() < 2 || (rep.max_d_g.back() < rep.max_d_g.front() && increases <= 1);
  return rep;
}

}  // namespace incompat
