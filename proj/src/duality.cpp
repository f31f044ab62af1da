#include "incompat/duality.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

#include "incompat/dictionary.hpp"

namespace incompat {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Tap {
  int index;
  double weight;
};

// Taps of a normalized 1-D Gaussian on the Gauss-point coordinates of one axis.
std::vector<std::vector<Tap>> axis_taps(int cells, double h, double sigma, bool& identity) {
  const int n = 2 * cells;
  std::vector<double> x(n);
  for (int i = 0; i < cells; ++i)
    for (int s = 0; s < 2; ++s) x[2 * i + s] = (i + HexMesh::gauss_coord(s)) * h;
  std::vector<std::vector<Tap>> taps(n);
  identity = true;
  const double cut = 3.0 * sigma;
  for (int m = 0; m < n; ++m) {
    double total = 0.0;
    for (int l = 0; l < n; ++l) {
      const double d = std::abs(x[l] - x[m]);
      if (d > cut) continue;
      const double w = std::exp(-0.5 * d * d / (sigma * sigma));
      taps[m].push_back({l, w});
      total += w;
    }
    for (auto& t : taps[m]) t.weight /= total;
    if (taps[m].size() > 1) identity = false;
  }
  return taps;
}

// Q1 gradient of u in cell c at local coordinates xi in [0,1]^3.
Mat3 q1_gradient(const VectorField& u, std::size_t c, const Vec3& xi) {
  const HexMesh& mesh = u.mesh();
  const Vec3 h = mesh.spacing();
  const auto nodes = mesh.cell_nodes(c);
  Mat3 g = Mat3::Zero();
  for (int a = 0; a < 8; ++a) {
    const int b[3] = {a & 1, (a >> 1) & 1, (a >> 2) & 1};
    double l[3], dl[3];
    for (int k = 0; k < 3; ++k) {
      l[k] = b[k] ? xi(k) : 1.0 - xi(k);
      dl[k] = b[k] ? 1.0 : -1.0;
    }
    const Vec3 grad(dl[0] * l[1] * l[2] / h(0), l[0] * dl[1] * l[2] / h(1), l[0] * l[1] * dl[2] / h(2));
    g += u[nodes[a]] * grad.transpose();
  }
  return g;
}

}  // namespace

MollificationSchedule MollificationSchedule::standard(const HexMesh& mesh, int stages, double tol) {
  MollificationSchedule s;
  s.tol = tol;
  double w = 0.5 * mesh.spacing().maxCoeff();
  for (int k = 0; k < stages; ++k, w *= 0.5) s.widths.push_back(w);
  return s;
}

void MollificationSchedule::validate() const {
  if (widths.empty()) throw ConfigError("mollification schedule is empty");
  for (std::size_t k = 0; k < widths.size(); ++k) {
    if (!(widths[k] > 0.0) || !std::isfinite(widths[k])) throw ConfigError("schedule widths must be positive");
    if (k > 0 && !(widths[k] < widths[k - 1])) throw ConfigError("schedule widths must be strictly decreasing");
  }
  if (!(tol > 0.0)) throw ConfigError("schedule tolerance must be positive");
}

TensorField gaussian_filter(const TensorField& f, double sigma) {
  const HexMesh& mesh = f.mesh();
  const auto& nc = mesh.cells();
  std::array<std::vector<std::vector<Tap>>, 3> taps;
  bool all_identity = true;
  std::array<bool, 3> identity{};
  for (int d = 0; d < 3; ++d) {
    taps[d] = axis_taps(nc[d], mesh.spacing()(d), sigma, identity[d]);
    all_identity = all_identity && identity[d];
  }
  if (all_identity) return f;

  const std::array<int, 3> n{2 * nc[0], 2 * nc[1], 2 * nc[2]};
  auto lattice = [&](int x, int y, int z) { return (std::size_t(z) * n[1] + y) * n[0] + x; };
  std::vector<Mat3> a(f.size()), b(f.size());
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto [i, j, k] = mesh.cell_ijk(c);
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g)
      a[lattice(2 * i + (g & 1), 2 * j + ((g >> 1) & 1), 2 * k + ((g >> 2) & 1))] = f.at(c, g);
  }
  for (int d = 0; d < 3; ++d) {
    if (identity[d]) continue;
    for (int z = 0; z < n[2]; ++z)
      for (int y = 0; y < n[1]; ++y)
        for (int x = 0; x < n[0]; ++x) {
          const int p[3] = {x, y, z};
          Mat3 s = Mat3::Zero();
          for (const Tap& t : taps[d][p[d]]) {
            int q[3] = {x, y, z};
            q[d] = t.index;
            s += t.weight * a[lattice(q[0], q[1], q[2])];
          }
          b[lattice(x, y, z)] = s;
        }
    std::swap(a, b);
  }
  TensorField out(mesh);
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto [i, j, k] = mesh.cell_ijk(c);
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g)
      out.at(c, g) = a[lattice(2 * i + (g & 1), 2 * j + ((g >> 1) & 1), 2 * k + ((g >> 2) & 1))];
  }
  return out;
}

DualitySolution solve_duality(const ElasticOperator& op, const TensorField& f, const MollificationSchedule& schedule,
                              const SolverOptions& opts) {
  schedule.validate();
  if (!f.all_finite()) throw NotAdmissible("forcing field has non-finite entries");
  const HexMesh& mesh = op.mesh();
  DualitySolution sol;
  if (f.max_abs() == 0.0) {
    sol.u = VectorField(mesh);
    DualityStage st;
    st.width = schedule.widths.front();
    st.defect = std::numeric_limits<double>::quiet_NaN();
    st.stats.converged = true;
    sol.stages.push_back(st);
    sol.converged = true;
    return sol;
  }
  const double fnorm = lp_norm(f, 1.5);
  VectorField prev;
  double prev_norm = 0.0;
  for (std::size_t k = 0; k < schedule.widths.size(); ++k) {
    DualityStage st;
    st.width = schedule.widths[k];
    const TensorField fk = gaussian_filter(f, st.width);
    st.forcing_change = lp_norm(fk - f, 1.5) / fnorm;
    const AdmissibleForcing adm = project_admissible(fk);
    NeumannSolution ns = solve_neumann(op, adm.forcing, opts, k > 0 ? &prev : nullptr);
    st.stats = ns.stats;
    if (k == 0) {
      st.defect = std::numeric_limits<double>::quiet_NaN();
    } else {
      const double diff = w1p_norm(ns.u - prev, 1.5);
      st.defect = prev_norm > 0.0 ? diff / prev_norm : (diff == 0.0 ? 0.0 : std::numeric_limits<double>::infinity());
    }
    sol.stages.push_back(st);
    prev = std::move(ns.u);
    prev_norm = w1p_norm(prev, 1.5);
    if (k > 0 && st.defect < schedule.tol) {
      sol.converged = true;
      break;
    }
  }
  sol.u = prev;
  if (!sol.converged) {
    std::ostringstream os;
    os << "mollification schedule exhausted after " << sol.stages.size() << " stages; last Cauchy defect "
       << sol.stages.back().defect << " (tolerance " << schedule.tol << ")";
    throw NotCauchy(os.str(), sol);
  }
  return sol;
}

DualitySolution solve_duality(const ElasticTensorField& c, const TensorField& f,
                              const MollificationSchedule& schedule, const SolverOptions& opts) {
  const ElasticOperator op(c, BoundaryKind::Free, opts.threads);
  return solve_duality(op, f, schedule, opts);
}

DualityCheck verify_duality_identity(const ElasticOperator& op, const TensorField& f, const TensorField& g,
                                     const MollificationSchedule& schedule, const SolverOptions& opts) {
  const TensorField fa = project_admissible(f).forcing;
  const TensorField ga = project_admissible(g).forcing;
  const double nf = lp_norm(fa, 1.5), ng = lp_norm(ga, 3.0);
  DualityCheck out;
  // a forcing that projects to round-off (a constant skew field) pairs to zero
  if (nf <= 1e-12 * lp_norm(f, 1.5) || ng <= 1e-12 * lp_norm(g, 3.0)) return out;
  const VectorField u = solve_duality(op, fa, schedule, opts).u;
  const VectorField v = solve_neumann(op, ga, opts).u;
  out.lhs = ga.inner(u.gradient());
  out.rhs = fa.inner(v.gradient());
  out.defect = std::abs(out.lhs - out.rhs) / (nf * ng);
  return out;
}

std::pair<double, std::string> momentum_residual(const ElasticTensorField& c, const TensorField& beta) {
  const TensorField stress = apply_tensor(c, beta);
  const double sn = lp_norm(stress, 1.5);
  std::pair<double, std::string> worst{0.0, ""};
  if (sn == 0.0) return worst;
  for (const auto& t : test_dictionary(c.mesh().box())) {
    const TensorField dphi = sample_field(c.mesh(), t).gradient();
    const double dn = lp_norm(dphi, 3.0);
    if (dn == 0.0) continue;
    const double r = std::abs(stress.inner(dphi)) / (sn * dn);
    if (r > worst.first || worst.second.empty()) worst = {r, t.name};
  }
  return worst;
}

double gradient_curl_mismatch(const VectorField& u) {
  const HexMesh& mesh = u.mesh();
  const double scale = u.gradient().max_abs();
  if (scale == 0.0) return 0.0;
  const auto& n = mesh.cells();
  double worst = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const auto ijk = mesh.cell_ijk(c);
    for (int d = 0; d < 3; ++d) {
      if (ijk[d] + 1 >= n[d]) continue;
      auto nb = ijk;
      ++nb[d];
      const std::size_t c2 = mesh.cell_index(nb[0], nb[1], nb[2]);
      const int e1 = (d + 1) % 3, e2 = (d + 2) % 3;
      for (int s = 0; s < 4; ++s) {
        Vec3 xi;
        xi(e1) = HexMesh::gauss_coord(s & 1);
        xi(e2) = HexMesh::gauss_coord(s >> 1);
        xi(d) = 1.0;
        const Mat3 a = q1_gradient(u, c, xi);
        xi(d) = 0.0;
        const Mat3 b = q1_gradient(u, c2, xi);
        worst = std::max(worst, (a.col(e1) - b.col(e1)).cwiseAbs().maxCoeff());
        worst = std::max(worst, (a.col(e2) - b.col(e2)).cwiseAbs().maxCoeff());
      }
    }
  }
  return worst / scale;
}

IncompatibleSolution solve_incompatible(const IncompatibleProblem& p) {
  const auto t_start = Clock::now();
  const HexMesh& mesh = p.c.mesh();
  IncompatibleSolution out;
  SolveReport& rep = out.report;

  validate(p.measure, mesh.box());
  rep.total_variation = total_variation(p.measure);
  rep.delta = p.delta > 0.0 ? p.delta : 3.0 * mesh.spacing().maxCoeff();
  const PeriodicGrid grid = p.pad ? padded_grid(mesh, *p.pad) : padded_grid(mesh, rep.delta);
  rep.grid_dims = grid.n;
  rep.grid_origin = grid.origin;
  rep.grid_spacing = grid.spacing;

  auto t0 = Clock::now();
  const GridMeasure gm = mollify(p.measure, grid, rep.delta);
  rep.deposit_mass = gm.deposit_mass;
  rep.grid_mass = gm.total_mass();
  rep.mean_correction = gm.mean_correction;
  rep.projection_change = gm.projection_change;
  rep.measure_divergence = check_divergence_free(gm);
  rep.timings.emplace_back("mollify", seconds_since(t0));

  t0 = Clock::now();
  const SpectralTensorField bmu = solve_beta_mu(gm);
  rep.curl_residual = curl_residual(bmu, gm);
  rep.div_residual = div_residual(bmu, gm);
  out.beta_mu = bmu.restrict_to(mesh);
  if (p.gauge) out.beta_mu += project_rigid(VectorField(mesh, p.gauge)).gradient();
  rep.timings.emplace_back("curl_inverse", seconds_since(t0));

  t0 = Clock::now();
  const TensorField f = apply_tensor(p.c, out.beta_mu);
  rep.admissible_correction = project_admissible(f).correction_norm;
  const MollificationSchedule schedule =
      p.schedule.widths.empty() ? MollificationSchedule::standard(mesh, 6, p.schedule.tol) : p.schedule;
  const ElasticOperator op(p.c, BoundaryKind::Free, p.solver.threads);
  DualitySolution ds = solve_duality(op, f, schedule, p.solver);
  rep.stages = ds.stages;
  rep.cauchy_converged = ds.converged;
  out.u = std::move(ds.u);
  rep.timings.emplace_back("duality", seconds_since(t0));

  t0 = Clock::now();
  const TensorField du = out.u.gradient();
  out.beta = out.beta_mu + du;
  rep.gradient_curl_mismatch = gradient_curl_mismatch(out.u);
  rep.beta_mu_norm = lp_norm(out.beta_mu, 1.5);
  rep.beta_norm = lp_norm(out.beta, 1.5);
  rep.u_norm = w1p_norm(out.u, 1.5);
  rep.mean_skew = skew(out.beta.integral()) / mesh.box().volume();
  rep.estimate_ratio = std::numeric_limits<double>::quiet_NaN();  // 0 / 0 for an empty measure
  if (rep.total_variation > 0.0) {
    TensorField centred = out.beta;
    for (std::size_t n = 0; n < centred.size(); ++n) centred[n] -= rep.mean_skew;
    rep.estimate_ratio = lp_norm(centred, 1.5) / rep.total_variation;
  }
  std::tie(rep.momentum_residual, rep.momentum_worst) = momentum_residual(p.c, out.beta);
  rep.rigid_translation = out.u.integral().norm();
  rep.rigid_rotation = skew(du.integral()).norm();
  rep.timings.emplace_back("diagnostics", seconds_since(t0));
  rep.timings.emplace_back("total", seconds_since(t_start));
  return out;
}

SkewQuotient skew_quotient_distance(const TensorField& d) {
  SkewQuotient q;
  const double vol = d.mesh().box().volume();
  q.k = skew(d.integral()) / vol;
  const double scale = d.max_abs();
  if (scale == 0.0) return q;
  const double eps = 1e-12 * scale;
  for (q.iterations = 0; q.iterations < 500; ++q.iterations) {
    double wsum = 0.0;
    Mat3 acc = Mat3::Zero();
    double rmax = 0.0;
    for (const auto& m : d.values()) {
      const double r = (m - q.k).norm();
      rmax = std::max(rmax, r);
      const double w = 1.0 / std::sqrt(std::max(r, eps));  // |r|^(p-2), p = 3/2
      wsum += w;
      acc += w * skew(m - q.k);
    }
    if (rmax == 0.0) break;
    // update by the weighted mean residual so round-off scales with the residual, not with k
    const Mat3 next = q.k + acc / wsum;
    const double step = (next - q.k).norm();
    q.k = next;
    if (step <= 1e-14 * (scale + q.k.norm())) break;
  }
  TensorField r = d;
  for (std::size_t n = 0; n < r.size(); ++n) r[n] -= q.k;
  q.distance = lp_norm(r, 1.5);
  return q;
}

UniquenessReport uniqueness_check(const IncompatibleProblem& a, const IncompatibleProblem& b) {
  const HexMesh& ma = a.c.mesh();
  const HexMesh& mb = b.c.mesh();
  if (ma.cells() != mb.cells() || (ma.box().origin - mb.box().origin).norm() != 0.0 ||
      (ma.box().size - mb.box().size).norm() != 0.0) {
    throw ConfigError("uniqueness_check needs both problems on the same mesh");
  }
  const auto sa = solve_incompatible(a);
  const auto sb = solve_incompatible(b);
  UniquenessReport rep;
  rep.quotient = skew_quotient_distance(sa.beta - sb.beta);
  const double n = lp_norm(sa.beta, 1.5);
  rep.relative = n > 0.0 ? rep.quotient.distance / n : rep.quotient.distance;
  return rep;
}

}  // namespace incompat
