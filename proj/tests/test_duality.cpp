#include <cmath>
#include <random>

#include "doctest.h"
#include "incompat/dictionary.hpp"
#include "incompat/duality.hpp"

using namespace incompat;

namespace {

ElasticTensorField layered(const HexMesh& mesh) {
  return ElasticTensorField::laminate(mesh, 0, 0.5, Tensor4::isotropic(1.0, 1.0), Tensor4::isotropic(3.0, 2.0),
                                      0.5 * mesh.box().size(0));
}

double relative_diff(const TensorField& a, const TensorField& b) {
  const double n = lp_norm(a, 1.5);
  return lp_norm(a - b, 1.5) / (n > 0.0 ? n : 1.0);
}

LineMeasure square(const Vec3& b) { return LineMeasure{{square_loop(Vec3(0.5, 0.5, 0.5), 0.5, 2, b)}}; }

}  // namespace

TEST_CASE("test dictionary gradients match finite differences") {
  const Box box{Vec3(0.2, -0.1, 0.0), Vec3(1.0, 2.0, 0.5)};
  const auto dict = test_dictionary(box);
  CHECK(dict.size() == 24);
  const Vec3 x(0.61, 0.73, 0.27);
  const double e = 1e-6;
  for (const auto& t : dict) {
    Mat3 fd;
    for (int j = 0; j < 3; ++j) {
      const Vec3 d = e * Vec3::Unit(j);
      fd.col(j) = (t.phi(x + d) - t.phi(x - d)) / (2.0 * e);
    }
    CHECK_MESSAGE((fd - t.grad(x)).norm() < 1e-7, t.name);
  }
}

TEST_CASE("gaussian filter") {
  const HexMesh mesh(Box{}, {6, 5, 4});
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0.0, 1.0);
  TensorField f(mesh);
  for (std::size_t i = 0; i < f.size(); ++i)
    for (int c = 0; c < 9; ++c) f[i](c) = n(rng);

  const TensorField same = gaussian_filter(f, mesh.spacing().minCoeff() / 32.0);
  CHECK(relative_diff(f, same) == 0.0);

  const Mat3 k = Mat3::Random();
  const TensorField constant(mesh, [&](const Vec3&) { return k; });
  CHECK(gaussian_filter(constant, 0.2).max_abs() == doctest::Approx(k.cwiseAbs().maxCoeff()).epsilon(1e-14));
  CHECK(relative_diff(constant, gaussian_filter(constant, 0.2)) < 1e-14);

  // smoothing lowers the oscillation of noise
  CHECK(lp_norm(gaussian_filter(f, 0.2), 2.0) < 0.5 * lp_norm(f, 2.0));
}

TEST_CASE("schedule validation") {
  const HexMesh mesh(Box{}, {8, 8, 8});
  const auto s = MollificationSchedule::standard(mesh);
  REQUIRE(s.widths.size() == 6);
  CHECK(s.widths.front() == doctest::Approx(1.0 / 16.0));
  CHECK_NOTHROW(s.validate());
  MollificationSchedule bad{{0.1, 0.1}, 1e-6};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.widths = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.widths = {0.1, -0.05};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("solve_duality") {
  const HexMesh mesh(Box{}, {12, 12, 12});
  const auto c = layered(mesh);
  const ElasticOperator op(c, BoundaryKind::Free);
  const auto schedule = MollificationSchedule::standard(mesh);

  SUBCASE("zero forcing") {
    const auto s = solve_duality(op, TensorField(mesh), schedule);
    CHECK(s.stages.size() == 1);
    CHECK(s.converged);
    CHECK(s.u.max_abs() == 0.0);
  }

  SUBCASE("smooth forcing reproduces the variational solution") {
    const auto dict = test_dictionary(mesh.box());
    const TensorField f = project_admissible(sample_gradient(mesh, dict[13])).forcing;
    const auto s = solve_duality(op, f, schedule);
    const auto v = solve_neumann(op, f, {});
    CHECK(s.converged);
    CHECK(s.stages.size() < schedule.widths.size() + 1);
    CHECK(w1p_norm(s.u - v.u, 1.5) / w1p_norm(v.u, 1.5) < 1e-8);
    CHECK(std::abs(s.u.integral().norm()) < 1e-10);
  }

  SUBCASE("loop forcing: Cauchy defects decrease") {
    IncompatibleProblem p;
    p.c = c;
    p.measure = square(Vec3(1, 0, 0));
    const auto sol = solve_incompatible(p);
    const auto& st = sol.report.stages;
    REQUIRE(st.size() >= 3);
    for (std::size_t k = 2; k < st.size(); ++k) CHECK(st[k].defect < st[k - 1].defect);
    CHECK(sol.report.cauchy_converged);
  }

  SUBCASE("exhausted schedule") {
    const auto dict = test_dictionary(mesh.box());
    const TensorField f = project_admissible(sample_gradient(mesh, dict[20])).forcing;
    const double h = mesh.spacing()(0);
    const MollificationSchedule wide{{2.0 * h, 1.5 * h}, 1e-12};
    try {
      solve_duality(op, f, wide);
      FAIL("expected NotCauchy");
    } catch (const NotCauchy& e) {
      CHECK(e.partial().stages.size() == 2);
      CHECK(e.partial().stages[1].defect > 1e-12);
      CHECK(e.partial().u.size() == mesh.num_nodes());
      CHECK(e.error_class() == ErrorClass::Solver);
    }
  }
}

TEST_CASE("duality identity") {
  const HexMesh mesh(Box{}, {12, 12, 12});
  const auto c = layered(mesh);
  const ElasticOperator op(c, BoundaryKind::Free);
  const auto schedule = MollificationSchedule::standard(mesh);
  const auto dict = test_dictionary(mesh.box());

  const TensorField f(mesh, [](const Vec3& x) {
    Mat3 m;
    m << std::sin(3.0 * x(0)), x(1) * x(2), std::cos(x(0) + x(2)), 0.5, x(0) * x(0), std::exp(x(1)), x(2), -x(1),
        std::sin(x(0) * x(1));
    return m;
  });
  const TensorField g = sample_gradient(mesh, dict[11]);
  const auto r = verify_duality_identity(op, f, g, schedule);
  MESSAGE("lhs " << r.lhs << " rhs " << r.rhs << " defect " << r.defect);
  CHECK(std::abs(r.lhs) > 1e-6);
  CHECK(r.defect < 1e-8);

  const auto same = verify_duality_identity(op, f, f, schedule);
  CHECK(same.defect < 1e-10);

  const Mat3 k = skew(Mat3::Random());
  const auto zero = verify_duality_identity(op, f, TensorField(mesh, [&](const Vec3&) { return k; }), schedule);
  CHECK(zero.lhs == 0.0);
  CHECK(zero.rhs == 0.0);
  CHECK(zero.defect == 0.0);
}

TEST_CASE("incompatible pipeline") {
  const HexMesh mesh(Box{}, {12, 12, 12});
  IncompatibleProblem p;
  p.c = layered(mesh);
  p.measure = square(Vec3(1, 0.5, 0));
  const auto base = solve_incompatible(p);
  const auto& rep = base.report;

  SUBCASE("residuals and quotient") {
    MESSAGE("curl " << rep.curl_residual << " momentum " << rep.momentum_residual << " (" << rep.momentum_worst
                    << ") ratio " << rep.estimate_ratio);
    CHECK(rep.curl_residual < 1e-10);
    CHECK(rep.div_residual < 1e-10);
    CHECK(rep.gradient_curl_mismatch < 1e-12);
    CHECK(rep.momentum_residual < 1e-8);
    CHECK(rep.rigid_translation < 1e-10);
    CHECK(rep.rigid_rotation < 1e-10);
    CHECK(rep.admissible_correction < 1e-12);
    CHECK(std::isfinite(rep.estimate_ratio));
    CHECK(base.beta.all_finite());
  }

  SUBCASE("zero measure") {
    IncompatibleProblem z = p;
    z.measure = {};
    const auto s = solve_incompatible(z);
    CHECK(s.beta.max_abs() == 0.0);
    CHECK(s.u.max_abs() == 0.0);
  }

  SUBCASE("linearity") {
    IncompatibleProblem twice = p;
    twice.measure = p.measure.scaled(2.0);
    const auto s = solve_incompatible(twice);
    CHECK(relative_diff(2.0 * base.beta, s.beta) < 10.0 * p.solver.rtol);
  }

  SUBCASE("gauge") {
    IncompatibleProblem g = p;
    g.gauge = [](const Vec3& x) {
      return Vec3(std::sin(2.0 * x(0)) * x(1), std::cos(x(1) + x(2)), x(0) * x(2) * x(2));
    };
    const auto s = solve_incompatible(g);
    const double d = relative_diff(base.beta, s.beta);
    const double q = skew_quotient_distance(base.beta - s.beta).distance / rep.beta_norm;
    MESSAGE("gauge discrepancy " << d << ", modulo skew " << q);
    CHECK(d < 10.0 * p.solver.rtol);
    CHECK(q < 10.0 * p.solver.rtol);
  }
}

TEST_CASE("estimate ratio over the loop family") {
  const HexMesh mesh(Box{}, {12, 12, 12});
  IncompatibleProblem p;
  p.c = layered(mesh);
  const Vec3 b(0.3, 1.0, 0.0);
  const std::vector<LineMeasure> family = {
      square(b),
      LineMeasure{{polygon_loop(Vec3(0.5, 0.5, 0.5), 0.3, 6, 2, b)}},
      LineMeasure{{square_loop(Vec3(0.5, 0.5, 0.35), 0.4, 2, b), square_loop(Vec3(0.5, 0.5, 0.65), 0.4, 2, b)}}};
  double lo = 1e300, hi = 0.0;
  for (const auto& m : family) {
    p.measure = m;
    const double r = solve_incompatible(p).report.estimate_ratio;
    MESSAGE("ratio " << r);
    REQUIRE(std::isfinite(r));
    REQUIRE(r > 0.0);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(hi / lo < 10.0);
}

TEST_CASE("skew quotient") {
  const HexMesh mesh(Box{}, {5, 4, 3});
  std::mt19937_64 rng(11);
  std::normal_distribution<double> n(0.0, 1.0);
  TensorField d(mesh);
  for (std::size_t i = 0; i < d.size(); ++i)
    for (int c = 0; c < 9; ++c) d[i](c) = n(rng);

  CHECK(skew_quotient_distance(d - d).distance == 0.0);

  Mat3 k0;
  k0 << 0, 0.3, -1.2, -0.3, 0, 0.7, 1.2, -0.7, 0;
  const auto inj = skew_quotient_distance(TensorField(mesh, [&](const Vec3&) { return Mat3(-k0); }));
  CHECK(inj.distance < 1e-14);
  CHECK((inj.k + k0).norm() < 1e-14);

  // convex objective: the IRLS minimizer beats every nearby skew shift
  const auto q = skew_quotient_distance(d);
  auto objective = [&](const Mat3& k) {
    TensorField r = d;
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= k;
    return lp_norm(r, 1.5);
  };
  CHECK(q.distance == doctest::Approx(objective(q.k)).epsilon(1e-14));
  for (int a = 0; a < 3; ++a) {
    Mat3 e = Mat3::Zero();
    e((a + 1) % 3, (a + 2) % 3) = 1e-4;
    e((a + 2) % 3, (a + 1) % 3) = -1e-4;
    CHECK(objective(q.k + e) >= q.distance);
    CHECK(objective(q.k - e) >= q.distance);
  }
  CHECK(q.distance <= objective(skew(d.integral()) / mesh.box().volume()));
}

TEST_CASE("uniqueness under mollification refinement") {
  std::vector<double> gaps;
  for (int n : {8, 16, 24}) {
    const HexMesh mesh(Box{}, {n, n, n});
    const double h = 1.0 / n;
    IncompatibleProblem a;
    a.c = layered(mesh);
    a.measure = square(Vec3(0, 1, 0));
    a.delta = 4.0 * h;
    IncompatibleProblem b = a;
    b.delta = 3.0 * h;
    const auto u = uniqueness_check(a, b);
    MESSAGE("h = 1/" << n << ": discrepancy " << u.quotient.distance << " (relative " << u.relative << ")");
    gaps.push_back(u.quotient.distance);

    if (n == 8) CHECK(uniqueness_check(a, a).quotient.distance == 0.0);
  }
  CHECK(gaps[1] < gaps[0]);
  CHECK(gaps[2] < gaps[1]);
}
