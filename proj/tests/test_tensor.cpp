#include <random>

#include "doctest.h"
#include "incompat/errors.hpp"
#include "incompat/material.hpp"
#include "incompat/tensor.hpp"

using namespace incompat;

namespace {

Mat3 random_matrix(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat3 m;
  for (int i = 0; i < 9; ++i) m(i) = n(rng);
  return m;
}

Tensor4 random_spd_tensor(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Mat6 a;
  for (int i = 0; i < 36; ++i) a(i) = n(rng);
  return Tensor4(Mat6(a * a.transpose() + Mat6::Identity()));
}

// Relative eigenvalues of C xi.xi against |xi+xi^T|^2, computed directly on the
// 9-dimensional matrix space restricted to the symmetric matrices through a
// non-orthonormal basis (e_i (x) e_j + e_j (x) e_i).
Eigen::VectorXd brute_force_relative_eigenvalues(const Tensor4& c) {
  std::vector<Mat3> basis;
  for (int i = 0; i < 3; ++i)
    for (int j = i; j < 3; ++j) {
      Mat3 e = Mat3::Zero();
      e(i, j) += 1.0;
      e(j, i) += 1.0;
      basis.push_back(e);
    }
  Eigen::MatrixXd a(6, 6), b(6, 6);
  for (int p = 0; p < 6; ++p)
    for (int q = 0; q < 6; ++q) {
      double s = 0.0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j)
          for (int h = 0; h < 3; ++h)
            for (int k = 0; k < 3; ++k) s += c(i, j, h, k) * basis[q](h, k) * basis[p](i, j);
      a(p, q) = s;
      const Mat3 sp = basis[p] + basis[p].transpose(), sq = basis[q] + basis[q].transpose();
      b(p, q) = dot(sp, sq);
    }
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> ges(a, b);
  return ges.eigenvalues();
}

}  // namespace

TEST_CASE("apply_tensor: isotropic identity and zero") {
  const Tensor4 c = Tensor4::isotropic(1.0, 1.0);
  const Mat3 out = apply_tensor(c, Mat3::Identity());
  CHECK((out - 5.0 * Mat3::Identity()).norm() < 1e-14);
  CHECK(apply_tensor(c, Mat3::Zero()).norm() == 0.0);

  // lambda tr(xi) I + mu (xi + xi^T)
  std::mt19937_64 rng(1);
  const Tensor4 c2 = Tensor4::isotropic(0.7, 1.3);
  for (int t = 0; t < 20; ++t) {
    const Mat3 xi = random_matrix(rng);
    const Mat3 expect = 0.7 * xi.trace() * Mat3::Identity() + 1.3 * (xi + xi.transpose());
    CHECK((c2.apply(xi) - expect).norm() < 1e-13 * (1.0 + expect.norm()));
  }
}

TEST_CASE("apply_tensor annihilates skew matrices") {
  std::mt19937_64 rng(2);
  for (int t = 0; t < 50; ++t) {
    const Tensor4 c = random_spd_tensor(rng);
    const Mat3 k = skew(random_matrix(rng));
    CHECK(c.apply(k).norm() == 0.0);
  }
}

TEST_CASE("major symmetry: C xi . eta = C eta . xi") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 100; ++t) {
    const Tensor4 c = random_spd_tensor(rng);
    const Mat3 xi = random_matrix(rng), eta = random_matrix(rng);
    const double a = dot(c.apply(xi), eta), b = dot(c.apply(eta), xi);
    CHECK(std::abs(a - b) <= 1e-14 * (std::abs(a) + std::abs(b) + c.norm()));
  }
}

TEST_CASE("component round trip preserves the tensor") {
  std::mt19937_64 rng(4);
  const Tensor4 c = random_spd_tensor(rng);
  const Tensor4 back = Tensor4::from_components(c.components());
  CHECK((back.mandel() - c.mandel()).norm() < 1e-13 * c.norm());
  const Tensor4 tri = Tensor4::from_upper_triangle(c.upper_triangle());
  CHECK((tri.mandel() - c.mandel()).norm() == 0.0);
  // a_12^12 of an isotropic tensor is mu.
  CHECK(Tensor4::isotropic(2.0, 3.0)(0, 1, 0, 1) == doctest::Approx(3.0));
  CHECK(Tensor4::isotropic(2.0, 3.0)(0, 0, 1, 1) == doctest::Approx(2.0));
}

TEST_CASE("check_ellipticity") {
  SUBCASE("isotropic lambda = mu = 1 lies in [0.5, 1.25]") {
    const Tensor4 c = Tensor4::isotropic(1.0, 1.0);
    const auto brute = brute_force_relative_eigenvalues(c);
    // Frozen from the brute-force generalized eigensolve.
    CHECK(brute.minCoeff() == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(brute.maxCoeff() == doctest::Approx(1.25).epsilon(1e-12));
    const auto r = check_ellipticity(c, 0.25, 1.25);
    CHECK(r.pass);
    CHECK(r.min_relative == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(r.max_relative == doctest::Approx(1.25).epsilon(1e-12));
    CHECK_FALSE(check_ellipticity(c, 0.6, 2.0).pass);
    CHECK_FALSE(check_ellipticity(c, 0.1, 1.0).pass);
  }
  SUBCASE("agrees with the brute-force oracle on random tensors") {
    std::mt19937_64 rng(5);
    for (int t = 0; t < 10; ++t) {
      const Tensor4 c = random_spd_tensor(rng);
      const auto brute = brute_force_relative_eigenvalues(c);
      const auto r = check_ellipticity(c, 0.0, 1e9);
      CHECK(r.min_relative == doctest::Approx(brute.minCoeff()).epsilon(1e-10));
      CHECK(r.max_relative == doctest::Approx(brute.maxCoeff()).epsilon(1e-10));
    }
  }
  SUBCASE("symmetry violation") {
    auto a = Tensor4::isotropic(1.0, 1.0).components();
    a[((0 * 3 + 0) * 3 + 1) * 3 + 1] += 1e-3;  // a_11^22 != a_22^11
    CHECK_THROWS_AS(check_ellipticity(a, 0.1, 2.0), SymmetryViolation);
    CHECK_THROWS_AS(Tensor4::from_components(a), SymmetryViolation);
  }
  SUBCASE("zero tensor fails a positive lower bound") {
    CHECK_FALSE(check_ellipticity(Tensor4(), 0.1, 1.0).pass);
  }
  SUBCASE("scale covariance") {
    std::mt19937_64 rng(6);
    for (int t = 0; t < 10; ++t) {
      const Tensor4 c = random_spd_tensor(rng);
      const double s = 0.1 + 3.0 * t;
      const auto a = check_ellipticity(c, 0.0, 1e9), b = check_ellipticity(c * s, 0.0, 1e9);
      CHECK(b.min_relative == doctest::Approx(s * a.min_relative).epsilon(1e-12));
      CHECK(b.max_relative == doctest::Approx(s * a.max_relative).epsilon(1e-12));
    }
  }
}

TEST_CASE("elastic tensor field generators") {
  const HexMesh mesh(Box{}, {8, 4, 4});
  const Tensor4 a = Tensor4::isotropic(1.0, 1.0), b = Tensor4::isotropic(10.0, 5.0);
  const auto lam = ElasticTensorField::laminate(mesh, 0, 0.5, a, b, 0.5);
  // period 0.5 = 4 cells, first two cells of each period are phase a.
  for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
    const int i = mesh.cell_ijk(c)[0];
    CHECK(lam.phases()[c] == ((i % 4) < 2 ? 0 : 1));
  }
  CHECK_THROWS_AS(ElasticTensorField::laminate(mesh, 0, 0.3, a, b, 1.0), std::invalid_argument);
  CHECK((lam.mean().mandel() - 0.5 * (a.mandel() + b.mandel())).norm() < 1e-14);

  const HexMesh cell_mesh(Box{}, {4, 1, 1});
  const auto cell = ElasticTensorField::laminate(cell_mesh, 0, 0.5, a, b, 1.0);
  const auto sampled = ElasticTensorField::periodic_sampled(mesh, cell, 0.5);
  CHECK(sampled.phases() == lam.phases());
}

TEST_CASE("vmo_modulus") {
  const HexMesh mesh(Box{}, {8, 8, 8});
  SUBCASE("constant field has zero modulus") {
    const auto f = ElasticTensorField::isotropic(mesh, 1.0, 1.0);
    const auto rep = vmo_modulus(f, {0.5, 0.25, 0.125});
    for (double w : rep.modulus) CHECK(w == 0.0);
    CHECK(rep.monotone);
  }
  SUBCASE("laminate modulus is bounded by half the phase contrast") {
    const Tensor4 a = Tensor4::isotropic(1.0, 1.0), b = Tensor4::isotropic(4.0, 3.0);
    const auto f = ElasticTensorField::laminate(mesh, 0, 0.5, a, b, 1.0);
    const auto rep = vmo_modulus(f, {0.5, 0.25, 0.15});
    const double contrast = (a.mandel() - b.mandel()).norm();
    // A ball with phase fractions (t, 1-t) has mean oscillation 2 t (1-t) |Ca - Cb|.
    for (double w : rep.modulus) {
      CHECK(w > 0.0);
      CHECK(w <= 0.5 * contrast * (1.0 + 1e-12));
    }
    CHECK(rep.monotone);
  }
  SUBCASE("oversized radius is clamped to the diameter") {
    const auto f = ElasticTensorField::isotropic(mesh, 1.0, 1.0);
    const auto rep = vmo_modulus(f, {2.0 * mesh.box().diameter()});
    REQUIRE(rep.radii.size() == 1);
    CHECK(rep.clamped[0]);
    CHECK(rep.radii[0] == doctest::Approx(mesh.box().diameter()));
  }
}
