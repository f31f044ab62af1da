#include <chrono>
#include <cmath>

#include "doctest.h"
#include "incompat/curl_inverse.hpp"
#include "incompat/errors.hpp"

using namespace incompat;

namespace {

PeriodicGrid cube_grid(double side, int n) {
  PeriodicGrid g;
  g.spacing = Vec3::Constant(side / n);
  g.n = {n, n, n};
  return g;
}

GridMeasure loop_measure(const PeriodicGrid& grid) {
  const LineMeasure m{{square_loop(Vec3(1, 1, 1), 0.6, 2, Vec3(1, 0.5, 0)),
                       polygon_loop(Vec3(0.9, 1.0, 1.1), 0.35, 6, 0, Vec3(0, 0.3, -1))}};
  return mollify(m, grid, 3.0 * grid.spacing(0));
}

double max_coefficient_diff(const SpectralTensorField& a, const SpectralTensorField& b) {
  double m = 0.0;
  for (int c = 0; c < 9; ++c)
    for (std::size_t i = 0; i < a.coefficients()[c].size(); ++i)
      m = std::max(m, std::abs(a.coefficients()[c][i] - b.coefficients()[c][i]));
  return m;
}

}  // namespace

TEST_CASE("zero measure gives zero field") {
  const auto grid = cube_grid(2.0, 16);
  const GridMeasure m(grid, 0.25);
  const auto beta = solve_beta_mu(m);
  for (const auto& c : beta.sample()) {
    for (double v : c) CHECK(v == 0.0);
  }
}

TEST_CASE("curl and divergence residuals") {
  const auto grid = cube_grid(2.0, 32);
  const auto m = loop_measure(grid);
  const auto beta = solve_beta_mu(m);
  const double rc = curl_residual(beta, m), rd = div_residual(beta, m);
  MESSAGE("curl residual " << rc << ", div residual " << rd);
  CHECK(rc < 1e-10);
  CHECK(rd < 1e-10);
}

TEST_CASE("linearity is exact") {
  const auto grid = cube_grid(2.0, 32);
  const auto m = loop_measure(grid);
  GridMeasure m2 = m;
  for (auto& c : m2.comp)
    for (double& v : c) v *= 2.0;
  m2.source_variation *= 2.0;
  auto b1 = solve_beta_mu(m);
  const auto b2 = solve_beta_mu(m2);
  b1 *= 2.0;
  CHECK(max_coefficient_diff(b1, b2) == 0.0);
}

TEST_CASE("input checks") {
  const auto grid = cube_grid(2.0, 32);
  auto m = loop_measure(grid);
  auto shifted = m;
  for (double& v : shifted.comp[4]) v += 1e-3;
  CHECK_THROWS_AS(solve_beta_mu(shifted), NonZeroMean);

  // a gradient row has zero mean but nonzero divergence
  auto bad = m;
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i)
        bad.comp[0][grid.index(i, j, k)] += std::sin(2.0 * M_PI * grid.position(i, j, k)(0) / 2.0);
  CHECK_THROWS_AS(solve_beta_mu(bad), NotDivergenceFree);
}

TEST_CASE("gauge: adding a gradient leaves the curl unchanged") {
  const auto grid = cube_grid(2.0, 32);
  const auto m = loop_measure(grid);
  auto beta = solve_beta_mu(m);
  std::array<std::vector<double>, 3> w;
  for (int i = 0; i < 3; ++i) w[i].resize(grid.size());
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i) {
        const Vec3 x = grid.position(i, j, k) * M_PI;
        const std::size_t n = grid.index(i, j, k);
        w[0][n] = std::sin(x(0)) * std::cos(2.0 * x(1));
        w[1][n] = std::exp(std::sin(x(2))) * 3.0;
        w[2][n] = std::cos(x(0) + x(1) - x(2));
      }
  beta += SpectralTensorField::gradient_of(grid, w);
  CHECK(curl_residual(beta, m) < 1e-10);
}

TEST_CASE("restriction to Gauss points evaluates the band-limited field") {
  const auto grid = cube_grid(2.0, 16);
  const HexMesh mesh(Box{Vec3(0.5, 0.5, 0.5), Vec3(1.0, 1.0, 1.0)}, {8, 8, 8});
  auto fw = [](const Vec3& y) {
    const Vec3 x = y * M_PI;
    return Vec3(std::sin(x(0)) * std::cos(2.0 * x(1)), std::cos(3.0 * x(2) - x(0)), std::sin(x(0) + x(1) + x(2)));
  };
  auto fdw = [](const Vec3& y) {
    const Vec3 x = y * M_PI;
    Mat3 d;
    d << std::cos(x(0)) * std::cos(2.0 * x(1)), -2.0 * std::sin(x(0)) * std::sin(2.0 * x(1)), 0.0,
        std::sin(3.0 * x(2) - x(0)), 0.0, -3.0 * std::sin(3.0 * x(2) - x(0)), std::cos(x(0) + x(1) + x(2)),
        std::cos(x(0) + x(1) + x(2)), std::cos(x(0) + x(1) + x(2));
    return Mat3(M_PI * d);
  };
  std::array<std::vector<double>, 3> w;
  for (int i = 0; i < 3; ++i) w[i].resize(grid.size());
  for (int k = 0; k < grid.n[2]; ++k)
    for (int j = 0; j < grid.n[1]; ++j)
      for (int i = 0; i < grid.n[0]; ++i) {
        const Vec3 v = fw(grid.position(i, j, k));
        for (int c = 0; c < 3; ++c) w[c][grid.index(i, j, k)] = v(c);
      }
  const auto dw = SpectralTensorField::gradient_of(grid, w).restrict_to(mesh);
  double worst = 0.0;
  for (std::size_t c = 0; c < mesh.num_cells(); ++c)
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g)
      worst = std::max(worst, (dw.at(c, g) - fdw(mesh.gauss_point(c, g))).cwiseAbs().maxCoeff());
  CHECK(worst < 1e-11);
}

TEST_CASE("screw dislocation annulus") {
  const auto t0 = std::chrono::steady_clock::now();
  const double side = 4.0;
  const auto grid = cube_grid(side, 64);
  const double h = grid.spacing(0);
  const Vec3 centre(2.0, 2.0, 0.0);
  const double b = 1.0;
  GridMeasure m(grid, 3.0 * h);
  deposit_segment(m, centre, centre + Vec3(0, 0, side), Vec3(0, 0, b));
  finalize(m);
  const auto beta = solve_beta_mu(m);
  const auto vals = beta.sample();
  double worst = 0.0;
  int count = 0;
  for (int j = 0; j < grid.n[1]; ++j)
    for (int i = 0; i < grid.n[0]; ++i) {
      const Vec3 x = grid.position(i, j, 5);
      const double dx = x(0) - centre(0), dy = x(1) - centre(1), r = std::hypot(dx, dy);
      if (r < 0.2 || r > 0.3) continue;
      const double mag = b / (2.0 * M_PI * r);
      const Vec3 exact(-mag * dy / r, mag * dx / r, 0.0);
      const std::size_t n = grid.index(i, j, 5);
      const Vec3 got(vals[6][n], vals[7][n], vals[8][n]);
      worst = std::max(worst, (got - exact).norm() / mag);
      for (int c = 0; c < 6; ++c) CHECK(std::abs(vals[c][n]) < 1e-12);
      ++count;
    }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  MESSAGE("annulus samples " << count << ", max relative error " << worst << ", " << secs << " s");
  CHECK(count > 0);
  CHECK(worst < 0.05);
}

TEST_CASE("lp_norm") {
  const HexMesh mesh(Box{}, {4, 4, 4});
  const TensorField one(mesh, [](const Vec3&) { return Mat3(Mat3::Identity() / std::sqrt(3.0)); });
  CHECK(lp_norm(one, 1.5) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(lp_norm(TensorField(mesh), 1.5) == 0.0);
  const TensorField half(mesh, [](const Vec3& x) {
    Mat3 m = Mat3::Zero();
    if (x(0) < 0.5) m(0, 1) = 2.0;
    return m;
  });
  CHECK(lp_norm(half, 1.5) == doctest::Approx(std::pow(0.5 * std::pow(2.0, 1.5), 2.0 / 3.0)).epsilon(1e-14));
  CHECK(lp_norm(half, 2.0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-14));
  CHECK(lp_norm(half, 3.0) == doctest::Approx(std::cbrt(4.0)).epsilon(1e-14));
}
