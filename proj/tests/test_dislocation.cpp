#include <cmath>
#include <random>

#include "doctest.h"
#include "incompat/dislocation.hpp"
#include "incompat/errors.hpp"

using namespace incompat;

namespace {

PeriodicGrid cube_grid(double side, int n) {
  PeriodicGrid g;
  g.spacing = Vec3::Constant(side / n);
  g.n = {n, n, n};
  return g;
}

double max_diff(const GridMeasure& a, const GridMeasure& b) {
  double m = 0.0;
  for (int c = 0; c < 9; ++c)
    for (std::size_t n = 0; n < a.comp[c].size(); ++n) m = std::max(m, std::abs(a.comp[c][n] - b.comp[c][n]));
  return m;
}

DislocationLoop random_polygon(std::mt19937_64& rng, const Vec3& centre, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  std::uniform_int_distribution<int> sides(3, 9);
  DislocationLoop loop;
  const int ns = sides(rng);
  for (int i = 0; i < ns; ++i) loop.vertices.push_back(centre + Vec3(u(rng), u(rng), u(rng)));
  loop.vertices.push_back(loop.vertices.front());
  loop.burgers = Vec3(u(rng), u(rng), u(rng));
  return loop;
}

}  // namespace

TEST_CASE("total_variation") {
  LineMeasure sq{{square_loop(Vec3(0.5, 0.5, 0.5), 1.0, 2, Vec3(1, 0, 0))}};
  CHECK(total_variation(sq) == doctest::Approx(4.0).epsilon(1e-15));

  const auto loop = square_loop(Vec3(0.5, 0.5, 0.5), 0.4, 0, Vec3(0.3, -0.2, 0.7));
  auto twice = loop;
  twice.burgers *= 2.0;
  const double single = total_variation(LineMeasure{{loop}});
  CHECK(total_variation(LineMeasure{{loop, twice}}) == doctest::Approx(3.0 * single).epsilon(1e-14));
  CHECK(total_variation(LineMeasure{{loop}}.scaled(-2.5)) == doctest::Approx(2.5 * single).epsilon(1e-14));

  LineMeasure hex{{polygon_loop(Vec3(0.5, 0.5, 0.5), 0.3, 6, 1, Vec3(0, 0, 1))}};
  CHECK(total_variation(hex) == doctest::Approx(1.8).epsilon(1e-14));
}

TEST_CASE("open loops are rejected") {
  DislocationLoop open;
  open.vertices = {Vec3(0.2, 0.2, 0.5), Vec3(0.8, 0.2, 0.5), Vec3(0.8, 0.8, 0.5)};
  open.burgers = Vec3(1, 0, 0);
  const LineMeasure m{{square_loop(Vec3(0.5, 0.5, 0.5), 0.5, 2, Vec3(1, 0, 0)), open}};
  CHECK_THROWS_AS(check_divergence_free(m), OpenLoop);
  CHECK_THROWS_AS(total_variation(m), OpenLoop);
  try {
    check_divergence_free(m);
  } catch (const OpenLoop& e) {
    CHECK(std::string(e.what()).find("loop 1") != std::string::npos);
  }

  auto repeated = square_loop(Vec3(0.5, 0.5, 0.5), 0.5, 2, Vec3(1, 0, 0));
  repeated.vertices.insert(repeated.vertices.begin() + 1, repeated.vertices[1]);
  CHECK_THROWS_AS(check_divergence_free(LineMeasure{{repeated}}), OpenLoop);

  CHECK(check_divergence_free(LineMeasure{{square_loop(Vec3(0.5, 0.5, 0.5), 0.5, 2, Vec3(1, 0, 0))}}) == 0.0);
}

TEST_CASE("validate against the domain") {
  const Box omega;
  CHECK_NOTHROW(validate(LineMeasure{{square_loop(Vec3(0.5, 0.5, 0.5), 0.5, 2, Vec3(1, 0, 0))}}, omega));
  CHECK_THROWS_AS(validate(LineMeasure{{square_loop(Vec3(0.5, 0.5, 0.5), 1.0, 2, Vec3(1, 0, 0))}}, omega),
                  ConfigError);
}

TEST_CASE("mollify preconditions") {
  const auto grid = cube_grid(2.0, 32);
  const LineMeasure m{{square_loop(Vec3(1, 1, 1), 0.5, 2, Vec3(1, 0, 0))}};
  CHECK_THROWS_AS(mollify(m, grid, 1.5 * grid.spacing(0)), KernelTooNarrow);
  CHECK_THROWS_AS(mollify(LineMeasure{{square_loop(Vec3(1, 1, 1), 1.5, 2, Vec3(1, 0, 0))}}, grid, 0.125),
                  LoopTooCloseToBoundary);

  const auto empty = mollify(LineMeasure{}, grid, 0.125);
  CHECK(empty.max_abs() == 0.0);
  CHECK(check_divergence_free(empty) == 0.0);
}

TEST_CASE("rasterized loops are divergence free with zero means") {
  const auto grid = cube_grid(2.0, 32);
  const double h = grid.spacing(0);
  const LineMeasure m{{square_loop(Vec3(1, 1, 1), 0.6, 2, Vec3(1, 0.5, 0))}};
  const auto g = mollify(m, grid, 3.0 * h);
  CHECK(check_divergence_free(g) < 1e-10);
  CHECK(g.max_component_integral() / total_variation(m) < 1e-14);
  MESSAGE("mean correction " << g.mean_correction << ", projection change " << g.projection_change);

  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 8; ++trial) {
    const LineMeasure r{{random_polygon(rng, Vec3(1, 1, 1), 0.45), random_polygon(rng, Vec3(1, 1, 1), 0.4)}};
    const auto gr = mollify(r, grid, 2.0 * h + 0.1 * h * trial);
    CHECK(check_divergence_free(gr) < 1e-10);
    CHECK(gr.max_component_integral() / total_variation(r) < 1e-14);
  }
}

TEST_CASE("mass of the mollified square loop") {
  const auto grid = cube_grid(1.5, 96);
  const double h = grid.spacing(0);
  const LineMeasure m{{square_loop(Vec3(0.75, 0.75, 0.75), 1.0, 2, Vec3(0, 0, 1))}};
  const double tv = total_variation(m);
  const auto g4 = mollify(m, grid, 4.0 * h), g2 = mollify(m, grid, 2.0 * h);
  const double e4 = std::abs(g4.deposit_mass - tv) / tv;
  const double e2 = std::abs(g2.deposit_mass - tv) / tv;
  MESSAGE("relative mass error: delta=4h " << e4 << ", delta=2h " << e2 << "; after projection "
                                           << g4.total_mass() / tv - 1.0 << ", " << g2.total_mass() / tv - 1.0);
  CHECK(e4 < 0.02);
  CHECK(e2 < 0.02);
  CHECK(e2 < e4);
}

TEST_CASE("mollify is linear") {
  const auto grid = cube_grid(2.0, 32);
  const double delta = 3.0 * grid.spacing(0);
  const DislocationLoop a = square_loop(Vec3(1, 1, 1), 0.6, 2, Vec3(1, 0, 0));
  const DislocationLoop b = polygon_loop(Vec3(0.9, 1.1, 1.0), 0.3, 6, 0, Vec3(0.2, 0.4, -1));
  const auto ga = mollify(LineMeasure{{a}}, grid, delta);
  const auto gb = mollify(LineMeasure{{b}}, grid, delta);
  const auto gab = mollify(LineMeasure{{a, b}}, grid, delta);
  GridMeasure sum = ga;
  for (int c = 0; c < 9; ++c)
    for (std::size_t n = 0; n < sum.comp[c].size(); ++n) sum.comp[c][n] += gb.comp[c][n];
  CHECK(max_diff(sum, gab) < 1e-12 * gab.max_abs());

  const auto g2 = mollify(LineMeasure{{a}}.scaled(2.0), grid, delta);
  GridMeasure twice = ga;
  for (auto& c : twice.comp)
    for (double& v : c) v *= 2.0;
  CHECK(max_diff(twice, g2) == 0.0);
}

TEST_CASE("periodic straight line is translation invariant") {
  const auto grid = cube_grid(2.0, 32);
  GridMeasure g(grid, 3.0 * grid.spacing(0));
  deposit_segment(g, Vec3(1.03, 0.97, 0.0), Vec3(1.03, 0.97, 2.0), Vec3(0, 0, 1));
  finalize(g);
  const double scale = g.max_abs();
  REQUIRE(scale > 0.0);
  double worst = 0.0;
  for (int c = 0; c < 9; ++c)
    for (int k = 1; k < grid.n[2]; ++k)
      for (int j = 0; j < grid.n[1]; ++j)
        for (int i = 0; i < grid.n[0]; ++i)
          worst = std::max(worst, std::abs(g.comp[c][grid.index(i, j, k)] - g.comp[c][grid.index(i, j, 0)]));
  CHECK(worst / scale < 1e-12);
  CHECK(check_divergence_free(g) < 1e-10);
}

TEST_CASE("bump kernel") {
  CHECK(bump_kernel(0.2, 0.2) == 0.0);
  CHECK(bump_kernel(0.0, 1.0) == doctest::Approx(315.0 / (64.0 * M_PI)));
  // unit mass by radial quadrature
  const double delta = 0.7;
  const int n = 20000;
  double mass = 0.0;
  for (int i = 0; i < n; ++i) {
    const double r = (i + 0.5) * delta / n;
    mass += 4.0 * M_PI * r * r * bump_kernel(r, delta) * delta / n;
  }
  CHECK(mass == doctest::Approx(1.0).epsilon(1e-8));
}
