#include "incompat/dislocation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "incompat/errors.hpp"

namespace incompat {

bool DislocationLoop::closed() const {
  return vertices.size() >= 4 && (vertices.front() - vertices.back()).norm() == 0.0;
}

double DislocationLoop::length() const {
  double l = 0.0;
  for (std::size_t i = 1; i < vertices.size(); ++i) l += (vertices[i] - vertices[i - 1]).norm();
  return l;
}

LineMeasure LineMeasure::scaled(double s) const {
  LineMeasure out = *this;
  for (auto& l : out.loops) l.burgers *= s;
  return out;
}

namespace {

std::array<int, 2> plane_axes(int normal_axis) {
  return {(normal_axis + 1) % 3, (normal_axis + 2) % 3};
}

void validate_shape(const LineMeasure& m) {
  for (std::size_t l = 0; l < m.loops.size(); ++l) {
    const auto& loop = m.loops[l];
    if (!loop.closed()) {
      std::ostringstream os;
      os << "loop " << l << " is not closed (first vertex must equal last, at least 3 distinct vertices)";
      throw OpenLoop(os.str());
    }
    for (std::size_t i = 1; i < loop.vertices.size(); ++i) {
      if ((loop.vertices[i] - loop.vertices[i - 1]).norm() == 0.0) {
        std::ostringstream os;
        os << "loop " << l << " has repeated consecutive vertices at index " << i;
        throw OpenLoop(os.str());
      }
    }
  }
}

}  // namespace

DislocationLoop square_loop(const Vec3& centre, double side, int normal_axis, const Vec3& burgers) {
  const auto [a, b] = plane_axes(normal_axis);
  const double h = 0.5 * side;
  DislocationLoop loop;
  loop.burgers = burgers;
  const std::array<std::array<double, 2>, 5> corners = {{{-h, -h}, {h, -h}, {h, h}, {-h, h}, {-h, -h}}};
  for (const auto& c : corners) {
    Vec3 v = centre;
    v(a) += c[0];
    v(b) += c[1];
    loop.vertices.push_back(v);
  }
  return loop;
}

DislocationLoop polygon_loop(const Vec3& centre, double radius, int sides, int normal_axis, const Vec3& burgers) {
  const auto [a, b] = plane_axes(normal_axis);
  DislocationLoop loop;
  loop.burgers = burgers;
  for (int i = 0; i < sides; ++i) {
    const double t = 2.0 * std::numbers::pi * i / sides;
    Vec3 v = centre;
    v(a) += radius * std::cos(t);
    v(b) += radius * std::sin(t);
    loop.vertices.push_back(v);
  }
  loop.vertices.push_back(loop.vertices.front());
  return loop;
}

void validate(const LineMeasure& m, const Box& omega) {
  validate_shape(m);
  for (std::size_t l = 0; l < m.loops.size(); ++l) {
    for (const auto& v : m.loops[l].vertices) {
      const Vec3 lo = v - omega.origin, hi = omega.origin + omega.size - v;
      if ((lo.array() <= 0.0).any() || (hi.array() <= 0.0).any()) {
        std::ostringstream os;
        os << "loop " << l << " has a vertex outside the open domain";
        throw ConfigError(os.str());
      }
    }
  }
}

double total_variation(const LineMeasure& m) {
  validate_shape(m);
  double tv = 0.0;
  for (const auto& l : m.loops) tv += l.burgers.norm() * l.length();
  return tv;
}

double check_divergence_free(const LineMeasure& m) {
  validate_shape(m);
  return 0.0;
}

// --- grid measure ----------------------------------------------------------

GridMeasure::GridMeasure(const PeriodicGrid& g, double d) : grid(g), delta(d) {
  for (auto& c : comp) c.assign(grid.size(), 0.0);
}

double GridMeasure::total_mass() const {
  double s = 0.0;
  for (std::size_t n = 0; n < grid.size(); ++n) {
    double f = 0.0;
    for (const auto& c : comp) f += c[n] * c[n];
    s += std::sqrt(f);
  }
  return s * grid.cell_volume();
}

double GridMeasure::max_abs() const {
  double m = 0.0;
  for (const auto& c : comp)
    for (double v : c) m = std::max(m, std::abs(v));
  return m;
}

double GridMeasure::max_component_integral() const {
  double m = 0.0;
  for (const auto& c : comp) {
    double s = 0.0;
    for (double v : c) s += v;
    m = std::max(m, std::abs(s * grid.cell_volume()));
  }
  return m;
}

double bump_kernel(double r, double delta) {
  if (r >= delta) return 0.0;
  const double q = 1.0 - (r * r) / (delta * delta);
  return 315.0 / (64.0 * std::numbers::pi * delta * delta * delta) * q * q * q;
}

void deposit_segment(GridMeasure& g, const Vec3& a, const Vec3& b, const Vec3& burgers) {
  const double len = (b - a).norm();
  if (len == 0.0) return;
  const Vec3 t = (b - a) / len;
  const double delta = g.delta;
  const double norm = 315.0 / (64.0 * std::numbers::pi * delta * delta * delta);
  const Mat3 density = burgers * t.transpose();
  g.source_variation += burgers.norm() * len;

  // Antiderivative of (q - u^2)^3 in u = sigma / delta.
  auto prim = [](double q, double u) {
    const double u2 = u * u, u3 = u2 * u, u5 = u3 * u2, u7 = u5 * u2;
    return q * q * q * u - q * q * u3 + 0.6 * q * u5 - u7 / 7.0;
  };

  std::array<int, 3> lo, hi;
  for (int d = 0; d < 3; ++d) {
    const double mn = std::min(a(d), b(d)) - delta, mx = std::max(a(d), b(d)) + delta;
    lo[d] = int(std::ceil((mn - g.grid.origin(d)) / g.grid.spacing(d)));
    hi[d] = int(std::floor((mx - g.grid.origin(d)) / g.grid.spacing(d)));
  }
  auto wrap = [](int i, int n) { return ((i % n) + n) % n; };
  for (int k = lo[2]; k <= hi[2]; ++k)
    for (int j = lo[1]; j <= hi[1]; ++j)
      for (int i = lo[0]; i <= hi[0]; ++i) {
        const Vec3 x = g.grid.position(i, j, k);
        const Vec3 r = x - a;
        const double s0 = r.dot(t);
        const double d2 = std::max(0.0, r.squaredNorm() - s0 * s0);
        if (d2 >= delta * delta) continue;
        const double half = std::sqrt(delta * delta - d2);
        const double s_lo = std::max(0.0, s0 - half), s_hi = std::min(len, s0 + half);
        if (s_lo >= s_hi) continue;
        const double q = 1.0 - d2 / (delta * delta);
        const double val = norm * delta * (prim(q, (s_hi - s0) / delta) - prim(q, (s_lo - s0) / delta));
        const std::size_t idx = g.grid.index(wrap(i, g.grid.n[0]), wrap(j, g.grid.n[1]), wrap(k, g.grid.n[2]));
        for (int p = 0; p < 3; ++p)
          for (int c = 0; c < 3; ++c) g.comp[3 * p + c][idx] += val * density(p, c);
      }
}

void finalize(GridMeasure& g) {
  Fft3 fft(g.grid);
  const double raw_max = g.max_abs();
  g.deposit_mass = g.total_mass();
  const double vol = g.grid.length().prod();
  const double scale = g.source_variation > 0.0 ? g.source_variation : 1.0;

  std::array<std::vector<std::complex<double>>, 9> hat;
  std::array<std::vector<double>, 9> demeaned;
  g.mean_correction = 0.0;
  for (int c = 0; c < 9; ++c) {
    fft.forward(g.comp[c], hat[c]);
    const double mean = hat[c][0].real() / double(g.grid.size());
    g.mean_correction = std::max(g.mean_correction, std::abs(mean * vol) / scale);
    demeaned[c] = g.comp[c];
    for (double& v : demeaned[c]) v -= mean;
  }
  fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
    const double k2 = k.squaredNorm();
    for (int row = 0; row < 3; ++row) {
      auto* v = &hat[3 * row];
      if (k2 == 0.0 || nyquist) {
        for (int c = 0; c < 3; ++c) v[c][idx] = 0.0;
        continue;
      }
      const std::complex<double> kv = k(0) * v[0][idx] + k(1) * v[1][idx] + k(2) * v[2][idx];
      for (int c = 0; c < 3; ++c) v[c][idx] -= k(c) * kv / k2;
    }
  });
  double change = 0.0;
  for (int c = 0; c < 9; ++c) {
    fft.inverse(hat[c], g.comp[c]);
    for (std::size_t n = 0; n < g.comp[c].size(); ++n)
      change = std::max(change, std::abs(g.comp[c][n] - demeaned[c][n]));
  }
  g.projection_change = raw_max > 0.0 ? change / raw_max : 0.0;
}

GridMeasure mollify(const LineMeasure& m, const PeriodicGrid& grid, double delta) {
  validate_shape(m);
  if (!(delta >= 2.0 * grid.spacing.maxCoeff() * (1.0 - 1e-12))) {
    std::ostringstream os;
    os << "mollification width " << delta << " is below two grid spacings (" << 2.0 * grid.spacing.maxCoeff() << ")";
    throw KernelTooNarrow(os.str());
  }
  const Vec3 lo = grid.origin, hi = grid.origin + grid.length();
  for (std::size_t l = 0; l < m.loops.size(); ++l) {
    for (const auto& v : m.loops[l].vertices) {
      const double clearance = std::min((v - lo).minCoeff(), (hi - v).minCoeff());
      if (clearance <= 3.0 * delta) {
        std::ostringstream os;
        os << "loop " << l << " comes within " << clearance << " of the periodic box boundary (needs > "
           << 3.0 * delta << ")";
        throw LoopTooCloseToBoundary(os.str());
      }
    }
  }
  GridMeasure g(grid, delta);
  for (const auto& loop : m.loops)
    for (std::size_t i = 1; i < loop.vertices.size(); ++i)
      deposit_segment(g, loop.vertices[i - 1], loop.vertices[i], loop.burgers);
  finalize(g);
  return g;
}

double check_divergence_free(const GridMeasure& g) {
  if (g.max_abs() == 0.0) return 0.0;
  Fft3 fft(g.grid);
  std::array<std::vector<std::complex<double>>, 9> hat;
  for (int c = 0; c < 9; ++c) fft.forward(g.comp[c], hat[c]);
  const double scale = (g.source_variation > 0.0 ? g.source_variation : g.total_mass()) /
                       (g.delta * g.delta * g.delta);
  double worst = 0.0;
  std::vector<std::complex<double>> div(fft.complex_size());
  std::vector<double> out;
  for (int row = 0; row < 3; ++row) {
    fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
      const std::complex<double> ik(0.0, 1.0);
      div[idx] = nyquist ? 0.0 : ik * (k(0) * hat[3 * row][idx] + k(1) * hat[3 * row + 1][idx] +
                                        k(2) * hat[3 * row + 2][idx]);
    });
    fft.inverse(div, out);
    for (double v : out) worst = std::max(worst, std::abs(v));
  }
  return worst / scale;
}

}  // namespace incompat
