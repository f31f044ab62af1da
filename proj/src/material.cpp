#include "incompat/material.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace incompat {

namespace {

bool near_integer(double x) { return std::abs(x - std::round(x)) < 1e-9; }

double frac(double x) { return x - std::floor(x); }

}  // namespace

ElasticTensorField::ElasticTensorField(const HexMesh& mesh, std::vector<Tensor4> palette,
                                       std::vector<std::uint16_t> phase)
    : mesh_(mesh), palette_(std::move(palette)), phase_(std::move(phase)) {
  if (phase_.size() != mesh_.num_cells()) throw std::invalid_argument("one phase index per cell required");
  for (auto p : phase_)
    if (p >= palette_.size()) throw std::invalid_argument("phase index outside palette");
}

ElasticTensorField ElasticTensorField::constant(const HexMesh& mesh, const Tensor4& c) {
  return ElasticTensorField(mesh, {c}, std::vector<std::uint16_t>(mesh.num_cells(), 0));
}

ElasticTensorField ElasticTensorField::laminate(const HexMesh& mesh, int axis, double fraction,
                                                const Tensor4& phase_a, const Tensor4& phase_b,
                                                double period) {
  if (axis < 0 || axis > 2) throw std::invalid_argument("laminate axis must be 0, 1 or 2");
  if (!(fraction > 0.0 && fraction < 1.0)) throw std::invalid_argument("volume fraction must lie in (0,1)");
  if (!(period > 0.0)) throw std::invalid_argument("laminate period must be positive");
  const double h = mesh.spacing()(axis);
  if (!near_integer(period / h) || !near_integer(fraction * period / h)) {
    throw std::invalid_argument("laminate interfaces do not fall on cell faces");
  }
  std::vector<std::uint16_t> phase(mesh.num_cells());
  for (std::size_t c = 0; c < phase.size(); ++c) {
    const double t = frac((mesh.cell_center(c)(axis) - mesh.box().origin(axis)) / period);
    phase[c] = t < fraction ? 0 : 1;
  }
  return ElasticTensorField(mesh, {phase_a, phase_b}, std::move(phase));
}

ElasticTensorField ElasticTensorField::periodic_sampled(const HexMesh& mesh, const ElasticTensorField& cell,
                                                        double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("epsilon must be positive");
  const auto& m = cell.mesh().cells();
  std::vector<std::uint16_t> phase(mesh.num_cells());
  for (std::size_t c = 0; c < phase.size(); ++c) {
    const Vec3 y = (mesh.cell_center(c) - mesh.box().origin) / eps;
    std::array<int, 3> idx;
    for (int d = 0; d < 3; ++d) idx[d] = std::min(m[d] - 1, int(std::floor(frac(y(d)) * m[d])));
    phase[c] = cell.phases()[cell.mesh().cell_index(idx[0], idx[1], idx[2])];
  }
  return ElasticTensorField(mesh, cell.palette(), std::move(phase));
}

std::vector<double> ElasticTensorField::fractions() const {
  std::vector<double> f(palette_.size(), 0.0);
  for (auto p : phase_) f[p] += 1.0;
  for (auto& v : f) v /= double(phase_.size());
  return f;
}

Tensor4 ElasticTensorField::mean() const {
  const auto f = fractions();
  Mat6 m = Mat6::Zero();
  for (std::size_t p = 0; p < palette_.size(); ++p) m += f[p] * palette_[p].mandel();
  return Tensor4(m);
}

Tensor4 ElasticTensorField::harmonic_mean() const {
  const auto f = fractions();
  Mat6 m = Mat6::Zero();
  for (std::size_t p = 0; p < palette_.size(); ++p) {
    if (f[p] > 0.0) m += f[p] * palette_[p].inverse_on_sym().mandel();
  }
  return Tensor4(Mat6(m.inverse()));
}

ElasticTensorField ElasticTensorField::scaled(double s) const {
  std::vector<Tensor4> pal;
  pal.reserve(palette_.size());
  for (const auto& t : palette_) pal.push_back(t * s);
  return ElasticTensorField(mesh_, std::move(pal), phase_);
}

EllipticityResult ElasticTensorField::check_ellipticity(double c0, double c1) const {
  EllipticityResult worst;
  worst.pass = true;
  bool first = true;
  const auto f = fractions();
  for (std::size_t p = 0; p < palette_.size(); ++p) {
    if (f[p] == 0.0) continue;
    const auto r = incompat::check_ellipticity(palette_[p], c0, c1);
    worst.min_relative = first ? r.min_relative : std::min(worst.min_relative, r.min_relative);
    worst.max_relative = first ? r.max_relative : std::max(worst.max_relative, r.max_relative);
    worst.pass = worst.pass && r.pass;
    first = false;
  }
  return worst;
}

TensorField apply_tensor(const ElasticTensorField& c, const TensorField& beta) {
  TensorField out(beta.mesh());
  if (beta.mesh().num_cells() != c.mesh().num_cells()) {
    throw std::invalid_argument("tensor field and material live on different meshes");
  }
  for (std::size_t cell = 0; cell < beta.mesh().num_cells(); ++cell) {
    const Tensor4& t = c.at(cell);
    for (int g = 0; g < HexMesh::kGaussPerCell; ++g) out.at(cell, g) = t.apply(beta.at(cell, g));
  }
  return out;
}

VmoReport vmo_modulus(const ElasticTensorField& field, const std::vector<double>& radii, int max_centers) {
  const HexMesh& mesh = field.mesh();
  const auto& n = mesh.cells();
  const Vec3 h = mesh.spacing();
  const double diam = mesh.box().diameter();
  const std::size_t np = field.palette().size();

  VmoReport rep;
  std::vector<double> rs;
  for (double r : radii) {
    if (!(r > 0.0)) throw std::invalid_argument("VMO radii must be positive");
    rs.push_back(r);
  }
  std::sort(rs.begin(), rs.end(), std::greater<>());

  int stride = 1;
  while ((std::size_t((n[0] + stride - 1) / stride) * ((n[1] + stride - 1) / stride) *
          ((n[2] + stride - 1) / stride)) > std::size_t(max_centers)) {
    ++stride;
  }
  rep.center_stride = stride;
  {
    std::ostringstream os;
    os << "cell centres with stride " << stride << ", rho in {r, r/2, r/4}, balls intersected with the domain";
    rep.lattice = os.str();
  }

  std::vector<double> count(np);
  auto oscillation = [&](int ci, int cj, int ck, double rho) {
    std::fill(count.begin(), count.end(), 0.0);
    const Vec3 x0 = mesh.cell_center(mesh.cell_index(ci, cj, ck));
    std::array<int, 3> lo, hi, c{ci, cj, ck};
    for (int d = 0; d < 3; ++d) {
      const int w = int(std::ceil(rho / h(d)));
      lo[d] = std::max(0, c[d] - w);
      hi[d] = std::min(n[d] - 1, c[d] + w);
    }
    double total = 0.0;
    for (int k = lo[2]; k <= hi[2]; ++k)
      for (int j = lo[1]; j <= hi[1]; ++j)
        for (int i = lo[0]; i <= hi[0]; ++i) {
          const std::size_t cell = mesh.cell_index(i, j, k);
          if ((mesh.cell_center(cell) - x0).norm() > rho) continue;
          count[field.phases()[cell]] += 1.0;
          total += 1.0;
        }
    // avg |C - avg C| with C taking palette values: uses the fractions only.
    Mat6 avg = Mat6::Zero();
    for (std::size_t p = 0; p < np; ++p) avg += (count[p] / total) * field.palette()[p].mandel();
    double osc = 0.0;
    for (std::size_t p = 0; p < np; ++p)
      if (count[p] > 0.0) osc += (count[p] / total) * (field.palette()[p].mandel() - avg).norm();
    return osc;
  };

  for (double r0 : rs) {
    const bool clamp = r0 > diam;
    const double r = clamp ? diam : r0;
    double sup = 0.0;
    if (np > 1) {
      for (double rho : {r, 0.5 * r, 0.25 * r})
        for (int k = 0; k < n[2]; k += stride)
          for (int j = 0; j < n[1]; j += stride)
            for (int i = 0; i < n[0]; i += stride) sup = std::max(sup, oscillation(i, j, k, rho));
    }
    rep.radii.push_back(r);
    rep.modulus.push_back(sup);
    rep.clamped.push_back(clamp);
  }
  for (std::size_t i = 1; i < rep.modulus.size(); ++i)
    if (rep.modulus[i] > rep.modulus[i - 1] * (1.0 + 1e-12) + 1e-300) rep.monotone = false;
  return rep;
}

}  // namespace incompat
