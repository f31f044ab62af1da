#include "incompat/curl_inverse.hpp"

#include <cmath>
#include <sstream>

#include "incompat/errors.hpp"

namespace incompat {

namespace {

const std::complex<double> kI(0.0, 1.0);

// Spectral curl of row `row` of a coefficient set: (ik x v)_c.
std::complex<double> curl_component(const std::array<std::vector<std::complex<double>>, 9>& hat, int row, int c,
                                    std::size_t idx, const Vec3& k) {
  const int a = (c + 1) % 3, b = (c + 2) % 3;
  return kI * (k(a) * hat[3 * row + b][idx] - k(b) * hat[3 * row + a][idx]);
}

}  // namespace

SpectralTensorField::SpectralTensorField(const PeriodicGrid& grid) : grid_(grid) {
  const std::size_t nc = std::size_t(grid.n[2]) * grid.n[1] * (grid.n[0] / 2 + 1);
  for (auto& h : hat_) h.assign(nc, 0.0);
}

std::array<std::vector<double>, 9> SpectralTensorField::sample(const Vec3& shift) const {
  Fft3 fft(grid_);
  std::vector<std::complex<double>> phase(fft.complex_size());
  fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
    phase[idx] = nyquist ? 0.0 : std::exp(kI * k.dot(shift));
  });
  std::array<std::vector<double>, 9> out;
  std::vector<std::complex<double>> tmp(fft.complex_size());
  for (int c = 0; c < 9; ++c) {
    for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] = hat_[c][i] * phase[i];
    fft.inverse(tmp, out[c]);
  }
  return out;
}

TensorField SpectralTensorField::restrict_to(const HexMesh& mesh) const {
  const auto off = grid_.mesh_offset(mesh);
  TensorField out(mesh);
  for (int g = 0; g < HexMesh::kGaussPerCell; ++g) {
    const Vec3 shift = HexMesh::gauss_offset(g).cwiseProduct(grid_.spacing);
    const auto vals = sample(shift);
    for (std::size_t c = 0; c < mesh.num_cells(); ++c) {
      const auto [i, j, k] = mesh.cell_ijk(c);
      const std::size_t idx = grid_.index(off[0] + i, off[1] + j, off[2] + k);
      Mat3& m = out.at(c, g);
      for (int p = 0; p < 3; ++p)
        for (int q = 0; q < 3; ++q) m(p, q) = vals[3 * p + q][idx];
    }
  }
  return out;
}

SpectralTensorField& SpectralTensorField::operator+=(const SpectralTensorField& o) {
  for (int c = 0; c < 9; ++c) {
    if (o.hat_[c].size() != hat_[c].size()) throw std::invalid_argument("spectral field size mismatch");
    for (std::size_t i = 0; i < hat_[c].size(); ++i) hat_[c][i] += o.hat_[c][i];
  }
  return *this;
}

SpectralTensorField& SpectralTensorField::operator*=(double s) {
  for (auto& h : hat_)
    for (auto& v : h) v *= s;
  return *this;
}

SpectralTensorField SpectralTensorField::gradient_of(const PeriodicGrid& grid,
                                                     const std::array<std::vector<double>, 3>& w) {
  SpectralTensorField out(grid);
  Fft3 fft(grid);
  for (int i = 0; i < 3; ++i) {
    std::vector<std::complex<double>> wh;
    fft.forward(w[i], wh);
    fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
      for (int j = 0; j < 3; ++j) out.hat_[3 * i + j][idx] = nyquist ? 0.0 : kI * k(j) * wh[idx];
    });
  }
  return out;
}

SpectralTensorField solve_beta_mu(const GridMeasure& m) {
  const double scale = m.source_variation > 0.0 ? m.source_variation : std::max(m.total_mass(), 1e-300);
  const double mean = m.max_component_integral() / scale;
  if (mean > 1e-10) {
    std::ostringstream os;
    os << "grid measure has a component mean of relative size " << mean;
    throw NonZeroMean(os.str());
  }
  const double div = check_divergence_free(m);
  if (div > 1e-8) {
    std::ostringstream os;
    os << "grid measure divergence residual " << div << " exceeds 1e-8";
    throw NotDivergenceFree(os.str());
  }

  SpectralTensorField beta(m.grid);
  Fft3 fft(m.grid);
  std::array<std::vector<std::complex<double>>, 9> mu;
  for (int c = 0; c < 9; ++c) fft.forward(m.comp[c], mu[c]);

  auto& hat = beta.coefficients();
  fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
    const double k2 = k.squaredNorm();
    if (k2 == 0.0 || nyquist) return;  // gauge: zero mode of psi set to 0
    for (int row = 0; row < 3; ++row) {
      // psi = mu / |k|^2, beta = ik x psi
      for (int c = 0; c < 3; ++c) hat[3 * row + c][idx] = curl_component(mu, row, c, idx, k) / k2;
    }
  });
  return beta;
}

double curl_residual(const SpectralTensorField& beta, const GridMeasure& m) {
  const double mu_max = m.max_abs();
  Fft3 fft(beta.grid());
  const auto vals = beta.sample();
  std::array<std::vector<std::complex<double>>, 9> hat;
  for (int c = 0; c < 9; ++c) fft.forward(vals[c], hat[c]);
  double worst = 0.0;
  std::vector<std::complex<double>> tmp(fft.complex_size());
  std::vector<double> out;
  for (int row = 0; row < 3; ++row)
    for (int c = 0; c < 3; ++c) {
      fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
        tmp[idx] = nyquist ? 0.0 : curl_component(hat, row, c, idx, k);
      });
      fft.inverse(tmp, out);
      for (std::size_t n = 0; n < out.size(); ++n) worst = std::max(worst, std::abs(out[n] - m.comp[3 * row + c][n]));
    }
  return mu_max > 0.0 ? worst / mu_max : worst;
}

double div_residual(const SpectralTensorField& beta, const GridMeasure& m) {
  const double mu_max = m.max_abs();
  Fft3 fft(beta.grid());
  const auto vals = beta.sample();
  std::array<std::vector<std::complex<double>>, 9> hat;
  for (int c = 0; c < 9; ++c) fft.forward(vals[c], hat[c]);
  double worst = 0.0;
  std::vector<std::complex<double>> tmp(fft.complex_size());
  std::vector<double> out;
  for (int row = 0; row < 3; ++row) {
    fft.for_each_mode([&](std::size_t idx, const Vec3& k, bool nyquist) {
      tmp[idx] = nyquist ? 0.0
                         : kI * (k(0) * hat[3 * row][idx] + k(1) * hat[3 * row + 1][idx] + k(2) * hat[3 * row + 2][idx]);
    });
    fft.inverse(tmp, out);
    for (double v : out) worst = std::max(worst, std::abs(v));
  }
  return mu_max > 0.0 ? worst / mu_max : worst;
}

}  // namespace incompat
