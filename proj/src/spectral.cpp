#include "incompat/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace incompat {

std::array<int, 3> PeriodicGrid::mesh_offset(const HexMesh& mesh) const {
  std::array<int, 3> off;
  for (int d = 0; d < 3; ++d) {
    const double h = spacing(d);
    if (std::abs(mesh.spacing()(d) - h) > 1e-12 * h) throw std::invalid_argument("mesh and grid spacing differ");
    const double p = (mesh.box().origin(d) - origin(d)) / h;
    off[d] = int(std::lround(p));
    if (std::abs(p - off[d]) > 1e-9 || off[d] < 0 || off[d] + mesh.cells()[d] >= n[d]) {
      throw std::invalid_argument("mesh is not node-aligned inside the periodic grid");
    }
  }
  return off;
}

PeriodicGrid padded_grid(const HexMesh& mesh, std::array<int, 3> pad) {
  PeriodicGrid g;
  g.spacing = mesh.spacing();
  for (int d = 0; d < 3; ++d) {
    int n = mesh.cells()[d] + 2 * pad[d];
    if (n % 2) ++n;
    g.n[d] = n;
    g.origin(d) = mesh.box().origin(d) - pad[d] * g.spacing(d);
  }
  return g;
}

PeriodicGrid padded_grid(const HexMesh& mesh, double delta) {
  std::array<int, 3> pad;
  for (int d = 0; d < 3; ++d) {
    const double width = std::max(4.0 * delta, 0.25 * mesh.box().size(d));
    pad[d] = int(std::ceil(width / mesh.spacing()(d) - 1e-9));
  }
  return padded_grid(mesh, pad);
}

struct Fft3::Plans {
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  fftw_plan fwd = nullptr;
  fftw_plan inv = nullptr;
};

Fft3::Fft3(const PeriodicGrid& grid) : grid_(grid), plans_(std::make_unique<Plans>()) {
  real_size_ = grid_.size();
  complex_size_ = std::size_t(grid_.n[2]) * grid_.n[1] * (grid_.n[0] / 2 + 1);
  plans_->real = fftw_alloc_real(real_size_);
  plans_->spec = fftw_alloc_complex(complex_size_);
  // FFTW is row-major with the last index fastest: pass (nz, ny, nx).
  plans_->fwd = fftw_plan_dft_r2c_3d(grid_.n[2], grid_.n[1], grid_.n[0], plans_->real, plans_->spec, FFTW_ESTIMATE);
  plans_->inv = fftw_plan_dft_c2r_3d(grid_.n[2], grid_.n[1], grid_.n[0], plans_->spec, plans_->real, FFTW_ESTIMATE);
  if (!plans_->fwd || !plans_->inv) throw std::runtime_error("FFTW planning failed");
}

Fft3::~Fft3() {
  if (!plans_) return;
  fftw_destroy_plan(plans_->fwd);
  fftw_destroy_plan(plans_->inv);
  fftw_free(plans_->real);
  fftw_free(plans_->spec);
}

double Fft3::wavenumber(int axis, int idx, bool* nyquist) const {
  const int n = grid_.n[axis];
  const int m = idx <= n / 2 ? idx : idx - n;
  if (nyquist) *nyquist = (n % 2 == 0) && idx == n / 2 && n > 1;
  return 2.0 * std::numbers::pi * m / (n * grid_.spacing(axis));
}

void Fft3::forward(const std::vector<double>& in, std::vector<std::complex<double>>& out) {
  if (in.size() != real_size_) throw std::invalid_argument("FFT input size mismatch");
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->fwd);
  out.resize(complex_size_);
  for (std::size_t i = 0; i < complex_size_; ++i) out[i] = {plans_->spec[i][0], plans_->spec[i][1]};
}

void Fft3::inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out) {
  if (in.size() != complex_size_) throw std::invalid_argument("FFT input size mismatch");
  for (std::size_t i = 0; i < complex_size_; ++i) {
    plans_->spec[i][0] = in[i].real();
    plans_->spec[i][1] = in[i].imag();
  }
  fftw_execute(plans_->inv);
  out.resize(real_size_);
  const double s = 1.0 / double(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = plans_->real[i] * s;
}

}  // namespace incompat
