#pragma once

#include <array>
#include <complex>
#include <vector>

#include "incompat/dislocation.hpp"
#include "incompat/mesh.hpp"
#include "incompat/spectral.hpp"

namespace incompat {

/// Matrix field on a periodic grid held by its Fourier coefficients (half
/// spectrum, unnormalized FFT convention), one array per component 3 i + j.
/// Band-limited, so it can be evaluated exactly at any sub-grid shift.
class SpectralTensorField {
 public:
  SpectralTensorField() = default;
  explicit SpectralTensorField(const PeriodicGrid& grid);

  const PeriodicGrid& grid() const { return grid_; }
  std::array<std::vector<std::complex<double>>, 9>& coefficients() { return hat_; }
  const std::array<std::vector<std::complex<double>>, 9>& coefficients() const { return hat_; }

  /// Values at grid position + shift, one array per component.
  std::array<std::vector<double>, 9> sample(const Vec3& shift = Vec3::Zero()) const;

  /// Values at the Gauss points of a mesh whose nodes lie on the grid.
  TensorField restrict_to(const HexMesh& mesh) const;

  SpectralTensorField& operator+=(const SpectralTensorField& o);
  SpectralTensorField& operator*=(double s);

  /// Spectral gradient D w of a periodic vector field given by samples.
  static SpectralTensorField gradient_of(const PeriodicGrid& grid, const std::array<std::vector<double>, 3>& w);

 private:
  PeriodicGrid grid_;
  std::array<std::vector<std::complex<double>>, 9> hat_;
};

/// Row-wise Biot-Savart inverse: for each row solve the periodic vector
/// Poisson problem Lap psi_i = -mu_i with exact ik symbols and set
/// beta_i = curl psi_i, so that curl beta = mu and div beta_i = 0.
/// Throws NonZeroMean if a component mean exceeds 1e-10 (relative to |mu|),
/// NotDivergenceFree if check_divergence_free exceeds 1e-8.
SpectralTensorField solve_beta_mu(const GridMeasure& m);

/// max |curl beta - mu| / max |mu| with spectral derivatives of the sampled beta.
double curl_residual(const SpectralTensorField& beta, const GridMeasure& m);

/// max over rows of |div beta_i|, relative to max |mu| (absolute when mu = 0).
double div_residual(const SpectralTensorField& beta, const GridMeasure& m);

}  // namespace incompat
