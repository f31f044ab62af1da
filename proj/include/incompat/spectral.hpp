#pragma once

#include <array>
#include <complex>
#include <memory>
#include <vector>

#include "incompat/mesh.hpp"
#include "incompat/tensor.hpp"

namespace incompat {

/// Uniform periodic sampling grid; sample (i,j,k) sits at origin + (i,j,k) * spacing,
/// x fastest in memory.
struct PeriodicGrid {
  Vec3 origin = Vec3::Zero();
  Vec3 spacing = Vec3::Ones();
  std::array<int, 3> n{1, 1, 1};

  std::size_t size() const { return std::size_t(n[0]) * n[1] * n[2]; }
  std::size_t index(int i, int j, int k) const { return (std::size_t(k) * n[1] + j) * n[0] + i; }
  Vec3 position(int i, int j, int k) const { return origin + Vec3(i * spacing(0), j * spacing(1), k * spacing(2)); }
  Vec3 length() const { return Vec3(n[0] * spacing(0), n[1] * spacing(1), n[2] * spacing(2)); }
  double cell_volume() const { return spacing.prod(); }
  /// Grid index of mesh node (0,0,0); throws if the mesh is not node-aligned with the grid.
  std::array<int, 3> mesh_offset(const HexMesh& mesh) const;
};

/// Periodic box covering a mesh with `pad` extra cells per face and axis
/// (rounded up so every dimension is even).
PeriodicGrid padded_grid(const HexMesh& mesh, std::array<int, 3> pad);

/// Padding rule for the curl inverse: max(4 delta, 25% of the side) per face.
PeriodicGrid padded_grid(const HexMesh& mesh, double delta);

/// Real-to-complex 3-D FFT on a PeriodicGrid (FFTW backend). Forward is
/// unnormalized; inverse divides by the number of samples.
class Fft3 {
 public:
  explicit Fft3(const PeriodicGrid& grid);
  ~Fft3();
  Fft3(const Fft3&) = delete;
  Fft3& operator=(const Fft3&) = delete;

  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }
  /// Half-spectrum index of wavenumber indices (kx in [0, nx/2], ky, kz full).
  std::size_t spectral_index(int kx, int ky, int kz) const {
    return (std::size_t(kz) * grid_.n[1] + ky) * (grid_.n[0] / 2 + 1) + kx;
  }
  int half_nx() const { return grid_.n[0] / 2 + 1; }

  /// Angular wavenumber 2 pi m / L for index idx on axis; `nyquist` set when
  /// the index is the unpaired Nyquist mode of an even axis.
  double wavenumber(int axis, int idx, bool* nyquist = nullptr) const;

  void forward(const std::vector<double>& in, std::vector<std::complex<double>>& out);
  void inverse(const std::vector<std::complex<double>>& in, std::vector<double>& out);

  const PeriodicGrid& grid() const { return grid_; }

  /// Visit every half-spectrum mode with its wavevector.
  template <class F>
  void for_each_mode(F&& f) const {
    for (int kz = 0; kz < grid_.n[2]; ++kz)
      for (int ky = 0; ky < grid_.n[1]; ++ky)
        for (int kx = 0; kx < half_nx(); ++kx) {
          bool nx = false, ny = false, nz = false;
          const Vec3 k(wavenumber(0, kx, &nx), wavenumber(1, ky, &ny), wavenumber(2, kz, &nz));
          f(spectral_index(kx, ky, kz), k, nx || ny || nz);
        }
  }

 private:
  struct Plans;
  PeriodicGrid grid_;
  std::size_t real_size_, complex_size_;
  std::unique_ptr<Plans> plans_;
};

}  // namespace incompat
