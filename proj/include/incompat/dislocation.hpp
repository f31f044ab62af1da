#pragma once

#include <array>
#include <vector>

#include "incompat/mesh.hpp"
#include "incompat/spectral.hpp"

namespace incompat {

/// Closed polygonal dislocation loop carrying a constant Burgers vector.
/// The density is b (x) tau H^1 restricted to the polygon, tau the unit tangent.
struct DislocationLoop {
  std::vector<Vec3> vertices;  // first == last for a closed loop
  Vec3 burgers = Vec3::Zero();

  bool closed() const;
  double length() const;
};

struct LineMeasure {
  std::vector<DislocationLoop> loops;

  bool empty() const { return loops.empty(); }
  LineMeasure scaled(double s) const;
};

/// Convenience constructors for the standard loop family.
DislocationLoop square_loop(const Vec3& centre, double side, int normal_axis, const Vec3& burgers);
DislocationLoop polygon_loop(const Vec3& centre, double radius, int sides, int normal_axis, const Vec3& burgers);

/// Throws OpenLoop naming the loop index if a loop is not closed or has
/// repeated consecutive vertices, ConfigError if a vertex is not strictly inside omega.
void validate(const LineMeasure& m, const Box& omega);

/// sum over loops |b| * length.
double total_variation(const LineMeasure& m);

/// Returns 0 for a valid measure; throws OpenLoop otherwise.
double check_divergence_free(const LineMeasure& m);

/// Mollified density sampled on a periodic grid. Component (i, j) of row i
/// (Burgers direction) and column j (tangent direction) is stored in comp[3 i + j].
struct GridMeasure {
  PeriodicGrid grid;
  double delta = 0.0;
  std::array<std::vector<double>, 9> comp;
  /// |mu|(Omega) of the source measure (normalization for residuals).
  double source_variation = 0.0;
  /// Largest |integral| of a component removed by mean subtraction, relative to source_variation.
  double mean_correction = 0.0;
  /// Max-norm change made by the divergence-free projection, relative to the deposit's max-norm.
  double projection_change = 0.0;
  /// sum over samples of |mu_delta(x_n)| times the cell volume, taken before finalize
  /// (the projection spreads a small tail over the whole box, see total_mass).
  double deposit_mass = 0.0;

  GridMeasure() = default;
  GridMeasure(const PeriodicGrid& g, double d);

  /// sum over samples of |mu_delta| times the cell volume.
  double total_mass() const;
  double max_abs() const;
  /// Largest |integral| over the box among the nine components.
  double max_component_integral() const;
};

/// Deposits b (x) tau * int_segment rho_delta(x - s) ds at every sample, with
/// exact integration of the polynomial kernel along the segment. Samples are
/// wrapped periodically, so a segment spanning one period deposits a closed line.
void deposit_segment(GridMeasure& g, const Vec3& a, const Vec3& b, const Vec3& burgers);

/// Removes the component means and projects every row onto spectrally
/// divergence-free fields (Nyquist modes dropped); records both corrections.
void finalize(GridMeasure& g);

/// Rasterizes a loop measure: deposit every segment, then finalize.
/// Throws KernelTooNarrow if delta < 2 grid spacings, LoopTooCloseToBoundary
/// if a vertex is within 3 delta of the grid box boundary.
GridMeasure mollify(const LineMeasure& m, const PeriodicGrid& grid, double delta);

/// Max over samples of the spectral row-wise divergence, normalized by |mu| / delta^3.
double check_divergence_free(const GridMeasure& g);

/// rho_delta(r) = 315 / (64 pi delta^3) (1 - r^2/delta^2)^3 for r < delta.
double bump_kernel(double r, double delta);

}  // namespace incompat
