#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "incompat/duality.hpp"
#include "incompat/homogenization.hpp"

namespace incompat {

using Json = nlohmann::ordered_json;

/// Parsed run configuration. `resolved` is the input with every default made
/// explicit; feeding it back through parse_config reproduces the same run.
struct RunConfig {
  Box domain;
  std::array<int, 3> resolution{16, 16, 16};
  Json material;
  Json loops;
  double delta = 0.0;
  std::optional<std::array<int, 3>> pad;
  /// Empty widths select MollificationSchedule::standard on each mesh.
  MollificationSchedule schedule;
  int stages = 6;
  SolverOptions solver;
  std::uint64_t seed = 0;
  std::string output = "incompat_out";

  Json cell;
  std::array<int, 3> cell_resolution{8, 8, 8};
  std::vector<double> epsilons{0.5, 0.25, 0.125};
  double bound_tol = 1e-10;

  std::vector<int> study_resolutions{8, 16, 24};
  double study_delta = 0.0;

  Json resolved;

  HexMesh mesh() const { return HexMesh(domain, resolution); }
  HexMesh cell_mesh() const { return HexMesh(Box{}, cell_resolution); }
  ElasticTensorField build_material(const HexMesh& mesh) const;
  UnitCell build_cell() const;
  LineMeasure build_measure() const;
  /// The incompatible problem on `mesh` with mollification width `delta`.
  IncompatibleProblem problem(const HexMesh& mesh, double delta) const;
};

/// Validates and fills defaults; throws ConfigError with the offending key path.
RunConfig parse_config(const Json& j);
RunConfig load_config(const std::filesystem::path& path);

/// A material description evaluated on a mesh: isotropic, anisotropic,
/// laminate, checkerboard, random (seeded) or periodic (the configured cell
/// sampled with period epsilon).
ElasticTensorField build_material(const Json& spec, const HexMesh& mesh, std::uint64_t seed, const Json& cell,
                                  const std::array<int, 3>& cell_resolution);

}  // namespace incompat
