#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "incompat/config.hpp"

namespace incompat {

/// Serializes with every double printed as %.17g (NaN and infinities as null)
/// so identical values always give identical bytes.
std::string dump_json(const Json& j);
void write_json(const std::filesystem::path& path, const Json& j);

Json to_json(const Vec3& v);
Json to_json(const Mat3& m);
Json to_json(const Tensor4& c);  // {"mandel_upper": [21], "mandel": 6x6}
Json to_json(const SolverStats& s);
Json to_json(const EllipticityResult& e);
Json to_json(const VmoReport& v);
Json to_json(const SolveReport& r);
Json to_json(const EffectiveTensor& e);
Json to_json(const BoundCertificate& b);
Json to_json(const GStudyReport& g);

/// Legacy VTK STRUCTURED_POINTS writer, binary, big-endian. Points are the
/// mesh nodes; cell data are per-cell values (Gauss averages for tensor fields).
class VtkWriter {
 public:
  explicit VtkWriter(const HexMesh& mesh, std::string title = "incompat");

  void point_vectors(const std::string& name, const VectorField& u);
  void cell_tensors(const std::string& name, const TensorField& f);
  void cell_scalars(const std::string& name, const std::vector<double>& v);
  void write(const std::filesystem::path& path) const;

 private:
  struct Block {
    std::string kind, name;
    std::vector<double> data;
  };
  HexMesh mesh_;
  std::string title_;
  std::vector<Block> point_, cell_;
};

}  // namespace incompat
