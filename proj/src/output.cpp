#include "incompat/output.hpp"

#include <bit>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>

namespace incompat {

namespace {

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return "null";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void dump(const Json& j, int depth, std::string& out) {
  const std::string pad(2 * (depth + 1), ' '), close(2 * depth, ' ');
  switch (j.type()) {
    case Json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + Json(k).dump() + ": ";
        dump(v, depth + 1, out);
      }
      out += "\n" + close + "}";
      return;
    }
    case Json::value_t::array: {
      if (j.empty()) {
        out += "[]";
        return;
      }
      // flat arrays of scalars stay on one line
      bool flat = true;
      for (const auto& v : j) flat = flat && !v.is_structured();
      out += flat ? "[" : "[\n";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += flat ? ", " : ",\n";
        if (!flat) out += pad;
        dump(j[i], depth + 1, out);
      }
      out += flat ? "]" : "\n" + close + "]";
      return;
    }
    case Json::value_t::number_float:
      out += fmt_double(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

void put_be(std::ofstream& os, double v) {
  std::uint64_t u;
  std::memcpy(&u, &v, 8);
  if constexpr (std::endian::native == std::endian::little) u = __builtin_bswap64(u);
  os.write(reinterpret_cast<const char*>(&u), 8);
}

}  // namespace

std::string dump_json(const Json& j) {
  std::string out;
  dump(j, 0, out);
  out += "\n";
  return out;
}

void write_json(const std::filesystem::path& path, const Json& j) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  os << dump_json(j);
}

Json to_json(const Vec3& v) { return Json::array({v(0), v(1), v(2)}); }

Json to_json(const Mat3& m) {
  Json a = Json::array();
  for (int i = 0; i < 3; ++i) a.push_back(Json::array({m(i, 0), m(i, 1), m(i, 2)}));
  return a;
}

Json to_json(const Tensor4& c) {
  Json m = Json::array();
  for (int i = 0; i < 6; ++i) {
    Json row = Json::array();
    for (int j = 0; j < 6; ++j) row.push_back(c.mandel()(i, j));
    m.push_back(row);
  }
  const auto u = c.upper_triangle();
  return Json{{"mandel_upper", std::vector<double>(u.begin(), u.end())}, {"mandel", m}};
}

Json to_json(const SolverStats& s) {
  return Json{{"iterations", s.iterations}, {"relative_residual", s.relative_residual}, {"converged", s.converged}};
}

Json to_json(const EllipticityResult& e) {
  return Json{{"pass", e.pass}, {"min_relative", e.min_relative}, {"max_relative", e.max_relative}};
}

Json to_json(const VmoReport& v) {
  Json clamped = Json::array();
  for (bool c : v.clamped) clamped.push_back(c);
  return Json{{"radii", v.radii},   {"modulus", v.modulus},          {"clamped", clamped},
              {"monotone", v.monotone}, {"center_stride", v.center_stride}, {"lattice", v.lattice}};
}

Json to_json(const SolveReport& r) {
  Json stages = Json::array();
  for (const auto& s : r.stages)
    stages.push_back(Json{{"width", s.width},
                          {"defect", s.defect},
                          {"forcing_change", s.forcing_change},
                          {"solver", to_json(s.stats)}});
  return Json{
      {"measure",
       {{"total_variation", r.total_variation},
        {"delta", r.delta},
        {"grid_dims", r.grid_dims},
        {"grid_origin", to_json(r.grid_origin)},
        {"grid_spacing", to_json(r.grid_spacing)},
        {"deposit_mass", r.deposit_mass},
        {"grid_mass", r.grid_mass},
        {"mean_correction", r.mean_correction},
        {"projection_change", r.projection_change},
        {"divergence", r.measure_divergence}}},
      {"curl_inverse",
       {{"curl_residual", r.curl_residual},
        {"div_residual", r.div_residual},
        {"gradient_curl_mismatch", r.gradient_curl_mismatch}}},
      {"duality",
       {{"admissible_correction", r.admissible_correction},
        {"cauchy_converged", r.cauchy_converged},
        {"stages", stages}}},
      {"result",
       {{"beta_mu_norm", r.beta_mu_norm},
        {"beta_norm", r.beta_norm},
        {"u_norm", r.u_norm},
        {"mean_skew", to_json(r.mean_skew)},
        {"estimate_ratio", r.estimate_ratio},
        {"momentum_residual", r.momentum_residual},
        {"momentum_worst", r.momentum_worst},
        {"rigid_translation", r.rigid_translation},
        {"rigid_rotation", r.rigid_rotation}}}};
}

Json to_json(const EffectiveTensor& e) {
  return Json{{"c_hat", to_json(e.c_hat)},
              {"energies", std::vector<double>(e.energies.begin(), e.energies.end())},
              {"asymmetry", e.asymmetry},
              {"ellipticity", to_json(e.ellipticity)},
              {"envelope", {e.envelope_min, e.envelope_max}}};
}

Json to_json(const BoundCertificate& b) {
  auto vec = [](const Vec6& v) { return std::vector<double>(v.data(), v.data() + 6); };
  return Json{{"voigt_gap", b.voigt_gap},
              {"reuss_gap", b.reuss_gap},
              {"voigt_vector", vec(b.voigt_vector)},
              {"reuss_vector", vec(b.reuss_vector)},
              {"reuss_spectrum", vec(b.reuss_spectrum)},
              {"pass", b.pass}};
}

Json to_json(const GStudyReport& g) {
  Json vmo = Json::array();
  for (const auto& v : g.vmo) vmo.push_back(to_json(v));
  Json runs = Json::array();
  for (const auto& r : g.runs) runs.push_back(to_json(r));
  return Json{{"epsilons", g.epsilons},
              {"dictionary", g.dictionary},
              {"d_g", g.d_g},
              {"max_d_g", g.max_d_g},
              {"strong_distance", g.strong_distance},
              {"beta0_norm", g.beta0_norm},
              {"weak_trend", g.weak_trend},
              {"effective_tensor", to_json(g.effective)},
              {"bounds", to_json(g.bounds)},
              {"vmo", vmo},
              {"runs", runs}};
}

VtkWriter::VtkWriter(const HexMesh& mesh, std::string title) : mesh_(mesh), title_(std::move(title)) {}

void VtkWriter::point_vectors(const std::string& name, const VectorField& u) {
  Block b{"VECTORS", name, {}};
  b.data.reserve(3 * u.size());
  for (std::size_t n = 0; n < u.size(); ++n)
    for (int c = 0; c < 3; ++c) b.data.push_back(u[n](c));
  point_.push_back(std::move(b));
}

void VtkWriter::cell_tensors(const std::string& name, const TensorField& f) {
  Block b{"TENSORS", name, {}};
  for (const Mat3& m : f.cell_averages())
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b.data.push_back(m(i, j));
  cell_.push_back(std::move(b));
}

void VtkWriter::cell_scalars(const std::string& name, const std::vector<double>& v) {
  cell_.push_back(Block{"SCALARS", name, v});
}

void VtkWriter::write(const std::filesystem::path& path) const {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write " + path.string());
  const auto& n = mesh_.cells();
  const Vec3& o = mesh_.box().origin;
  const Vec3& h = mesh_.spacing();
  os << "# vtk DataFile Version 3.0\n" << title_ << "\nBINARY\nDATASET STRUCTURED_POINTS\n";
  os << "DIMENSIONS " << n[0] + 1 << " " << n[1] + 1 << " " << n[2] + 1 << "\n";
  os << "ORIGIN " << fmt_double(o(0)) << " " << fmt_double(o(1)) << " " << fmt_double(o(2)) << "\n";
  os << "SPACING " << fmt_double(h(0)) << " " << fmt_double(h(1)) << " " << fmt_double(h(2)) << "\n";
  auto section = [&](const char* head, std::size_t count, const std::vector<Block>& blocks) {
    if (blocks.empty()) return;
    os << head << " " << count << "\n";
    for (const auto& b : blocks) {
      os << b.kind << " " << b.name << " double";
      if (b.kind == "SCALARS") os << " 1\nLOOKUP_TABLE default";
      os << "\n";
      for (double v : b.data) put_be(os, v);
      os << "\n";
    }
  };
  section("POINT_DATA", mesh_.num_nodes(), point_);
  section("CELL_DATA", mesh_.num_cells(), cell_);
}

}  // namespace incompat
