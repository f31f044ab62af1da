#include "incompat/config.hpp"

#include <cmath>
#include <fstream>
#include <random>
#include <set>
#include <sstream>

namespace incompat {

namespace {

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
  throw ConfigError(path + ": " + msg);
}

// Reads one JSON object, copies accepted keys (with defaults filled in) to
// `out`, and rejects keys it was not asked about.
class Reader {
 public:
  Reader(const Json& in, std::string path) : in_(in), path_(std::move(path)) {
    if (!in_.is_object()) fail(path_, "expected an object");
  }

  std::string at(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return in_.contains(key) && !in_[key].is_null(); }
  const Json& raw(const std::string& key) {
    seen_.insert(key);
    if (!in_.contains(key)) fail(at(key), "missing");
    return in_[key];
  }

  double number(const std::string& key, std::optional<double> def = std::nullopt) {
    seen_.insert(key);
    double v;
    if (!has(key)) {
      if (!def) fail(at(key), "missing");
      v = *def;
    } else {
      if (!in_[key].is_number()) fail(at(key), "expected a number");
      v = in_[key].get<double>();
    }
    if (!std::isfinite(v)) fail(at(key), "must be finite");
    out[key] = v;
    return v;
  }

  double positive(const std::string& key, std::optional<double> def = std::nullopt) {
    const double v = number(key, def);
    if (!(v > 0.0)) fail(at(key), "must be positive");
    return v;
  }

  long integer(const std::string& key, std::optional<long> def, long lo, long hi) {
    seen_.insert(key);
    long v;
    if (!has(key)) {
      if (!def) fail(at(key), "missing");
      v = *def;
    } else {
      if (!in_[key].is_number_integer()) fail(at(key), "expected an integer");
      v = in_[key].get<long>();
    }
    if (v < lo || v > hi) fail(at(key), "must lie in [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
    out[key] = v;
    return v;
  }

  std::string string(const std::string& key, std::optional<std::string> def = std::nullopt) {
    seen_.insert(key);
    std::string v;
    if (!has(key)) {
      if (!def) fail(at(key), "missing");
      v = *def;
    } else {
      if (!in_[key].is_string()) fail(at(key), "expected a string");
      v = in_[key].get<std::string>();
    }
    out[key] = v;
    return v;
  }

  std::vector<double> numbers(const std::string& key, std::optional<std::vector<double>> def, std::size_t n = 0) {
    seen_.insert(key);
    std::vector<double> v;
    if (!has(key)) {
      if (!def) fail(at(key), "missing");
      v = *def;
    } else {
      const Json& a = in_[key];
      if (!a.is_array()) fail(at(key), "expected an array of numbers");
      for (std::size_t i = 0; i < a.size(); ++i) {
        if (!a[i].is_number()) fail(at(key) + "[" + std::to_string(i) + "]", "expected a number");
        v.push_back(a[i].get<double>());
        if (!std::isfinite(v.back())) fail(at(key) + "[" + std::to_string(i) + "]", "must be finite");
      }
    }
    if (n && v.size() != n) fail(at(key), "expected " + std::to_string(n) + " entries");
    out[key] = v;
    return v;
  }

  Vec3 vec3(const std::string& key, std::optional<Vec3> def = std::nullopt) {
    std::optional<std::vector<double>> d;
    if (def) d = std::vector<double>{(*def)(0), (*def)(1), (*def)(2)};
    const auto v = numbers(key, d, 3);
    return Vec3(v[0], v[1], v[2]);
  }

  std::array<int, 3> cells(const std::string& key, std::array<int, 3> def) {
    seen_.insert(key);
    std::array<int, 3> v = def;
    if (has(key)) {
      const Json& a = in_[key];
      if (!a.is_array() || a.size() != 3) fail(at(key), "expected three integers");
      for (int i = 0; i < 3; ++i) {
        if (!a[i].is_number_integer()) fail(at(key), "expected three integers");
        v[i] = a[i].get<int>();
        if (v[i] < 2 || v[i] > 1024) fail(at(key), "cell counts must lie in [2, 1024]");
      }
    }
    out[key] = v;
    return v;
  }

  void mark(const std::string& key) { seen_.insert(key); }

  void finish() const {
    for (const auto& [k, v] : in_.items())
      if (!seen_.count(k)) fail(at(k), "unknown key");
  }

  Json out = Json::object();

 private:
  const Json& in_;
  std::string path_;
  std::set<std::string> seen_;
};

Tensor4 parse_phase(const Json& j, const std::string& path, Json& out) {
  Reader r(j, path);
  Tensor4 c;
  if (r.has("mandel_upper")) {
    const auto v = r.numbers("mandel_upper", std::nullopt, 21);
    std::array<double, 21> a;
    std::copy(v.begin(), v.end(), a.begin());
    c = Tensor4::from_upper_triangle(a);
  } else {
    const double lambda = r.number("lambda");
    const double mu = r.number("mu");
    c = Tensor4::isotropic(lambda, mu);
  }
  r.finish();
  out = r.out;
  return c;
}

std::array<Tensor4, 2> parse_phases(Reader& r, Json& out) {
  const Json& a = r.raw("phases");
  if (!a.is_array() || a.size() != 2) fail(r.at("phases"), "expected two phases");
  std::array<Tensor4, 2> c;
  Json list = Json::array();
  for (int i = 0; i < 2; ++i) {
    Json o;
    c[i] = parse_phase(a[i], r.at("phases") + "[" + std::to_string(i) + "]", o);
    list.push_back(o);
  }
  out["phases"] = list;
  return c;
}

// Validates a material description and returns its resolved form. Geometry-dependent
// checks happen when the material is built on a mesh.
Json resolve_material(const Json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.string("type");
  Json phases;
  if (type == "isotropic") {
    r.number("lambda");
    r.number("mu");
  } else if (type == "anisotropic") {
    r.numbers("mandel_upper", std::nullopt, 21);
  } else if (type == "laminate") {
    r.integer("axis", 0, 0, 2);
    const double f = r.number("fraction", 0.5);
    if (!(f > 0.0 && f < 1.0)) fail(r.at("fraction"), "must lie in (0, 1)");
    r.positive("period", 1.0);
    parse_phases(r, phases);
  } else if (type == "checkerboard") {
    r.integer("blocks", 2, 1, 1024);
    parse_phases(r, phases);
  } else if (type == "random") {
    const double f = r.number("fraction", 0.5);
    if (!(f >= 0.0 && f <= 1.0)) fail(r.at("fraction"), "must lie in [0, 1]");
    parse_phases(r, phases);
  } else if (type == "periodic") {
    r.positive("epsilon");
  } else {
    fail(r.at("type"), "unknown material type '" + type + "'");
  }
  r.finish();
  Json out = r.out;
  if (!phases.is_null()) out["phases"] = phases["phases"];
  return out;
}

Json resolve_loop(const Json& j, const std::string& path) {
  Reader r(j, path);
  const std::string type = r.string("type");
  if (type == "square") {
    r.vec3("center");
    r.positive("side");
    r.integer("normal_axis", 2, 0, 2);
  } else if (type == "polygon") {
    r.vec3("center");
    r.positive("radius");
    r.integer("sides", std::nullopt, 3, 100000);
    r.integer("normal_axis", 2, 0, 2);
  } else if (type == "vertices") {
    const Json& v = r.raw("vertices");
    if (!v.is_array()) fail(r.at("vertices"), "expected an array of points");
    Json list = Json::array();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const std::string p = r.at("vertices") + "[" + std::to_string(i) + "]";
      if (!v[i].is_array() || v[i].size() != 3) fail(p, "expected three numbers");
      for (const auto& x : v[i])
        if (!x.is_number() || !std::isfinite(x.get<double>())) fail(p, "expected three numbers");
      list.push_back(v[i]);
    }
    r.out["vertices"] = list;
  } else {
    fail(r.at("type"), "unknown loop type '" + type + "'");
  }
  r.vec3("burgers");
  r.finish();
  return r.out;
}

Vec3 as_vec3(const Json& j) { return Vec3(j[0].get<double>(), j[1].get<double>(), j[2].get<double>()); }

Tensor4 phase_tensor(const Json& j) {
  if (j.contains("mandel_upper")) {
    std::array<double, 21> a;
    for (int i = 0; i < 21; ++i) a[i] = j["mandel_upper"][i].get<double>();
    return Tensor4::from_upper_triangle(a);
  }
  return Tensor4::isotropic(j["lambda"].get<double>(), j["mu"].get<double>());
}

}  // namespace

ElasticTensorField build_material(const Json& spec, const HexMesh& mesh, std::uint64_t seed, const Json& cell,
                                  const std::array<int, 3>& cell_resolution) {
  const std::string type = spec["type"].get<std::string>();
  try {
    if (type == "isotropic") return ElasticTensorField::isotropic(mesh, spec["lambda"].get<double>(), spec["mu"].get<double>());
    if (type == "anisotropic") return ElasticTensorField::constant(mesh, phase_tensor(spec));
    const auto& ph = spec.contains("phases") ? spec["phases"] : Json();
    if (type == "laminate")
      return ElasticTensorField::laminate(mesh, spec["axis"].get<int>(), spec["fraction"].get<double>(),
                                          phase_tensor(ph[0]), phase_tensor(ph[1]), spec["period"].get<double>());
    if (type == "checkerboard") {
      const int blocks = spec["blocks"].get<int>();
      const auto& n = mesh.cells();
      for (int d = 0; d < 3; ++d)
        if (n[d] % blocks != 0) fail("material.blocks", "must divide the cell count on every axis");
      std::vector<std::uint16_t> phase(mesh.num_cells());
      for (int k = 0; k < n[2]; ++k)
        for (int j = 0; j < n[1]; ++j)
          for (int i = 0; i < n[0]; ++i)
            phase[mesh.cell_index(i, j, k)] =
                std::uint16_t((i * blocks / n[0] + j * blocks / n[1] + k * blocks / n[2]) % 2);
      return ElasticTensorField(mesh, {phase_tensor(ph[0]), phase_tensor(ph[1])}, phase);
    }
    if (type == "random") {
      std::mt19937_64 rng(seed);
      const double f = spec["fraction"].get<double>();
      std::vector<std::uint16_t> phase(mesh.num_cells());
      for (auto& p : phase) p = double(rng() >> 11) * 0x1.0p-53 < f ? 1 : 0;
      return ElasticTensorField(mesh, {phase_tensor(ph[0]), phase_tensor(ph[1])}, phase);
    }
    if (type == "periodic") {
      if (cell.is_null()) fail("material", "periodic material needs homogenization.cell");
      if (cell["type"] == "periodic") fail("homogenization.cell.type", "a cell cannot itself be periodic");
      const HexMesh cm(Box{}, cell_resolution);
      return ElasticTensorField::periodic_sampled(mesh, build_material(cell, cm, seed, Json(), cell_resolution),
                                                  spec["epsilon"].get<double>());
    }
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("material: ") + e.what());
  }
  fail("material.type", "unknown material type '" + type + "'");
}

ElasticTensorField RunConfig::build_material(const HexMesh& m) const {
  return incompat::build_material(material, m, seed, cell, cell_resolution);
}

UnitCell RunConfig::build_cell() const {
  return UnitCell{incompat::build_material(cell, cell_mesh(), seed, Json(), cell_resolution)};
}

LineMeasure RunConfig::build_measure() const {
  LineMeasure m;
  for (const auto& l : loops) {
    const std::string type = l["type"].get<std::string>();
    const Vec3 b = as_vec3(l["burgers"]);
    if (type == "square") {
      m.loops.push_back(square_loop(as_vec3(l["center"]), l["side"].get<double>(), l["normal_axis"].get<int>(), b));
    } else if (type == "polygon") {
      m.loops.push_back(polygon_loop(as_vec3(l["center"]), l["radius"].get<double>(), l["sides"].get<int>(),
                                     l["normal_axis"].get<int>(), b));
    } else {
      DislocationLoop d;
      for (const auto& v : l["vertices"]) d.vertices.push_back(as_vec3(v));
      d.burgers = b;
      m.loops.push_back(d);
    }
  }
  return m;
}

IncompatibleProblem RunConfig::problem(const HexMesh& m, double d) const {
  IncompatibleProblem p;
  p.c = build_material(m);
  p.measure = build_measure();
  p.delta = d;
  p.pad = pad;
  p.schedule = schedule.widths.empty() ? MollificationSchedule::standard(m, stages, schedule.tol) : schedule;
  p.solver = solver;
  return p;
}

RunConfig parse_config(const Json& j) {
  RunConfig c;
  Reader top(j, "");
  Json& out = top.out;

  {
    const Json in = top.has("domain") ? j["domain"] : Json::object();
    top.mark("domain");
    Reader r(in, "domain");
    c.domain.origin = r.vec3("origin", Vec3::Zero());
    c.domain.size = r.vec3("size", Vec3::Ones());
    if ((c.domain.size.array() <= 0.0).any()) fail("domain.size", "must be positive");
    r.finish();
    out["domain"] = r.out;
  }
  c.resolution = top.cells("resolution", c.resolution);

  c.material = resolve_material(top.has("material") ? j["material"] : Json{{"type", "isotropic"}, {"lambda", 1.0}, {"mu", 1.0}},
                                "material");
  top.mark("material");
  out["material"] = c.material;

  c.loops = Json::array();
  if (top.has("loops")) {
    const Json& l = top.raw("loops");
    if (!l.is_array()) fail("loops", "expected an array");
    for (std::size_t i = 0; i < l.size(); ++i) c.loops.push_back(resolve_loop(l[i], "loops[" + std::to_string(i) + "]"));
  }
  top.mark("loops");
  out["loops"] = c.loops;

  const HexMesh mesh = c.mesh();
  {
    const Json in = top.has("mollification") ? j["mollification"] : Json::object();
    top.mark("mollification");
    Reader r(in, "mollification");
    c.delta = r.number("delta", 3.0 * mesh.spacing().maxCoeff());
    if (!(c.delta > 0.0)) fail("mollification.delta", "must be positive");
    r.mark("pad");
    if (r.has("pad")) {
      const Json& p = in["pad"];
      if (!p.is_array() || p.size() != 3) fail("mollification.pad", "expected three integers or null");
      std::array<int, 3> pad;
      for (int i = 0; i < 3; ++i) {
        if (!p[i].is_number_integer() || p[i].get<int>() < 0) fail("mollification.pad", "expected three non-negative integers");
        pad[i] = p[i].get<int>();
      }
      c.pad = pad;
      r.out["pad"] = pad;
    } else {
      r.out["pad"] = nullptr;
    }
    c.stages = int(r.integer("stages", 6, 1, 64));
    c.schedule.tol = r.positive("tol", 1e-6);
    r.mark("widths");
    if (r.has("widths") && !(in["widths"].is_string() && in["widths"] == "standard")) {
      c.schedule.widths = r.numbers("widths", std::nullopt);
      c.schedule.validate();
    } else {
      r.out["widths"] = "standard";
    }
    r.finish();
    out["mollification"] = r.out;
  }
  {
    const Json in = top.has("solver") ? j["solver"] : Json::object();
    top.mark("solver");
    Reader r(in, "solver");
    c.solver.rtol = r.positive("rtol", 1e-10);
    c.solver.max_iterations = int(r.integer("max_iterations", 20000, 1, 100000000));
    r.finish();
    out["solver"] = r.out;
  }
  c.solver.threads = int(top.integer("threads", 1, 1, 1024));
  c.seed = std::uint64_t(top.integer("seed", 0, 0, std::numeric_limits<long>::max()));
  c.output = top.string("output", c.output);

  {
    const Json in = top.has("homogenization") ? j["homogenization"] : Json::object();
    top.mark("homogenization");
    Reader r(in, "homogenization");
    c.cell_resolution = r.cells("cell_resolution", c.cell_resolution);
    if (r.has("cell")) {
      c.cell = resolve_material(r.raw("cell"), "homogenization.cell");
      if (c.cell["type"] == "periodic") fail("homogenization.cell.type", "a cell cannot itself be periodic");
    } else {
      r.mark("cell");
      c.cell = nullptr;
    }
    r.out["cell"] = c.cell;
    c.epsilons = r.numbers("epsilons", c.epsilons);
    for (double e : c.epsilons)
      if (!(e > 0.0)) fail("homogenization.epsilons", "must be positive");
    c.bound_tol = r.positive("bound_tol", c.bound_tol);
    r.finish();
    out["homogenization"] = r.out;
  }
  {
    const Json in = top.has("study") ? j["study"] : Json::object();
    top.mark("study");
    Reader r(in, "study");
    const auto res = r.numbers("resolutions", std::vector<double>{8, 16, 24});
    c.study_resolutions.clear();
    for (double v : res) {
      if (v != std::floor(v) || v < 2 || v > 1024) fail("study.resolutions", "expected integers in [2, 1024]");
      c.study_resolutions.push_back(int(v));
    }
    if (c.study_resolutions.empty()) fail("study.resolutions", "must not be empty");
    r.out["resolutions"] = c.study_resolutions;
    int coarsest = c.study_resolutions[0];
    for (int n : c.study_resolutions) coarsest = std::min(coarsest, n);
    c.study_delta = r.number("delta", 3.0 * c.domain.size.maxCoeff() / coarsest);
    if (!(c.study_delta > 0.0)) fail("study.delta", "must be positive");
    r.finish();
    out["study"] = r.out;
  }
  top.finish();

  // order the resolved copy like the schema
  Json ordered;
  for (const char* k : {"domain", "resolution", "material", "loops", "mollification", "solver", "threads", "seed",
                        "output", "homogenization", "study"})
    ordered[k] = out[k];
  c.resolved = ordered;
  return c;
}

RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path.string());
  Json j;
  try {
    j = Json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return parse_config(j);
}

}  // namespace incompat
