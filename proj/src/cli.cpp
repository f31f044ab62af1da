#include "incompat/cli.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <iostream>
#include <numbers>

#include "CLI11.hpp"
#include "incompat/dictionary.hpp"
#include "incompat/output.hpp"

namespace incompat {

namespace fs = std::filesystem;

namespace {

std::shared_ptr<spdlog::logger> make_logger() {
  auto log = spdlog::get("incompat");
  if (!log) log = spdlog::stderr_color_mt("incompat");
  log->set_pattern("[%H:%M:%S.%e] %^%l%$ %v");
  const char* env = std::getenv("INCOMPAT_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") {
    log->set_level(spdlog::level::off);
  } else if (level == "debug") {
    log->set_level(spdlog::level::debug);
  } else {
    log->set_level(spdlog::level::info);
    if (level != "info") log->warn("INCOMPAT_LOG={} not recognized, using info", level);
  }
  return log;
}

// Invariants checked after a run; exit code 2 if any fails.
class Invariants {
 public:
  void below(const std::string& name, double value, double limit) {
    add(name, value, "<", limit, std::isfinite(value) && value < limit);
  }
  void at_least(const std::string& name, double value, double limit) {
    add(name, value, ">=", limit, std::isfinite(value) && value >= limit);
  }
  void holds(const std::string& name, bool ok) {
    list_.push_back(Json{{"name", name}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
  bool pass() const { return pass_; }
  const Json& json() const { return list_; }
  std::vector<std::string> failed() const {
    std::vector<std::string> out;
    for (const auto& i : list_)
      if (!i["pass"].get<bool>()) out.push_back(i["name"].get<std::string>());
    return out;
  }

 private:
  void add(const std::string& name, double value, const char* op, double limit, bool ok) {
    list_.push_back(Json{{"name", name}, {"value", value}, {"relation", op}, {"limit", limit}, {"pass", ok}});
    pass_ = pass_ && ok;
  }
  Json list_ = Json::array();
  bool pass_ = true;
};

void solve_invariants(Invariants& inv, const SolveReport& r, const std::string& prefix = "") {
  inv.holds(prefix + "cauchy_converged", r.cauchy_converged);
  inv.below(prefix + "measure_divergence", r.measure_divergence, 1e-10);
  inv.below(prefix + "curl_residual", r.curl_residual, 1e-10);
  inv.below(prefix + "momentum_residual", r.momentum_residual, 1e-8);
  inv.below(prefix + "rigid_translation", r.rigid_translation, 1e-10);
  inv.below(prefix + "rigid_rotation", r.rigid_rotation, 1e-10);
}

std::vector<double> phases_of(const ElasticTensorField& c) {
  return std::vector<double>(c.phases().begin(), c.phases().end());
}

struct Context {
  RunConfig cfg;
  fs::path out;
  std::shared_ptr<spdlog::logger> log;
  Json report;
  Invariants inv;
};

void cmd_check(Context& x) {
  const HexMesh mesh = x.cfg.mesh();
  const ElasticTensorField c = x.cfg.build_material(mesh);
  const EllipticityResult e = c.check_ellipticity(0.0, std::numeric_limits<double>::infinity());
  x.report["ellipticity"] = to_json(e);
  x.inv.at_least("ellipticity_min_relative", e.min_relative, 1e-12);

  const LineMeasure m = x.cfg.build_measure();
  validate(m, mesh.box());
  x.report["measure"] = Json{{"loops", m.loops.size()},
                             {"total_variation", total_variation(m)},
                             {"divergence", check_divergence_free(m)}};
  x.inv.below("measure_divergence", check_divergence_free(m), 1e-12);

  const double d = mesh.box().diameter();
  const VmoReport v = vmo_modulus(c, {0.25 * d, 0.125 * d, 0.0625 * d});
  x.report["vmo"] = to_json(v);
  x.log->info("ellipticity [{:.6g}, {:.6g}], |mu| = {:.6g}", e.min_relative, e.max_relative, total_variation(m));

  VtkWriter w(mesh, "incompat material");
  w.cell_scalars("phase", phases_of(c));
  w.write(x.out / "fields.vtk");
}

void cmd_solve(Context& x) {
  const HexMesh mesh = x.cfg.mesh();
  const IncompatibleProblem p = x.cfg.problem(mesh, x.cfg.delta);
  const IncompatibleSolution s = solve_incompatible(p);
  for (const auto& [stage, t] : s.report.timings) x.log->debug("{}: {:.3f} s", stage, t);
  x.log->info("|beta|_3/2 = {:.6g}, estimate ratio {:.6g}, Cauchy stages {}", s.report.beta_norm,
              s.report.estimate_ratio, s.report.stages.size());
  x.report["solve"] = to_json(s.report);
  solve_invariants(x.inv, s.report);

  VtkWriter w(mesh, "incompat solution");
  w.point_vectors("displacement", s.u);
  w.cell_tensors("beta", s.beta);
  w.cell_tensors("beta_mu", s.beta_mu);
  w.cell_scalars("phase", phases_of(p.c));
  w.write(x.out / "fields.vtk");
}

void cmd_homogenize(Context& x) {
  if (x.cfg.cell.is_null()) throw ConfigError("homogenization.cell: missing");
  const UnitCell cell = x.cfg.build_cell();
  const CellCorrectors chi = cell_correctors(cell, x.cfg.solver);
  const EffectiveTensor e = effective_tensor(cell, chi);
  const BoundCertificate b = voigt_reuss_gaps(e.c_hat, cell.c, x.cfg.bound_tol);

  Json stats = Json::array();
  double mean = 0.0;
  for (int a = 0; a < 6; ++a) {
    stats.push_back(to_json(chi.stats[a]));
    mean = std::max(mean, chi.chi[a].integral().norm());
  }
  x.report["correctors"] = Json{{"solver", stats}, {"max_mean", mean}};
  x.report["effective_tensor"] = to_json(e);
  x.report["bounds"] = to_json(b);
  x.inv.below("corrector_mean", mean, 1e-12);
  x.inv.below("asymmetry", e.asymmetry, 1e-8);
  x.inv.at_least("voigt_gap", b.voigt_gap, -x.cfg.bound_tol);
  x.inv.at_least("reuss_gap", b.reuss_gap, -x.cfg.bound_tol);
  x.inv.at_least("ellipticity_above_envelope", e.ellipticity.min_relative - e.envelope_min, -1e-12);
  x.inv.at_least("ellipticity_below_envelope", e.envelope_max - e.ellipticity.max_relative, -1e-12);
  write_json(x.out / "effective_tensor.json", to_json(e.c_hat));
  x.log->info("Voigt gap {:.3e}, Reuss gap {:.3e}", b.voigt_gap, b.reuss_gap);

  VtkWriter w(cell.c.mesh(), "incompat cell correctors");
  for (int a = 0; a < 6; ++a) w.point_vectors("chi_" + std::to_string(a), chi.chi[a]);
  w.cell_scalars("phase", phases_of(cell.c));
  w.write(x.out / "cell.vtk");
}

void cmd_gconv(Context& x) {
  if (x.cfg.cell.is_null()) throw ConfigError("homogenization.cell: missing");
  const HexMesh mesh = x.cfg.mesh();
  const UnitCell cell = x.cfg.build_cell();
  const GStudyReport g = gconv_study(cell, x.cfg.problem(mesh, x.cfg.delta), x.cfg.epsilons, x.cfg.solver);
  for (std::size_t i = 0; i < g.epsilons.size(); ++i)
    x.log->info("eps = {:.6g}: max d_G = {:.6e}, strong distance = {:.6e}", g.epsilons[i], g.max_d_g[i],
                g.strong_distance[i]);
  write_json(x.out / "gconv_report.json", to_json(g));
  x.report["gconv"] = Json{{"epsilons", g.epsilons},
                           {"max_d_g", g.max_d_g},
                           {"strong_distance", g.strong_distance},
                           {"weak_trend", g.weak_trend},
                           {"effective_tensor", to_json(g.effective.c_hat)}};
  x.inv.at_least("voigt_gap", g.bounds.voigt_gap, -x.cfg.bound_tol);
  x.inv.at_least("reuss_gap", g.bounds.reuss_gap, -x.cfg.bound_tol);
  for (std::size_t i = 0; i < g.runs.size(); ++i) {
    const std::string tag = i < g.epsilons.size() ? "eps[" + std::to_string(i) + "]." : "homogenized.";
    solve_invariants(x.inv, g.runs[i], tag);
  }

  VtkWriter w(mesh, "incompat oscillating material");
  w.cell_scalars("phase", phases_of(ElasticTensorField::periodic_sampled(mesh, cell.c, x.cfg.epsilons.back())));
  w.write(x.out / "fields.vtk");
}

void cmd_study(Context& x) {
  const Box& box = x.cfg.domain;
  const Vec3 size = box.size;
  auto gauge = [box](const Vec3& p) {
    const Vec3 t = (p - box.origin).cwiseQuotient(box.size);
    const double pi = std::numbers::pi;
    return Vec3(0.05 * std::sin(2 * pi * t(1)), 0.05 * t(0) * std::cos(2 * pi * t(2)), 0.05 * t(0) * t(1) * t(2));
  };
  Json runs = Json::array();
  std::vector<std::vector<double>> weak;
  IncompatibleSolution finest;
  for (int n : x.cfg.study_resolutions) {
    std::array<int, 3> cells;
    for (int d = 0; d < 3; ++d) cells[d] = std::max(2, int(std::lround(n * size(d) / size.maxCoeff())));
    const HexMesh mesh(box, cells);
    IncompatibleProblem p = x.cfg.problem(mesh, x.cfg.study_delta);
    const IncompatibleSolution s = solve_incompatible(p);
    p.gauge = gauge;
    const IncompatibleSolution g = solve_incompatible(p);
    const SkewQuotient q = skew_quotient_distance(s.beta - g.beta);
    const double rel = s.report.beta_norm > 0.0 ? q.distance / s.report.beta_norm : q.distance;

    std::vector<double> f;
    const TensorField b = remove_mean_skew(s.beta);
    for (const auto& t : test_dictionary(box)) f.push_back(sample_gradient(mesh, t).inner(b));
    weak.push_back(f);

    runs.push_back(Json{{"cells", cells},
                        {"report", to_json(s.report)},
                        {"gauge_quotient_distance", rel},
                        {"weak_functionals", f}});
    x.log->info("n = {}: |beta| = {:.6g}, estimate ratio {:.6g}, gauge quotient {:.3e}", n, s.report.beta_norm,
                s.report.estimate_ratio, rel);
    const std::string tag = "n" + std::to_string(n) + ".";
    solve_invariants(x.inv, s.report, tag);
    solve_invariants(x.inv, g.report, tag + "gauged.");
    x.inv.below(tag + "gauge_quotient_distance", rel, 10.0 * x.cfg.solver.rtol + 1e-9);
    finest = s;
  }
  Json changes = Json::array();
  for (std::size_t i = 1; i < weak.size(); ++i) {
    double m = 0.0;
    for (std::size_t k = 0; k < weak[i].size(); ++k) m = std::max(m, std::abs(weak[i][k] - weak[i - 1][k]));
    changes.push_back(m);
  }
  Json dict = Json::array();
  for (const auto& t : test_dictionary(box)) dict.push_back(t.name);
  x.report["study"] = Json{{"delta", x.cfg.study_delta}, {"dictionary", dict}, {"runs", runs}, {"weak_changes", changes}};

  VtkWriter w(finest.u.mesh(), "incompat finest solution");
  w.point_vectors("displacement", finest.u);
  w.cell_tensors("beta", finest.beta);
  w.cell_tensors("beta_mu", finest.beta_mu);
  w.write(x.out / "fields.vtk");
}

Json error_json(const std::string& kind, int code, const std::string& message) {
  static const char* names[] = {"", "config", "invariant", "solver"};
  return Json{{"error", {{"kind", kind}, {"class", names[code]}, {"exit_code", code}, {"message", message}}}};
}

int report_error(const fs::path& out, const Json& e) {
  std::cerr << dump_json(e);
  std::error_code ec;
  if (!out.empty() && fs::is_directory(out, ec)) {
    try {
      write_json(out / "error.json", e);
    } catch (...) {
    }
  }
  return e["error"]["exit_code"].get<int>();
}

}  // namespace

int run_command(int argc, char** argv) {
  auto log = make_logger();
  CLI::App app{"Incompatible linear elasticity toolkit"};
  app.require_subcommand(1);
  std::string config, out;
  int threads = 0;
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"check", "validate the configuration, material and dislocation loops"},
      {"solve", "solve the incompatible traction-free problem"},
      {"homogenize", "cell problems, effective tensor and Voigt-Reuss certificate"},
      {"gconv", "G-convergence study for the oscillating material"},
      {"study", "refinement and gauge-uniqueness series"}};
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "run configuration (JSON)")->required();
    sub->add_option("--out", out, "output directory (overrides the config)");
    sub->add_option("--threads", threads, "worker threads (overrides the config)")->check(CLI::Range(1, 1024));
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    return report_error({}, error_json("UsageError", 1, e.what()));
  }
  const std::string command = app.get_subcommands().front()->get_name();

  fs::path outdir;
  try {
    Context x{load_config(config), {}, log, Json::object(), {}};
    if (threads > 0) {
      x.cfg.solver.threads = threads;
      x.cfg.resolved["threads"] = threads;
    }
    if (!out.empty()) {
      x.cfg.output = out;
      x.cfg.resolved["output"] = out;
    }
    outdir = x.out = x.cfg.output;
    fs::create_directories(x.out);
    fs::remove(x.out / "error.json");
    write_json(x.out / "resolved_config.json", x.cfg.resolved);
    log->info("{}: config {}, output {}", command, config, x.out.string());

    const auto t0 = std::chrono::steady_clock::now();
    if (command == "check") cmd_check(x);
    if (command == "solve") cmd_solve(x);
    if (command == "homogenize") cmd_homogenize(x);
    if (command == "gconv") cmd_gconv(x);
    if (command == "study") cmd_study(x);
    log->info("{} finished in {:.2f} s", command,
              std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count());

    Json report;
    report["command"] = command;
    report["pass"] = x.inv.pass();
    report["invariants"] = x.inv.json();
    for (const auto& [k, v] : x.report.items()) report[k] = v;
    write_json(x.out / "report.json", report);
    if (!x.inv.pass()) {
      std::string names;
      for (const auto& n : x.inv.failed()) names += (names.empty() ? "" : ", ") + n;
      return report_error(x.out, error_json("InvariantViolation", 2, "failed invariants: " + names));
    }
    return 0;
  } catch (const Error& e) {
    return report_error(outdir, error_json(e.kind(), int(e.error_class()), e.what()));
  } catch (const std::exception& e) {
    return report_error(outdir, error_json("InternalError", 3, e.what()));
  }
}

}  // namespace incompat
