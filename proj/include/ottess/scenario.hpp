#pragma once

// Scenario files and the run pipeline behind the CLI. A scenario is a JSON
// document selecting a mode (tessellate, solve, analyze, levelcurve,
// witness-convex, witness-bumps) plus the domain, sites and parameters the
// mode needs. A run writes report.json and figure.svg (plus curve.csv for
// level curves) into an output directory and yields a process exit code:
//   0 all requested checks pass, 2 input error, 3 solver failure,
//   4 check failure.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "ottess/bisector.hpp"
#include "ottess/geometry.hpp"
#include "ottess/grid.hpp"
#include "ottess/potential.hpp"
#include "ottess/solver.hpp"
#include "ottess/svg.hpp"
#include "ottess/topology.hpp"

namespace ottess {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitSolverFailure = 3;
inline constexpr int kExitCheckFailure = 4;

inline constexpr int kReportSchemaVersion = 1;

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class RunMode { Tessellate, Solve, Analyze, LevelCurve, WitnessConvex, WitnessBumps };

inline std::string mode_name(RunMode mode) {
  switch (mode) {
    case RunMode::Tessellate: return "tessellate";
    case RunMode::Solve: return "solve";
    case RunMode::Analyze: return "analyze";
    case RunMode::LevelCurve: return "levelcurve";
    case RunMode::WitnessConvex: return "witness-convex";
    case RunMode::WitnessBumps: return "witness-bumps";
  }
  return "?";
}

struct DomainSpec {
  bool is_sphere = false;
  std::vector<Vec2> polygon_vertices;
  int resolution = 0;  // polygon lattice resolution
  int n_lat = 0;
  int n_lon = 0;
};

struct SiteSpec {
  std::vector<double> position;
  std::optional<double> target_mass;
  std::optional<double> weight;
};

struct Scenario {
  RunMode mode = RunMode::Tessellate;
  double p = 2.0;
  std::uint64_t seed = 0;
  std::optional<DomainSpec> domain;
  std::vector<SiteSpec> sites;

  double solver_tol = 1e-3;
  int solver_max_iter = 500;

  // levelcurve parameters
  double alpha = 0.0;
  double y_max = 6.0;
  int steps = 256;

  // witness parameters
  double witness_alpha = 0.0;
  int n_bumps = 0;
  double kappa = 0.0;
  int witness_resolution = 256;

  nlohmann::json raw;  // original document, echoed into the report
};

namespace detail {

inline RunMode parse_mode(const std::string& s) {
  if (s == "tessellate") return RunMode::Tessellate;
  if (s == "solve") return RunMode::Solve;
  if (s == "analyze") return RunMode::Analyze;
  if (s == "levelcurve") return RunMode::LevelCurve;
  if (s == "witness-convex") return RunMode::WitnessConvex;
  if (s == "witness-bumps") return RunMode::WitnessBumps;
  throw ScenarioError("unknown mode \"" + s + "\"");
}

inline bool mode_needs_sites(RunMode mode) {
  return mode == RunMode::Tessellate || mode == RunMode::Solve || mode == RunMode::Analyze;
}

}  // namespace detail

inline Scenario parse_scenario(const nlohmann::json& doc) {
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario sc;
  sc.raw = doc;

  if (!doc.contains("mode") || !doc["mode"].is_string())
    throw ScenarioError("scenario requires a string field \"mode\"");
  sc.mode = detail::parse_mode(doc["mode"].get<std::string>());

  if (doc.contains("seed")) sc.seed = doc["seed"].get<std::uint64_t>();
  if (sc.mode == RunMode::Analyze && !doc.contains("seed"))
    throw ScenarioError("analyze mode samples randomly and requires a \"seed\" field");

  if (doc.contains("p")) {
    sc.p = doc["p"].get<double>();
    if (!(sc.p >= 1.0)) throw ScenarioError("p must satisfy p >= 1");
  } else if (sc.mode != RunMode::WitnessBumps) {
    throw ScenarioError("scenario requires the cost exponent field \"p\"");
  }
  if (sc.mode == RunMode::WitnessBumps) {
    if (doc.contains("p") && doc["p"].get<double>() != 2.0)
      throw ScenarioError("witness-bumps is a p = 2 construction");
    sc.p = 2.0;
  }

  if (doc.contains("domain")) {
    const nlohmann::json& d = doc["domain"];
    DomainSpec spec;
    const std::string type = d.value("type", "");
    if (type == "polygon") {
      if (!d.contains("vertices") || !d["vertices"].is_array() || d["vertices"].size() < 3)
        throw ScenarioError("polygon domain requires an array \"vertices\" of >= 3 points");
      for (const auto& v : d["vertices"]) {
        if (!v.is_array() || v.size() != 2)
          throw ScenarioError("polygon vertex must be a [x, y] pair");
        spec.polygon_vertices.push_back({v[0].get<double>(), v[1].get<double>()});
      }
      spec.resolution = d.value("resolution", 0);
      if (spec.resolution < 8)
        throw ScenarioError("polygon domain requires \"resolution\" >= 8");
    } else if (type == "sphere") {
      spec.is_sphere = true;
      spec.n_lat = d.value("n_lat", 0);
      spec.n_lon = d.value("n_lon", 0);
      if (spec.n_lat < 8 || spec.n_lon < 16)
        throw ScenarioError("sphere domain requires n_lat >= 8 and n_lon >= 16");
    } else {
      throw ScenarioError("domain type must be \"polygon\" or \"sphere\"");
    }
    sc.domain = std::move(spec);
  }

  if (doc.contains("sites")) {
    if (!doc["sites"].is_array() || doc["sites"].empty())
      throw ScenarioError("\"sites\" must be a nonempty array");
    for (const auto& s : doc["sites"]) {
      SiteSpec spec;
      if (!s.contains("position") || !s["position"].is_array())
        throw ScenarioError("every site requires a \"position\" array");
      for (const auto& c : s["position"]) spec.position.push_back(c.get<double>());
      if (s.contains("target_mass")) spec.target_mass = s["target_mass"].get<double>();
      if (s.contains("weight")) spec.weight = s["weight"].get<double>();
      sc.sites.push_back(std::move(spec));
    }
  }

  if (doc.contains("solver")) {
    sc.solver_tol = doc["solver"].value("tol", sc.solver_tol);
    sc.solver_max_iter = doc["solver"].value("max_iter", sc.solver_max_iter);
    if (!(sc.solver_tol > 0.0)) throw ScenarioError("solver tol must be > 0");
    if (sc.solver_max_iter < 0) throw ScenarioError("solver max_iter must be >= 0");
  }

  if (doc.contains("level_curve")) {
    const nlohmann::json& lc = doc["level_curve"];
    sc.alpha = lc.value("alpha", 0.0);
    sc.y_max = lc.value("y_max", 6.0);
    sc.steps = lc.value("steps", 256);
  }
  if (doc.contains("witness")) {
    const nlohmann::json& w = doc["witness"];
    sc.witness_alpha = w.value("alpha", 0.0);
    sc.n_bumps = w.value("n_bumps", 0);
    sc.kappa = w.value("kappa", 0.0);
    sc.witness_resolution = w.value("resolution", 256);
  }

  // mode-specific requirements
  switch (sc.mode) {
    case RunMode::Tessellate:
    case RunMode::Solve:
    case RunMode::Analyze: {
      if (!sc.domain) throw ScenarioError(mode_name(sc.mode) + " mode requires \"domain\"");
      if (sc.sites.empty()) throw ScenarioError(mode_name(sc.mode) + " mode requires \"sites\"");
      const std::size_t dim = sc.domain->is_sphere ? 3 : 2;
      for (const SiteSpec& s : sc.sites)
        if (s.position.size() != dim)
          throw ScenarioError("site position must have " + std::to_string(dim) +
                              " coordinates for this domain");
      bool all_masses = true, all_weights = true;
      for (const SiteSpec& s : sc.sites) {
        all_masses = all_masses && s.target_mass.has_value();
        all_weights = all_weights && s.weight.has_value();
      }
      const bool masses_mode = all_masses && !all_weights;
      const bool weights_mode = all_weights && !all_masses;
      if (!masses_mode && !weights_mode)
        throw ScenarioError(
            "sites must carry either target_mass on every site or weight on every site");
      if (sc.mode == RunMode::Solve && !masses_mode)
        throw ScenarioError("solve mode requires target_mass on every site");
      if (sc.mode == RunMode::Tessellate && !weights_mode)
        throw ScenarioError("tessellate mode requires weight on every site");
      if (masses_mode) {
        double sum = 0.0;
        for (const SiteSpec& s : sc.sites) {
          if (!(*s.target_mass > 0.0))
            throw ScenarioError("every target_mass must be > 0");
          sum += *s.target_mass;
        }
        if (std::abs(sum - 1.0) > 1e-9)
          throw ScenarioError("target masses must sum to 1 (got " + std::to_string(sum) + ")");
      }
      break;
    }
    case RunMode::LevelCurve:
      if (!(sc.alpha != 0.0))
        throw ScenarioError("levelcurve mode requires level_curve.alpha != 0");
      if (!(sc.y_max > 0.0)) throw ScenarioError("level_curve.y_max must be > 0");
      if (sc.steps < 32) throw ScenarioError("level_curve.steps must be >= 32");
      break;
    case RunMode::WitnessConvex:
      if (!(sc.witness_alpha > 0.0))
        throw ScenarioError("witness-convex mode requires witness.alpha > 0");
      if (sc.witness_resolution < 8)
        throw ScenarioError("witness.resolution must be >= 8");
      break;
    case RunMode::WitnessBumps:
      if (sc.n_bumps < 1) throw ScenarioError("witness-bumps mode requires witness.n_bumps >= 1");
      if (!(sc.kappa > 0.0 && sc.kappa < 1.0))
        throw ScenarioError("witness.kappa must lie in (0,1)");
      if (sc.witness_resolution < 8)
        throw ScenarioError("witness.resolution must be >= 8");
      break;
  }
  return sc;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioError("cannot open scenario file: " + path);
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw ScenarioError("scenario parse error in " + path + ": " + e.what());
  }
  try {
    return parse_scenario(doc);
  } catch (const nlohmann::json::exception& e) {
    throw ScenarioError("scenario field error in " + path + ": " + e.what());
  }
}

struct RunOptions {
  std::optional<int> resolution_override;
  std::optional<std::uint64_t> seed_override;
  bool dump_grid = false;
};

struct RunResult {
  int exit_code = kExitOk;
  nlohmann::json report;
};

namespace detail {

inline Domain domain_from_spec(const DomainSpec& spec) {
  if (spec.is_sphere) return Domain::unit_sphere();
  return Domain::polygon(spec.polygon_vertices);
}

inline std::vector<Site> sites_from_spec(const Scenario& sc, const Domain& domain) {
  std::vector<Site> sites;
  for (const SiteSpec& s : sc.sites) {
    const Point pos = domain.kind() == DomainKind::UnitSphere
                          ? Point::sphere(s.position[0], s.position[1], s.position[2])
                          : Point::planar(s.position[0], s.position[1]);
    if (!contains(domain, pos))
      throw ScenarioError("site position lies outside the domain");
    sites.push_back(Site{pos, s.target_mass.value_or(0.0), s.weight.value_or(0.0)});
  }
  return sites;
}

inline nlohmann::json vec2_json(Vec2 v) { return nlohmann::json::array({v.x, v.y}); }

inline nlohmann::json site_position_json(const Point& q) {
  if (q.kind() == DomainKind::EuclideanPolygon)
    return nlohmann::json::array({q.x(), q.y()});
  return nlohmann::json::array({q.x(), q.y(), q.z()});
}

inline void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << text;
}

}  // namespace detail

/// Execute a scenario and write report.json / figure.svg (and curve.csv for
/// level curves, grid.csv on request) into out_dir.
inline RunResult run(const Scenario& sc, const std::string& out_dir,
                     const RunOptions& options = {}) {
  namespace fs = std::filesystem;
  const auto t_start = std::chrono::steady_clock::now();
  fs::create_directories(out_dir);

  const std::uint64_t seed = options.seed_override.value_or(sc.seed);
  const CostExponent p(sc.p);

  RunResult result;
  nlohmann::json& report = result.report;
  report["schema_version"] = kReportSchemaVersion;
  report["mode"] = mode_name(sc.mode);
  report["p"] = sc.p;
  report["seed"] = seed;
  report["scenario"] = sc.raw;
  nlohmann::json checks = nlohmann::json::object();

  std::string svg;
  bool solver_failed = false;

  if (sc.mode == RunMode::LevelCurve) {
    const LevelCurve curve = trace_level_curve(p, sc.alpha, sc.y_max, sc.steps);
    std::ostringstream csv;
    csv << "y,x\n";
    for (const Vec2& s : curve.samples) csv << s.y << ',' << s.x << '\n';
    detail::write_text_file(fs::path(out_dir) / "curve.csv", csv.str());

    double max_x = 1.0;
    for (const Vec2& s : curve.samples) max_x = std::max(max_x, s.x);
    report["level_curve"] = {{"alpha", curve.alpha},
                             {"y_max", curve.y_max_requested},
                             {"samples", curve.samples.size()},
                             {"terminated_early", curve.terminated_early},
                             {"max_x", max_x}};

    // draw the two-site split on a canvas around the curve
    const double cx = max_x + 1.0;
    const double cy = std::max(1.0, sc.y_max);
    const Domain canvas = Domain::polygon({{-cx, -cy}, {cx, -cy}, {cx, cy}, {-cx, cy}});
    const std::vector<Site> sites{Site{Point::planar(1.0, 0.0), 0.0, -sc.alpha / sc.p},
                                  Site{Point::planar(-1.0, 0.0), 0.0, 0.0}};
    const int resolution = options.resolution_override.value_or(192);
    const Grid grid = build_polygon_grid(canvas, resolution);
    const Tessellation tess = tessellate(grid, sites, p, canvas);
    RenderExtras extras;
    std::vector<Vec2> polyline;
    for (std::size_t k = curve.samples.size(); k-- > 1;)
      polyline.push_back({curve.samples[k].x, -curve.samples[k].y});
    for (const Vec2& s : curve.samples) polyline.push_back(s);
    extras.polylines.push_back(std::move(polyline));
    svg = render_svg(tess, extras);
  } else if (sc.mode == RunMode::WitnessConvex || sc.mode == RunMode::WitnessBumps) {
    const WitnessDomain witness = sc.mode == RunMode::WitnessConvex
                                      ? build_convex_witness(p, sc.witness_alpha)
                                      : build_bump_witness(sc.n_bumps, sc.kappa);
    const int resolution = options.resolution_override.value_or(sc.witness_resolution);
    const Grid grid = build_polygon_grid(witness.polygon, resolution);
    const CostExponent wp(witness.p);
    const Tessellation tess = tessellate(grid, witness.sites, wp, witness.polygon);
    const int observed = label_components(tess, 0).count;

    report["witness"] = {
        {"expected_components", witness.expected_components},
        {"observed_components", observed},
        {"alpha", witness.alpha},
        {"p", witness.p},
        {"chord_crossings", witness.chord_crossings.size()},
        {"polygon_vertices", nlohmann::json::array()},
        {"rotation", witness.rotation}};
    for (const Vec2& v : witness.polygon.vertices())
      report["witness"]["polygon_vertices"].push_back(detail::vec2_json(v));
    nlohmann::json crossings = nlohmann::json::array();
    for (const Vec2& c : witness.chord_crossings) crossings.push_back(detail::vec2_json(c));
    report["witness"]["crossing_points"] = crossings;

    checks["expected_components"] =
        observed == witness.expected_components ? "pass" : "fail";

    nlohmann::json sites_json = nlohmann::json::array();
    for (std::size_t i = 0; i < witness.sites.size(); ++i)
      sites_json.push_back({{"position", detail::site_position_json(witness.sites[i].position)},
                            {"weight", witness.sites[i].weight},
                            {"mass", tess.masses[i]},
                            {"components", label_components(tess, static_cast<int>(i)).count}});
    report["sites"] = sites_json;
    report["grid"] = {{"nodes", grid.size()}, {"spacing", grid.spacing}};

    RenderExtras extras;
    extras.polylines.push_back(witness.interface_polyline);
    extras.dashed_segments.push_back(witness.chord);
    extras.cross_markers = witness.chord_crossings;
    svg = render_svg(tess, extras);
    if (options.dump_grid) {
      std::ostringstream csv;
      write_grid_csv(grid, csv);
      detail::write_text_file(fs::path(out_dir) / "grid.csv", csv.str());
    }
  } else {
    // tessellate / solve / analyze
    const Domain domain = detail::domain_from_spec(*sc.domain);
    std::vector<Site> sites = detail::sites_from_spec(sc, domain);
    const Grid grid = sc.domain->is_sphere
                          ? build_sphere_grid(sc.domain->n_lat, sc.domain->n_lon)
                          : build_polygon_grid(
                                domain, options.resolution_override.value_or(
                                            sc.domain->resolution));

    const bool masses_given = sc.sites.front().target_mass.has_value();
    if (masses_given) {
      const SolveReport solve = solve_weights(grid, sites, p, domain, sc.solver_tol,
                                              sc.solver_max_iter);
      for (std::size_t i = 0; i < sites.size(); ++i) sites[i].weight = solve.weights[i];
      bool monotone = true;
      for (std::size_t k = 1; k < solve.objective_trace.size(); ++k)
        monotone = monotone && solve.objective_trace[k] >= solve.objective_trace[k - 1];
      report["solver"] = {{"converged", solve.converged},
                          {"iterations", solve.iterations},
                          {"residual", solve.residual},
                          {"tol", sc.solver_tol},
                          {"objective_initial", solve.objective_trace.front()},
                          {"objective_final", solve.objective_trace.back()},
                          {"objective_monotone", monotone}};
      solver_failed = !solve.converged;
    }

    const Tessellation tess = tessellate(grid, sites, p, domain);
    const bool on_sphere = domain.kind() == DomainKind::UnitSphere;
    std::vector<SphereConnectivity> sphere_conn;
    if (on_sphere) sphere_conn = check_sphere_connectedness(tess);

    const bool run_checks = sc.mode == RunMode::Analyze;
    nlohmann::json sites_json = nlohmann::json::array();
    bool all_connected = true, all_convex = true, all_starlike = true;
    bool fixed_points_ok = true, sphere_simply_connected = true;
    int nonempty_cells = 0;
    for (std::size_t i = 0; i < sites.size(); ++i) {
      nlohmann::json entry = {{"position", detail::site_position_json(sites[i].position)},
                              {"weight", sites[i].weight},
                              {"mass", tess.masses[i]}};
      if (masses_given) entry["target_mass"] = sites[i].target_mass;
      const int comps = label_components(tess, static_cast<int>(i)).count;
      entry["components"] = comps;
      if (comps > 0) ++nonempty_cells;
      if (comps > 1) all_connected = false;
      if (on_sphere) {
        entry["complement_components"] = sphere_conn[i].complement_components;
        if (comps > 0 &&
            (comps != 1 || sphere_conn[i].complement_components != 1))
          sphere_simply_connected = false;
      }
      if (run_checks && !on_sphere && sc.p == 2.0 && domain.is_convex()) {
        const ConvexityResult conv =
            check_convexity(tess, static_cast<int>(i), 200, seed + i);
        entry["convex"] = conv.pass;
        all_convex = all_convex && conv.pass;
      }
      if (run_checks && sc.p == 1.0) {
        const StarlikeResult star = check_starlike(tess, static_cast<int>(i), 200, seed + i);
        entry["starlike"] = star.pass;
        all_starlike = all_starlike && star.pass;
        fixed_points_ok = fixed_points_ok && !star.fixed_point_violation;
      }
      sites_json.push_back(std::move(entry));
    }
    report["sites"] = sites_json;
    report["grid"] = {{"nodes", grid.size()}, {"spacing", grid.spacing}};
    if (sites.size() > 1)
      report["boundary_measure"] = boundary_measure_estimate(grid, sites, p, domain);

    if (run_checks) {
      if (!on_sphere && sc.p == 2.0 && domain.is_convex()) {
        checks["cells_connected"] = all_connected ? "pass" : "fail";
        checks["cells_convex"] = all_convex ? "pass" : "fail";
      }
      if (sc.p == 1.0) {
        checks["cells_starlike"] = all_starlike ? "pass" : "fail";
        checks["fixed_points"] = fixed_points_ok ? "pass" : "fail";
      }
      if (on_sphere && nonempty_cells >= 2)
        checks["cells_simply_connected"] = sphere_simply_connected ? "pass" : "fail";
    }

    svg = render_svg(tess);
    if (options.dump_grid) {
      std::ostringstream csv;
      write_grid_csv(grid, csv);
      detail::write_text_file(fs::path(out_dir) / "grid.csv", csv.str());
    }
  }

  report["checks"] = checks;
  bool checks_failed = false;
  for (const auto& [name, verdict] : checks.items())
    checks_failed = checks_failed || verdict.get<std::string>() == "fail";

  if (solver_failed)
    result.exit_code = kExitSolverFailure;
  else if (checks_failed)
    result.exit_code = kExitCheckFailure;
  else
    result.exit_code = kExitOk;
  report["exit_code"] = result.exit_code;

  const auto t_end = std::chrono::steady_clock::now();
  report["timing_ms"] = {
      {"total",
       std::chrono::duration_cast<std::chrono::milliseconds>(t_end - t_start).count()}};

  detail::write_text_file(fs::path(out_dir) / "figure.svg", svg);
  detail::write_text_file(fs::path(out_dir) / "report.json", report.dump(2) + "\n");
  return result;
}

}  // namespace ottess
