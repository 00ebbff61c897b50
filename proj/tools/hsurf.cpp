// Batch driver for the prescribed-curvature solvers: graph and rotational
// solves, parameter sweeps, and standalone mesh diagnostics.

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "hsurf/checks.hpp"
#include "hsurf/config.hpp"
#include "hsurf/curvature.hpp"
#include "hsurf/errors.hpp"
#include "hsurf/graph_solver.hpp"
#include "hsurf/grid.hpp"
#include "hsurf/io.hpp"
#include "hsurf/log.hpp"
#include "hsurf/meshgeom.hpp"
#include "hsurf/parallel.hpp"
#include "hsurf/rotational.hpp"

namespace {

using namespace hsurf;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitNonConvergence = 2;
constexpr int kExitCheckFailed = 3;

struct CommonArgs {
  std::string config_path;
  std::string out_dir;  // overrides config when set
  int jobs = 0;
  double tol = 0;  // overrides solver tolerance when positive
};

RunConfig load(const CommonArgs& args) {
  RunConfig cfg = RunConfig::from_file(args.config_path);
  if (!args.out_dir.empty()) cfg.output_dir = args.out_dir;
  if (args.tol > 0) cfg.solver.tolerance = args.tol;
  if (args.jobs > 0) set_num_threads(args.jobs);
  return cfg;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

void write_reports(const std::string& dir, const std::vector<CheckReport>& checks,
                   const ordered_json& diagnostics) {
  ordered_json j;
  j["checks"] = ordered_json::array();
  for (const auto& r : checks) j["checks"].push_back(r.to_json());
  j["diagnostics"] = diagnostics;
  atomic_write(join_path(dir, "reports.json"), j.dump(2) + "\n");
}

void write_solution_csv(const std::string& dir, const GraphSolution& sol) {
  const GridMask& grid = *sol.grid;
  std::string csv = "x1,x2,u,inside\n";
  char line[160];
  for (int j = 0; j < grid.ny(); ++j)
    for (int i = 0; i < grid.nx(); ++i) {
      const bool in = grid.is_interior(i, j);
      std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%d\n", grid.node_x(i),
                    grid.node_y(j), in ? sol.node_value(i, j) : 0.0, in ? 1 : 0);
      csv += line;
    }
  atomic_write(join_path(dir, "solution.csv"), csv);
}

void write_convergence_log(const std::string& dir, const GraphSolution& sol) {
  std::string log;
  char line[128];
  for (const auto& rec : sol.continuation) {
    std::snprintf(line, sizeof(line), "t=%.17g iterations=%d residual=%.17g\n", rec.t,
                  rec.newton_iterations, rec.residual);
    log += line;
  }
  atomic_write(join_path(dir, "convergence.log"), log);
}

void write_profile_csv(const std::string& dir, const ProfileCurve& curve) {
  std::string csv = "s,r,z,theta\n";
  char line[160];
  for (const auto& st : curve.samples) {
    std::snprintf(line, sizeof(line), "%.17g,%.17g,%.17g,%.17g\n", st.s, st.r, st.z, st.theta);
    csv += line;
  }
  atomic_write(join_path(dir, "profile.csv"), csv);
}

/// Runs the requested graph checks; reflection/rotational parameters come
/// from the config.
std::vector<CheckReport> run_graph_checks(const RunConfig& cfg, const GraphSolution& sol) {
  std::vector<CheckReport> out;
  for (const std::string& id : cfg.requested_checks) {
    if (id == "flux-necessary")
      out.push_back(check_flux_necessary(cfg.domain.shape, cfg.curvature));
    else if (id == "slab")
      out.push_back(check_slab(sol, cfg.slab_v, cfg.curvature));
    else if (id == "height-area")
      out.push_back(check_height_area(sol, cfg.curvature));
    else if (id == "one-side")
      out.push_back(check_one_side(sol, cfg.curvature, Eigen::Vector3d::UnitZ()));
    else if (id == "lambda-one-side")
      out.push_back(check_lambda_one_side(sol, cfg.curvature.direction(),
                                          cfg.curvature.lambda(), Eigen::Vector3d::UnitZ()));
    else if (id == "reflection-symmetry")
      out.push_back(check_reflection_symmetry(sol, cfg.curvature, cfg.reflection_normal,
                                              cfg.solver.tolerance));
    else if (id == "rotational-symmetry")
      out.push_back(check_rotational_symmetry(sol, cfg.curvature));
    else if (id == "cylinder-containment")
      out.push_back(check_cylinder_containment(sol, cfg.curvature, Eigen::Vector3d::UnitZ()));
    // closed-obstruction applies to closed meshes only; mesh-analyze runs it
  }
  return out;
}

int cmd_solve_graph(const CommonArgs& args) {
  const RunConfig cfg = load(args);
  ordered_json diag;
  diag["command"] = "solve-graph";

  GraphSolution sol;
  try {
    sol = solve_dirichlet(cfg.domain, cfg.boundary, cfg.curvature, cfg.solver);
  } catch (const SolveFailure& e) {
    std::vector<CheckReport> checks;
    const auto [hmin, hmax] = cfg.curvature.extrema();
    if (hmin > 0) checks.push_back(check_flux_necessary(cfg.domain.shape, cfg.curvature));
    diag["status"] = "non-convergence";
    diag["error"] = e.what();
    if (const auto* nc = dynamic_cast<const NonConvergence*>(&e)) {
      diag["last_t"] = nc->last_t;
      diag["residual_history"] = nc->residual_history;
    }
    write_reports(cfg.output_dir, checks, diag);
    std::fprintf(stderr, "solve-graph: %s\n", e.what());
    return kExitNonConvergence;
  }

  write_solution_csv(cfg.output_dir, sol);
  write_convergence_log(cfg.output_dir, sol);
  save_obj(graph_to_mesh(sol), join_path(cfg.output_dir, "mesh.obj"));

  const std::vector<CheckReport> checks = run_graph_checks(cfg, sol);
  diag["status"] = "converged";
  diag["final_residual"] = sol.final_residual;
  diag["newton_iterations"] = sol.total_newton_iterations;
  diag["unknowns"] = sol.grid->num_unknowns();
  write_reports(cfg.output_dir, checks, diag);

  for (const auto& r : checks)
    if (!r.pass) return kExitCheckFailed;
  return kExitOk;
}

int cmd_solve_rotational(const CommonArgs& args) {
  const RunConfig cfg = load(args);
  if (!cfg.curvature.is_rotational_about(cfg.rotational.axis)) {
    std::fprintf(stderr,
                 "solve-rotational: prescribed function is not rotational about the axis\n");
    return kExitConfig;
  }
  if (!cfg.rotational.target_radius && !cfg.rotational.max_arc_length) {
    std::fprintf(stderr, "solve-rotational: set target_radius or max_arc_length\n");
    return kExitConfig;
  }
  StopCondition stop;
  stop.target_radius = cfg.rotational.target_radius;
  stop.max_arc_length = cfg.rotational.max_arc_length;
  const ProfileFunction profile = cfg.curvature.profile_about(cfg.rotational.axis);
  const ProfileCurve curve = integrate_from_axis(profile, cfg.rotational.sigma, stop);
  TriMesh mesh = revolve(curve, cfg.rotational.angular_resolution);
  if ((cfg.rotational.axis - Eigen::Vector3d::UnitZ()).norm() > 1e-12) {
    // rotate the canonical frame onto the requested axis
    const Eigen::Quaterniond q =
        Eigen::Quaterniond::FromTwoVectors(Eigen::Vector3d::UnitZ(), cfg.rotational.axis);
    std::vector<Eigen::Vector3d> verts = mesh.vertices();
    for (auto& v : verts) v = q * v;
    mesh = TriMesh::create(std::move(verts), std::vector<std::array<int, 3>>(mesh.faces()));
  }

  write_profile_csv(cfg.output_dir, curve);
  save_obj(mesh, join_path(cfg.output_dir, "mesh.obj"));

  std::vector<CheckReport> checks;
  for (const std::string& id : cfg.requested_checks) {
    if (id == "cylinder-containment" && curve.samples.back().r > 0) {
      const Disc omega{Eigen::Vector2d::Zero(), curve.samples.back().r};
      const double spacing = curve.total_arc_length() / curve.samples.size();
      checks.push_back(
          check_cylinder_containment(mesh, omega, cfg.curvature, cfg.rotational.axis, spacing));
    } else if (id == "closed-obstruction" && mesh.closed()) {
      checks.push_back(check_closed_obstruction(mesh, cfg.curvature, 0.0, cfg.rotational.axis));
    }
  }

  ordered_json diag;
  diag["command"] = "solve-rotational";
  diag["status"] = "ok";
  const char* term = curve.termination == ProfileTermination::TargetRadius ? "target-radius"
                     : curve.termination == ProfileTermination::VerticalPoint
                         ? "vertical-point"
                         : "max-arc-length";
  diag["termination"] = term;
  diag["samples"] = curve.samples.size();
  diag["rim_radius"] = curve.samples.back().r;
  diag["rim_height"] = curve.samples.back().z;
  diag["pole_value"] = profile.f(1.0) * (cfg.rotational.sigma >= 0 ? 1.0 : -1.0);
  write_reports(cfg.output_dir, checks, diag);

  for (const auto& r : checks)
    if (!r.pass) return kExitCheckFailed;
  return kExitOk;
}

int cmd_sweep(const CommonArgs& args) {
  const RunConfig cfg = load(args);
  if (!cfg.sweep) {
    std::fprintf(stderr, "sweep: config has no [sweep] section\n");
    return kExitConfig;
  }
  const SweepSpec& sp = *cfg.sweep;
  std::vector<double> values;
  for (int k = 0; k < sp.steps; ++k)
    values.push_back(sp.steps == 1 ? sp.lo
                                   : sp.lo + (sp.hi - sp.lo) * k / (sp.steps - 1));

  struct Row {
    double value = 0;
    bool converged = false;
    double height = 0, area = 0, ratio = 0;
    bool done = false;
  };
  std::vector<Row> rows(values.size());

  const int jobs = std::max(1, args.jobs > 0 ? args.jobs : 1);
  SolverConfig solver = cfg.solver;
  if (jobs > 1) solver.exec = Exec::Serial;  // solves run concurrently instead

  std::filesystem::create_directories(cfg.output_dir);
  FILE* out = std::fopen(join_path(cfg.output_dir, "sweep.csv").c_str(), "w");
  if (!out) {
    std::fprintf(stderr, "sweep: cannot open output file\n");
    return kExitConfig;
  }
  std::fprintf(out, "value,converged,height,area,ratio\n");
  std::fflush(out);

  std::mutex flush_mutex;
  std::size_t next_to_write = 0;
  auto flush_ready = [&]() {
    // rows leave in parameter order regardless of completion order
    std::lock_guard<std::mutex> lock(flush_mutex);
    while (next_to_write < rows.size() && rows[next_to_write].done) {
      const Row& r = rows[next_to_write];
      if (r.converged)
        std::fprintf(out, "%.17g,1,%.17g,%.17g,%.17g\n", r.value, r.height, r.area, r.ratio);
      else
        std::fprintf(out, "%.17g,0,nan,nan,nan\n", r.value);
      std::fflush(out);
      ++next_to_write;
    }
  };

  auto run_one = [&](std::size_t idx) {
    const double v = values[idx];
    Row row;
    row.value = v;
    PrescribedFunction f = cfg.curvature;
    PlanarDomain dom = cfg.domain;
    if (sp.parameter == "h0")
      f = PrescribedFunction::constant(v);
    else if (sp.parameter == "lambda")
      f = PrescribedFunction::translator(cfg.curvature.kind() == PrescribedFunction::Kind::Translator
                                             ? cfg.curvature.direction()
                                             : Eigen::Vector3d::UnitZ(),
                                         v);
    else if (sp.parameter == "radius")
      std::get<Disc>(dom.shape).radius = v;
    try {
      const GraphSolution sol = solve_dirichlet(dom, cfg.boundary, f, solver);
      row.converged = true;
      row.height = height(sol).height;
      row.area = surface_area(sol, solver.exec);
      const auto [hmin, hmax] = f.extrema();
      row.ratio = row.height / (hmax * row.area / (2.0 * M_PI));
    } catch (const SolveFailure&) {
      row.converged = false;
    }
    row.done = true;
    rows[idx] = row;
    flush_ready();
  };

  if (jobs <= 1) {
    for (std::size_t i = 0; i < values.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> counter{0};
    std::vector<std::thread> pool;
    for (int t = 0; t < jobs; ++t)
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = counter.fetch_add(1);
          if (i >= values.size()) return;
          run_one(i);
        }
      });
    for (auto& th : pool) th.join();
  }
  std::fclose(out);
  return kExitOk;
}

int cmd_mesh_analyze(const CommonArgs& args, const std::string& mesh_flag) {
  const RunConfig cfg = load(args);
  const std::string path = !mesh_flag.empty() ? mesh_flag : cfg.mesh_path;
  if (path.empty()) {
    std::fprintf(stderr, "mesh-analyze: no mesh given (--mesh or [analyze] mesh)\n");
    return kExitConfig;
  }
  const TriMesh mesh = load_obj(path);

  ordered_json diag;
  diag["command"] = "mesh-analyze";
  diag["vertices"] = mesh.vertices().size();
  diag["faces"] = mesh.faces().size();
  diag["closed"] = mesh.closed();
  diag["area"] = mesh.total_area();
  const Eigen::Vector3d va = vector_area(mesh);
  diag["vector_area"] = {va.x(), va.y(), va.z()};
  diag["vector_area_norm"] = va.norm();
  diag["flux_curvature"] = flux_integral(mesh, cfg.curvature, cfg.analyze_v);
  const PrescribedFunction& h0 = cfg.analyze_h0 ? *cfg.analyze_h0 : cfg.curvature;
  diag["flux_h0"] = flux_integral(mesh, h0, cfg.analyze_v);
  const ResidualField res = hsurface_residual(mesh, cfg.curvature);
  diag["residual_sup"] = res.sup_norm;

  std::vector<CheckReport> checks;
  const bool want_obstruction =
      std::find(cfg.requested_checks.begin(), cfg.requested_checks.end(),
                "closed-obstruction") != cfg.requested_checks.end();
  if (want_obstruction)
    checks.push_back(check_closed_obstruction(mesh, h0, cfg.analyze_lambda, cfg.analyze_v));

  write_reports(cfg.output_dir, checks, diag);
  for (const auto& r : checks)
    if (!r.pass) return kExitCheckFailed;
  return kExitOk;
}

int cmd_check(const CommonArgs& args, const std::string& in_dir) {
  const RunConfig cfg = load(args);
  const std::string dir = in_dir.empty() ? cfg.output_dir : in_dir;
  const std::string csv = join_path(dir, "solution.csv");
  std::ifstream in(csv);
  if (!in) {
    std::fprintf(stderr, "check: cannot open %s\n", csv.c_str());
    return kExitConfig;
  }

  GraphSolution sol;
  sol.grid = GridMask::build(cfg.domain);
  sol.g = cfg.boundary;
  const GridMask& grid = *sol.grid;
  sol.u.assign(static_cast<std::size_t>(grid.num_unknowns()), 0.0);
  sol.ghost_g.assign(static_cast<std::size_t>(grid.nx()) * grid.ny(), 0.0);
  for (const int node : grid.ghost_nodes()) {
    const GhostStencil* gs = grid.ghost(node);
    sol.ghost_g[static_cast<std::size_t>(node)] = gs->boundary_coeff * cfg.boundary.eval(gs->crossing);
  }

  std::string line;
  std::getline(in, line);  // header
  std::size_t row = 0;
  while (std::getline(in, line)) {
    double x1, x2, u;
    int inside;
    if (std::sscanf(line.c_str(), "%lg,%lg,%lg,%d", &x1, &x2, &u, &inside) != 4) {
      std::fprintf(stderr, "check: malformed CSV row %zu\n", row + 2);
      return kExitConfig;
    }
    const int i = static_cast<int>(row) % grid.nx();
    const int j = static_cast<int>(row) / grid.nx();
    if (j >= grid.ny()) {
      std::fprintf(stderr, "check: CSV does not match the configured grid\n");
      return kExitConfig;
    }
    if (static_cast<bool>(inside) != grid.is_interior(i, j)) {
      std::fprintf(stderr, "check: inside flags do not match the configured domain\n");
      return kExitConfig;
    }
    if (inside) sol.u[static_cast<std::size_t>(grid.unknown_index(grid.node_id(i, j)))] = u;
    ++row;
  }
  if (row != static_cast<std::size_t>(grid.nx()) * static_cast<std::size_t>(grid.ny())) {
    std::fprintf(stderr, "check: CSV does not match the configured grid\n");
    return kExitConfig;
  }

  const std::vector<CheckReport> checks = run_graph_checks(cfg, sol);
  ordered_json diag;
  diag["command"] = "check";
  diag["source"] = "solution.csv";
  write_reports(cfg.output_dir, checks, diag);
  for (const auto& r : checks)
    if (!r.pass) return kExitCheckFailed;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"prescribed-curvature graph and rotational surface toolkit"};
  app.require_subcommand(1);

  CommonArgs args;
  std::string mesh_flag, in_dir;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", args.config_path, "TOML run configuration")->required();
    sub->add_option("--out", args.out_dir, "output directory (overrides config)");
    sub->add_option("--jobs", args.jobs, "worker threads");
    sub->add_option("--tol", args.tol, "solver residual tolerance override");
  };

  CLI::App* solve_graph = app.add_subcommand("solve-graph", "solve the graph Dirichlet problem");
  add_common(solve_graph);
  CLI::App* solve_rot =
      app.add_subcommand("solve-rotational", "integrate a rotational cap profile");
  add_common(solve_rot);
  CLI::App* sweep = app.add_subcommand("sweep", "parameter sweep of graph solves");
  add_common(sweep);
  CLI::App* analyze = app.add_subcommand("mesh-analyze", "integral diagnostics of an OBJ mesh");
  add_common(analyze);
  analyze->add_option("--mesh", mesh_flag, "OBJ file to analyze");
  CLI::App* check = app.add_subcommand("check", "re-run checks on saved outputs");
  add_common(check);
  check->add_option("--in", in_dir, "directory holding solution.csv");

  CLI11_PARSE(app, argc, argv);

  try {
    if (solve_graph->parsed()) return cmd_solve_graph(args);
    if (solve_rot->parsed()) return cmd_solve_rotational(args);
    if (sweep->parsed()) return cmd_sweep(args);
    if (analyze->parsed()) return cmd_mesh_analyze(args, mesh_flag);
    if (check->parsed()) return cmd_check(args, in_dir);
  } catch (const hsurf::ConfigError& e) {
    std::fprintf(stderr, "%s:%d:%d: %s\n", args.config_path.c_str(), e.line, e.column, e.what());
    return kExitConfig;
  } catch (const hsurf::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitConfig;
  }
  return kExitConfig;
}
