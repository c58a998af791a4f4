// polyshoot: command-line front end.
//
// Exit codes: 0 success, 1 solver-negative (no zero found, strict truncation,
// numerical failure), 2 invalid input.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "polyshoot/analysis.hpp"
#include "polyshoot/config.hpp"
#include "polyshoot/degree_solver.hpp"
#include "polyshoot/io.hpp"

namespace fs = std::filesystem;
using namespace polyshoot;

namespace {

struct Common {
  std::string spec_path;
  IvpControls controls;
  std::string out_dir = ".";
  long long seed = 0;
  bool emit_plot = false;
};

struct InvalidInput : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void add_controls(CLI::App* cmd, Common& c) {
  cmd->add_option("--spec", c.spec_path, "system config (JSON)")->required();
  cmd->add_option("--h0", c.controls.h0, "start radius")->capture_default_str();
  cmd->add_option("--rel-tol", c.controls.rel_tol, "relative tolerance")->capture_default_str();
  cmd->add_option("--abs-tol", c.controls.abs_tol, "absolute tolerance")->capture_default_str();
  cmd->add_option("--r-max", c.controls.r_max, "integration cutoff")->capture_default_str();
  cmd->add_option("--eps-wall", c.controls.eps_wall, "wall localisation width")->capture_default_str();
  cmd->add_option("--eps-decay", c.controls.eps_decay, "decay threshold")->capture_default_str();
  cmd->add_option("--max-steps", c.controls.max_steps, "step budget per integration")->capture_default_str();
  cmd->add_option("--samples-per-step", c.controls.samples_per_step, "dense samples stored per step")
      ->capture_default_str();
  cmd->add_option("--out-dir", c.out_dir, "directory for output files")->capture_default_str();
  cmd->add_option("--seed", c.seed, "run seed, echoed in outputs")->capture_default_str();
}

SystemSpec load_valid(const std::string& path) {
  SystemSpec spec = load_spec(path);
  require_valid(spec);
  return spec;
}

void write_json(const fs::path& path, const json& j) {
  std::ofstream os(path);
  if (!os) throw Error("cannot write " + path.string());
  os << j.dump(2) << '\n';
}

fs::path prepare_dir(const std::string& dir) {
  fs::path p(dir);
  fs::create_directories(p);
  return p;
}

void emit_plot(const fs::path& dir, const std::string& csv, int components, const std::string& title) {
  std::ofstream os(dir / "profile.gp");
  os << gnuplot_script(csv, components, title);
}

int cmd_classify(const Common& c) {
  const SystemSpec spec = load_valid(c.spec_path);
  json out = {{"criticality", to_json(classify_criticality(spec))},
              {"nondegeneracy", to_json(check_nondegeneracy(spec))}};
  const auto shape = recognise_shape(spec);
  if (!std::holds_alternative<std::monostate>(shape)) out["pohozaev_bracket"] = pohozaev_bracket(shape);
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_shoot(const Common& c, const std::vector<double>& alpha_in, bool strict) {
  const SystemSpec spec = load_valid(c.spec_path);
  c.controls.validate();
  const ReducedSystem rs = reduce(spec);
  if (static_cast<int>(alpha_in.size()) != rs.size()) {
    throw InvalidInput("--alpha needs " + std::to_string(rs.size()) + " components (one per chain level)");
  }
  const Eigen::VectorXd alpha = Eigen::Map<const Eigen::VectorXd>(alpha_in.data(), alpha_in.size());
  const Shot shot = shoot(rs, alpha, c.controls);

  json out = {{"seed", c.seed}, {"target", to_json(shot.target)}};
  const fs::path dir = prepare_dir(c.out_dir);
  if (shot.run) {
    out["outcome"] = to_json(shot.run->outcome);
    out["accepted_steps"] = shot.run->trajectory.accepted_steps;
    out["rejected_steps"] = shot.run->trajectory.rejected_steps;
    write_trajectory_csv(dir / "trajectory.csv", shot.run->trajectory);
    out["trajectory"] = (dir / "trajectory.csv").string();
    if (c.emit_plot) emit_plot(dir, "trajectory.csv", rs.size(), "shoot");
  }
  write_json(dir / "outcome.json", out);
  std::cout << out.dump(2) << '\n';
  return strict && shot.target.kase == TargetCase::Unresolved ? 1 : 0;
}

int cmd_degree(const Common& c, double mass, int depth, int jobs) {
  const SystemSpec spec = load_valid(c.spec_path);
  c.controls.validate();
  const ReducedSystem rs = reduce(spec);
  const DegreeReport rep = degree_on_mass_grid(rs, mass, depth, c.controls, jobs);
  json out = to_json(rep);
  out["seed"] = c.seed;
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_solve(const Common& c, double mass, const SearchOptions& opts) {
  const SystemSpec spec = load_valid(c.spec_path);
  c.controls.validate();
  const ReducedSystem rs = reduce(spec);
  const fs::path dir = prepare_dir(c.out_dir);
  try {
    const ZeroSearch zs = find_zero(rs, mass, c.controls, opts);
    const Shot shot = shoot(rs, zs.alpha_star, c.controls);
    write_trajectory_csv(dir / "profile.csv", shot.run->trajectory);
    write_json(dir / "trace.json", to_json(zs.trace));
    json out = {{"seed", c.seed},
                {"alpha_star", to_json(zs.alpha_star)},
                {"target", to_json(zs.target)},
                {"degree", to_json(zs.degree)},
                {"iterations", static_cast<int>(zs.trace.size()) - 1},
                {"profile", (dir / "profile.csv").string()},
                {"trace", (dir / "trace.json").string()}};
    if (c.emit_plot) emit_plot(dir, "profile.csv", rs.size(), "solve");
    write_json(dir / "solution.json", out);
    std::cout << out.dump(2) << '\n';
    return 0;
  } catch (const NotFound& nf) {
    json cell = json::array();
    for (const auto& v : nf.deepest_cell) cell.push_back(to_json(v));
    json diag = {{"seed", c.seed},
                 {"error", "not_found"},
                 {"message", nf.what()},
                 {"deepest_cell", std::move(cell)},
                 {"degree", to_json(nf.degree)}};
    write_json(dir / "trace.json", to_json(nf.trace));
    write_json(dir / "not_found.json", diag);
    std::cerr << diag.dump(2) << '\n';
    return 1;
  }
}

int cmd_verify(const std::string& spec_path, const std::string& csv, bool fit) {
  const SystemSpec spec = load_valid(spec_path);
  const Trajectory traj = read_trajectory_csv(csv);
  const bool full = !std::holds_alternative<std::monostate>(recognise_shape(spec));
  json out = to_json(full ? pohozaev_residual(traj, spec) : energy_identity(traj, spec));
  if (fit) out["decay_fit"] = to_json(decay_fit(traj));
  std::cout << out.dump(2) << '\n';
  return 0;
}

int default_jobs() {
  if (const char* env = std::getenv("POLYSHOOT_JOBS")) {
    try {
      return std::max(1, std::stoi(env));
    } catch (const std::logic_error&) {
      std::cerr << "ignoring malformed POLYSHOOT_JOBS=" << env << '\n';
    }
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Radial shooting with degree theory for weighted polyharmonic systems"};
  app.require_subcommand(1);

  Common common;
  std::vector<double> alpha;
  bool strict = false;
  double mass = 0.0;
  SearchOptions opts;
  opts.jobs = default_jobs();
  std::string verify_csv;
  bool verify_fit = false;

  auto* classify = app.add_subcommand("classify", "criticality and non-degeneracy reports");
  classify->add_option("--spec", common.spec_path, "system config (JSON)")->required();

  auto* shoot_cmd = app.add_subcommand("shoot", "integrate from one alpha");
  add_controls(shoot_cmd, common);
  shoot_cmd->add_option("--alpha", alpha, "initial values, one per chain level")->required()->delimiter(',');
  shoot_cmd->add_flag("--strict", strict, "exit 1 when the run is truncated");
  shoot_cmd->add_flag("--emit-plot", common.emit_plot, "write a gnuplot script next to the CSV");

  auto* solve_cmd = app.add_subcommand("solve", "search the mass simplex for an entire solution");
  add_controls(solve_cmd, common);
  solve_cmd->add_option("--mass", mass, "component sum a of the shooting vector")->required();
  solve_cmd->add_option("--depth", opts.depth, "initial subdivision depth")->capture_default_str();
  solve_cmd->add_option("--budget", opts.budget, "refinement iterations")->capture_default_str();
  solve_cmd->add_option("--jobs", opts.jobs, "labelling threads (env POLYSHOOT_JOBS)");
  solve_cmd->add_flag("--emit-plot", common.emit_plot, "write a gnuplot script next to the CSV");

  auto* degree_cmd = app.add_subcommand("degree", "degree of psi on the mass simplex");
  add_controls(degree_cmd, common);
  degree_cmd->add_option("--mass", mass, "component sum a")->required();
  degree_cmd->add_option("--depth", opts.depth, "subdivision depth")->capture_default_str();
  degree_cmd->add_option("--jobs", opts.jobs, "labelling threads (env POLYSHOOT_JOBS)");

  auto* verify_cmd = app.add_subcommand("verify", "energy and Pohozaev identities on a trajectory");
  verify_cmd->add_option("--pohozaev", verify_csv, "trajectory CSV")->required();
  verify_cmd->add_option("--spec", common.spec_path, "system config (JSON)")->required();
  verify_cmd->add_flag("--decay-fit", verify_fit, "also fit the tail decay rate");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (*classify) return cmd_classify(common);
    if (*shoot_cmd) return cmd_shoot(common, alpha, strict);
    if ((*solve_cmd || *degree_cmd) && !(mass > 0.0)) throw InvalidInput("--mass must be positive");
    if (*solve_cmd) return cmd_solve(common, mass, opts);
    if (*degree_cmd) return cmd_degree(common, mass, opts.depth, opts.jobs);
    if (*verify_cmd) return cmd_verify(common.spec_path, verify_csv, verify_fit);
  } catch (const ConfigError& e) {
    std::cerr << "invalid config: " << e.what() << '\n';
    return 2;
  } catch (const InvalidSpec& e) {
    std::cerr << "invalid system: " << e.what() << '\n';
    return 2;
  } catch (const InvalidControls& e) {
    std::cerr << "invalid controls: " << e.what() << '\n';
    return 2;
  } catch (const NonPositiveAlpha& e) {
    std::cerr << "invalid alpha: " << e.what() << '\n';
    return 2;
  } catch (const MassExceeded& e) {
    std::cerr << "invalid alpha: " << e.what() << '\n';
    return 2;
  } catch (const InvalidInput& e) {
    std::cerr << "invalid input: " << e.what() << '\n';
    return 2;
  } catch (const Error& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
