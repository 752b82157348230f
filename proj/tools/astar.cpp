// Command-line driver: identity fuzzing, Ricci oracle tables, star solves,
// consistency and corotating checks, field export.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "astar/config.hpp"
#include "astar/corotating.hpp"
#include "astar/io.hpp"
#include "astar/parallel.hpp"
#include "astar/verify.hpp"

using namespace astar;
using json = nlohmann::ordered_json;

namespace {

constexpr int kPass = 0;
constexpr int kVerifyFail = 1;
constexpr int kNoConvergence = 2;
constexpr int kUsage = 64;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

RunConfig read_config(const std::string& path) {
  try {
    return path.empty() ? RunConfig{} : load_config(path);
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary);
  if (!f) throw UsageError("cannot write '" + p.string() + "'");
  f << text;
}

void emit(const json& j, const std::string& out) {
  const std::string text = j.dump(2) + "\n";
  if (out.empty()) {
    std::cout << text;
  } else {
    write_text(out, text);
  }
}

struct SolveRun {
  RunConfig cfg;
  SolveResult result;
  std::optional<ResidualReport> residuals;
  std::optional<GridDefect> defect;
};

SolveRun run_solve(const std::string& config_path) {
  SolveRun run{read_config(config_path), {}, {}, {}};
  run.result = fixed_point_solve(run.cfg.solver);
  const GridPhysics ph(run.cfg.solver.eos, run.cfg.solver.k);
  try {
    run.residuals = grid_residual_report(run.result.state, ph);
    run.defect = grid_consistency_defect(run.result.state, ph);
  } catch (const Error& e) {
    // A failed solve can leave a state the evaluators reject; the solve
    // report already carries the reason.
    std::cerr << "warning: residuals unavailable: " << e.what() << "\n";
  }
  return run;
}

json config_json(const RunConfig& cfg) {
  json o = json::object();
  std::istringstream in(echo_config(cfg));
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find(" = ");
    o[line.substr(0, eq)] = line.substr(eq + 3);
  }
  return o;
}

json solve_json(const SolveRun& run) {
  json o;
  o["solve"] = to_json(run.result.report);
  if (run.residuals) o["residuals"] = to_json(*run.residuals);
  if (run.defect) {
    o["consistency"] = {{"max_lhs", run.defect->max_lhs},
                        {"max_gap", run.defect->max_gap},
                        {"hypothesis_holds", run.defect->hypothesis_holds}};
  }
  o["config"] = config_json(run.cfg);
  return o;
}

void print_solve_summary(const SolveRun& run) {
  const SolveReport& r = run.result.report;
  std::cout << (r.converged ? "converged" : "not converged") << " after "
            << r.outer_iters << " outer iterations: " << r.message << "\n";
  if (r.where) {
    std::cout << "  at w = " << r.where->w << ", z = " << r.where->z << "\n";
  }
  if (run.residuals) {
    std::cout << "  max reduced residual " << run.residuals->max_reduced()
              << ", max Einstein residual " << run.residuals->max_einstein()
              << "\n";
  }
}

int cmd_verify(std::uint64_t seed, int points, double tol,
               const std::string& out) {
  if (points == 0) {
    std::cerr << "warning: zero points requested, nothing was checked\n";
  }
  const SuiteReport rep = run_identity_suite(seed, points, tol, Constants{});
  emit(to_json(rep), out);
  if (!rep.passed()) {
    const IdentityFailure& f = *rep.first_failure;
    std::cerr << "FAIL " << f.identity << " at sample " << f.sample
              << ": error " << f.error << " > tol " << tol << "\n";
    return kVerifyFail;
  }
  return kPass;
}

std::vector<double> parse_steps(const std::string& text) {
  std::vector<double> h;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      h.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw UsageError("bad step size '" + item + "'");
    }
  }
  return h;
}

int cmd_ricci(const std::string& steps, int fields, std::uint64_t seed,
              const std::string& which, double min_order,
              const std::string& out) {
  const std::vector<double> h = parse_steps(steps);
  RicciStudy st;
  try {
    if (which == "random") {
      st = ricci_convergence(h, fields, seed);
    } else if (which == "fixture") {
      st = ricci_convergence(h, SmoothField::fixture(), 1.0, 0.5);
    } else {
      const MetricSampler flat = [](double w, double) {
        return MetricJet{Jet::constant(0.0), Jet::constant(0.0),
                         Jet::constant(0.0), Jet::coord_w(w)};
      };
      st = ricci_convergence(h, flat, 1.0, 0.0);
    }
  } catch (const Error& e) {
    throw UsageError(e.what());
  }
  std::cout << "h                max discrepancy\n";
  for (const RicciRow& r : st.rows) {
    std::cout << std::left << std::setw(16) << r.h << " " << r.max_discrepancy
              << "\n";
  }
  if (std::isfinite(st.min_order)) {
    std::cout << "observed order (min over fields): " << st.min_order << "\n";
  } else {
    std::cout << "observed order: discrepancies at round-off\n";
  }
  if (!out.empty()) emit(to_json(st), out);
  return std::isfinite(st.min_order) && st.min_order < min_order ? kVerifyFail
                                                                  : kPass;
}

int cmd_solve(const std::string& config, const std::string& out_dir) {
  const SolveRun run = run_solve(config);
  const std::filesystem::path dir(out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw UsageError("cannot create '" + out_dir + "'");
  std::ostringstream csv;
  write_fields_csv(csv, run.result.state,
                   GridPhysics(run.cfg.solver.eos, run.cfg.solver.k));
  write_text(dir / "fields.csv", csv.str());
  write_text(dir / "report.json", solve_json(run).dump(2) + "\n");
  write_text(dir / "config.echo", echo_config(run.cfg));
  print_solve_summary(run);
  return run.result.report.converged ? kPass : kNoConvergence;
}

int cmd_consistency(const std::string& config, const std::string& out) {
  const SolveRun run = run_solve(config);
  print_solve_summary(run);
  json o;
  o["converged"] = run.result.report.converged;
  if (run.defect) {
    o["max_lhs"] = run.defect->max_lhs;
    o["max_gap"] = run.defect->max_gap;
    o["hypothesis_holds"] = run.defect->hypothesis_holds;
    if (!run.defect->hypothesis_holds) {
      std::cerr << "warning: angular velocity varies inside matter; the "
                   "defect identity is not claimed, values are reported "
                   "only\n";
    }
  }
  o["config"] = config_json(run.cfg);
  emit(o, out);
  return run.result.report.converged ? kPass : kNoConvergence;
}

int cmd_corotate(const std::string& config, double tol,
                 const std::string& out) {
  const SolveRun run = run_solve(config);
  print_solve_summary(run);
  if (!run.result.report.converged) return kNoConvergence;
  const FieldState& s = run.result.state;
  const Constants& k = run.cfg.solver.k;
  if (!s.omega.rigid()) {
    throw UsageError("corotate needs a constant angular velocity");
  }
  double worst = 0.0;
  int nodes = 0;
  std::optional<std::string> failure;
  for (int i = 1; i < s.grid.nw && !failure; ++i) {
    for (int j = 1; j < s.grid.nz; ++j) {
      try {
        const TransformReport tr =
            verify_transform(rest_frame_jet(s, i, j, k), s.omega.value, k);
        worst = std::max(worst, tr.max_error());
        ++nodes;
      } catch (const Error& e) {
        std::ostringstream os;
        os << e.what() << " at w = " << s.grid.w(i) << ", z = " << s.grid.z(j);
        failure = os.str();
        break;
      }
    }
  }
  json o;
  o["nodes"] = nodes;
  o["max_error"] = worst;
  o["tol"] = tol;
  if (failure) o["failure"] = *failure;
  o["config"] = config_json(run.cfg);
  emit(o, out);
  return !failure && worst <= tol ? kPass : kVerifyFail;
}

int cmd_export(const std::string& config, const std::string& fields_path,
               const std::string& report_path) {
  const SolveRun run = run_solve(config);
  std::ostringstream csv;
  write_fields_csv(csv, run.result.state,
                   GridPhysics(run.cfg.solver.eos, run.cfg.solver.k));
  if (fields_path == "-") {
    std::cout << csv.str();
  } else {
    write_text(fields_path, csv.str());
  }
  if (!report_path.empty()) write_text(report_path, solve_json(run).dump(2) + "\n");
  return run.result.report.converged ? kPass : kNoConvergence;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Stationary axisymmetric star toolkit"};
  app.require_subcommand(1);
  int jobs_flag = 1;
  app.add_option("--jobs", jobs_flag, "Worker threads for grid kernels")
      ->check(CLI::PositiveNumber);

  std::string config, out, out_dir, steps = "1e-2,5e-3,2.5e-3", which = "random";
  std::string fields_path, report_path;
  std::uint64_t seed = 42, ricci_seed = 7;
  int points = 200, fields = 20;
  double tol = 1e-10, min_order = 1.9, corot_tol = 1e-10;

  auto* verify = app.add_subcommand("verify", "Run the pointwise identity suite");
  verify->add_option("--config", config, "Read seeds.verify, verify.points, verify.tol");
  auto* o_seed = verify->add_option("--seed", seed, "Random seed");
  auto* o_points = verify->add_option("--points", points, "Number of samples")
                       ->check(CLI::NonNegativeNumber);
  auto* o_tol = verify->add_option("--tol", tol, "Scaled tolerance");
  verify->add_option("--out", out, "Write the JSON report here (default stdout)");

  auto* ricci = app.add_subcommand("ricci-oracle",
                                   "Closed-form Ricci against finite differences");
  ricci->add_option("--steps", steps, "Comma-separated decreasing step sizes");
  ricci->add_option("--fields", fields, "Random fields")->check(CLI::PositiveNumber);
  ricci->add_option("--seed", ricci_seed, "Random seed");
  ricci->add_option("--field", which, "random, minkowski or fixture")
      ->check(CLI::IsMember({"random", "minkowski", "fixture"}));
  ricci->add_option("--min-order", min_order, "Required observed order");
  ricci->add_option("--out", out, "Also write the table as JSON");

  auto* solve = app.add_subcommand("solve", "Solve for an equilibrium");
  solve->add_option("--config", config, "Config file")->required();
  solve->add_option("--out", out_dir, "Output directory")->required();

  auto* consistency = app.add_subcommand(
      "consistency", "Solve, then report the K mixed-partial defect");
  consistency->add_option("--config", config, "Config file")->required();
  consistency->add_option("--out", out, "JSON output (default stdout)");

  auto* corotate = app.add_subcommand(
      "corotate", "Solve, then check the corotating transform at every node");
  corotate->add_option("--config", config, "Config file")->required();
  corotate->add_option("--tol", corot_tol, "Tolerance on every identity");
  corotate->add_option("--out", out, "JSON output (default stdout)");

  auto* exp = app.add_subcommand("export", "Solve and export fields");
  exp->add_option("--config", config, "Config file")->required();
  exp->add_option("--fields", fields_path, "CSV path, '-' for stdout")->required();
  exp->add_option("--report", report_path, "Residual report JSON path");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  set_jobs(jobs_flag);
  if (const char* env = std::getenv("ASTAR_JOBS")) {
    try {
      set_jobs(std::stoi(env));
    } catch (const std::exception&) {
      std::cerr << "error: ASTAR_JOBS must be an integer\n";
      return kUsage;
    }
  }

  try {
    if (verify->parsed()) {
      if (!config.empty()) {
        const RunConfig c = read_config(config);
        if (o_seed->count() == 0) seed = c.verify_seed;
        if (o_points->count() == 0) points = c.verify_points;
        if (o_tol->count() == 0) tol = c.verify_tol;
      }
      return cmd_verify(seed, points, tol, out);
    }
    if (ricci->parsed()) {
      return cmd_ricci(steps, fields, ricci_seed, which, min_order, out);
    }
    if (solve->parsed()) return cmd_solve(config, out_dir);
    if (consistency->parsed()) return cmd_consistency(config, out);
    if (corotate->parsed()) return cmd_corotate(config, corot_tol, out);
    if (exp->parsed()) return cmd_export(config, fields_path, report_path);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::config ||
        e.kind() == ErrorKind::hypothesis_violation) {
      std::cerr << "error: " << e.what() << "\n";
      return kUsage;
    }
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return kNoConvergence;
  }
  return kUsage;
}
