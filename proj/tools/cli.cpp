#include "cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "upf/errors.hpp"
#include "upf/oracle.hpp"
#include "upf/protocol.hpp"
#include "upf/report.hpp"
#include "upf/scenario.hpp"

namespace upf::cli {

namespace fs = std::filesystem;

namespace {

struct CommonOptions {
  std::string builtin;
  std::string scenario_path;
  double delta = 1e-3;
  std::size_t max_iters = 10000;
  double initial_bid = 1.0;
  bool no_radar = false;
  std::string out_dir = ".";

  StageConfig stage_config() const {
    StageConfig c;
    c.delta = delta;
    c.max_iters = max_iters;
    c.initial_bid = initial_bid;
    return c;
  }
};

void add_common(CLI::App &cmd, CommonOptions &opts) {
  auto *builtin = cmd.add_option("--builtin", opts.builtin, "Built-in scenario")
                      ->check(CLI::IsMember({"table1"}));
  auto *file = cmd.add_option("--scenario", opts.scenario_path, "Scenario JSON file");
  builtin->excludes(file);
  cmd.add_option("--delta", opts.delta, "MME convergence threshold on aggregate bids")
      ->capture_default_str();
  cmd.add_option("--max-iters", opts.max_iters, "Iteration limit per stage")
      ->capture_default_str();
  cmd.add_option("--initial-bid", opts.initial_bid, "Initial bid of every UE")
      ->capture_default_str();
  cmd.add_flag("--no-radar", opts.no_radar, "Disable the interference mask");
  cmd.add_option("--out", opts.out_dir, "Output directory")->capture_default_str();
}

Scenario load(const CommonOptions &opts) {
  Scenario s;
  if (!opts.scenario_path.empty())
    s = load_scenario_file(opts.scenario_path);
  else if (opts.builtin.empty() || opts.builtin == "table1")
    s = builtin_table1();
  if (opts.no_radar)
    s.interference.assign(s.sector_count, false);
  return s;
}

std::ofstream open_output(const CommonOptions &opts, const std::string &name) {
  fs::create_directories(opts.out_dir);
  const auto path = fs::path(opts.out_dir) / name;
  std::ofstream os(path, std::ios::binary);
  if (!os)
    throw std::runtime_error("cannot write '" + path.string() + "'");
  return os;
}

void report_stage(std::ostream &out, const char *name, const ConvergenceTrace &trace) {
  out << name << " stage: " << to_string(trace.stop_reason) << " after " << trace.iterations()
      << " iterations\n";
}

int cmd_run(const CommonOptions &opts, std::optional<double> r_radar,
            std::optional<double> r_comm, bool trace, std::ostream &out) {
  auto scenario = load(opts);
  if (r_radar)
    scenario.r_radar_total = *r_radar;
  if (r_comm)
    scenario.r_comm_total = *r_comm;
  validate(scenario);

  const auto result = run_two_stage(scenario, opts.stage_config());
  {
    auto os = open_output(opts, "allocation.csv");
    write_allocation_csv(os, scenario, result);
  }
  if (trace) {
    auto os = open_output(opts, "trace.csv");
    write_trace_csv(os, result);
  }
  report_stage(out, "radar", result.radar_trace);
  report_stage(out, "comm", result.comm_trace);
  return result.converged() ? kExitOk : kExitNotConverged;
}

int cmd_sweep(const CommonOptions &opts, SweepSpec spec, std::optional<double> radar_cap,
              std::ostream &out, std::ostream &err) {
  const auto scenario = load(opts);
  spec.radar_cap = radar_cap.value_or(scenario.r_radar_total);
  spec.no_radar = opts.no_radar;
  const auto totals = sweep_totals(spec);

  auto os = open_output(opts, "sweep.csv");
  write_sweep_header(os, scenario.sector_count);
  for (double total : totals) {
    const auto point = run_sweep_point(scenario, spec, total, opts.stage_config());
    if (!point.result.converged()) {
      os.flush();
      err << "sweep point R_total=" << format_number(total) << " did not converge; stopping\n";
      return kExitNotConverged;
    }
    write_sweep_row(os, point);
  }
  out << "sweep: " << totals.size() << " points written\n";
  return kExitOk;
}

int cmd_oracle_check(const CommonOptions &opts, std::optional<double> r_radar,
                     std::optional<double> r_comm, double tol, std::ostream &out,
                     std::ostream &err) {
  auto scenario = load(opts);
  if (r_radar)
    scenario.r_radar_total = *r_radar;
  if (r_comm)
    scenario.r_comm_total = *r_comm;
  validate(scenario);

  const auto result = run_two_stage(scenario, opts.stage_config());
  if (!result.converged()) {
    err << "protocol did not converge\n";
    return kExitNotConverged;
  }

  bool ok = true;
  const auto ue_count = static_cast<Eigen::Index>(scenario.ues.size());
  const auto check = [&](Stage stage, double budget, const Eigen::VectorXd &shifts,
                         const Eigen::VectorXd &rates) {
    if (budget <= 0.0) {
      out << to_string(stage) << ": empty budget, skipped\n";
      return;
    }
    const auto sp = stage_problem(scenario, stage, budget, shifts);
    Eigen::VectorXd protocol_rates(static_cast<Eigen::Index>(sp.ue_index.size()));
    for (std::size_t k = 0; k < sp.ue_index.size(); ++k)
      protocol_rates[static_cast<Eigen::Index>(k)] =
          rates[static_cast<Eigen::Index>(sp.ue_index[k])];
    const double protocol = objective(sp.problem, protocol_rates);
    const auto oracle = oracle_ascent_solve(sp.problem);
    const double gap = std::abs(oracle.objective - protocol);
    ok = ok && gap <= tol;
    out << to_string(stage) << ": protocol " << format_number(protocol) << " oracle "
        << format_number(oracle.objective) << " gap " << format_number(gap)
        << (gap <= tol ? " ok" : " FAIL") << '\n';
  };
  check(Stage::Radar, scenario.r_radar_total, Eigen::VectorXd::Zero(ue_count), result.r_radar);
  check(Stage::Comm, scenario.r_comm_total, result.r_radar, result.r_comm);
  return ok ? kExitOk : kExitError;
}

} // namespace

int run(int argc, const char *const *argv, std::ostream &out, std::ostream &err) {
  CLI::App app{"Two-stage utility proportional fairness rate allocation"};
  app.name("upfsim");
  app.require_subcommand(1);

  CommonOptions run_opts;
  std::optional<double> run_radar, run_comm;
  bool run_trace = false;
  auto *run_cmd = app.add_subcommand("run", "Allocate rates once and write allocation.csv");
  add_common(*run_cmd, run_opts);
  run_cmd->add_option("--r-radar", run_radar, "Override the radar-spectrum budget");
  run_cmd->add_option("--r-comm", run_comm, "Override the communications-spectrum budget");
  run_cmd->add_flag("--trace", run_trace, "Also write trace.csv");

  CommonOptions sweep_opts;
  SweepSpec sweep_spec{10.0, 580.0, 30.0, 200.0, false};
  std::optional<double> sweep_cap;
  auto *sweep_cmd = app.add_subcommand("sweep", "Sweep total bandwidth and write sweep.csv");
  add_common(*sweep_cmd, sweep_opts);
  sweep_cmd->add_option("--min", sweep_spec.r_total_min, "First R_total")->capture_default_str();
  sweep_cmd->add_option("--max", sweep_spec.r_total_max, "Last R_total")->capture_default_str();
  sweep_cmd->add_option("--step", sweep_spec.r_total_step, "R_total increment")
      ->capture_default_str();
  sweep_cmd->add_option("--radar-cap", sweep_cap,
                        "Radar budget filled first (default: scenario r_radar_total)");

  CommonOptions check_opts;
  std::optional<double> check_radar, check_comm;
  double check_tol = 1e-3;
  auto *check_cmd = app.add_subcommand(
      "oracle-check", "Compare the protocol objective with the centralized optimum");
  add_common(*check_cmd, check_opts);
  check_cmd->add_option("--r-radar", check_radar, "Override the radar-spectrum budget");
  check_cmd->add_option("--r-comm", check_comm, "Override the communications-spectrum budget");
  check_cmd->add_option("--tol", check_tol, "Allowed objective gap")->capture_default_str();

  CommonOptions dump_opts;
  auto *dump_cmd = app.add_subcommand("scenario", "Print the scenario as canonical JSON");
  add_common(*dump_cmd, dump_opts);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError &e) {
    if (e.get_exit_code() == 0)
      return app.exit(e, out, err);
    err << "usage error: " << e.what() << '\n';
    return kExitError;
  }

  try {
    if (*run_cmd)
      return cmd_run(run_opts, run_radar, run_comm, run_trace, out);
    if (*sweep_cmd)
      return cmd_sweep(sweep_opts, sweep_spec, sweep_cap, out, err);
    if (*check_cmd)
      return cmd_oracle_check(check_opts, check_radar, check_comm, check_tol, out, err);
    out << save_scenario(load(dump_opts));
    return kExitOk;
  } catch (const ParseError &e) {
    err << "parse error: " << e.what() << '\n';
  } catch (const ValidationError &e) {
    err << "invalid scenario: " << e.what() << '\n';
  } catch (const std::exception &e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitError;
}

} // namespace upf::cli
