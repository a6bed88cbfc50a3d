#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "lostsales/analysis.hpp"
#include "lostsales/config.hpp"
#include "lostsales/harness.hpp"
#include "lostsales/verification.hpp"

namespace {

using namespace lostsales;

struct CommonOptions {
  std::string config_path;
  std::string out_dir = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> replications;
  std::optional<double> h_scale;
  bool expose_demand = false;
};

void attach_common(CLI::App* cmd, CommonOptions* opts, bool config_required = true) {
  auto* config = cmd->add_option("--config", opts->config_path, "experiment config file");
  if (config_required) config->required();
  cmd->add_option("--out", opts->out_dir, "output directory for CSV files");
  cmd->add_option("--seed", opts->seed, "override the config seed");
  cmd->add_option("--replications", opts->replications, "override the replication count");
  cmd->add_option("--h-scale", opts->h_scale, "override the confidence-interval scale");
  cmd->add_flag("--expose-demand", opts->expose_demand,
                "include the demand column in CSV output (debugging only)");
}

ExperimentConfig load_config(const CommonOptions& opts) {
  ExperimentConfig config = parse_config_file(opts.config_path);
  if (opts.seed) config.seed = *opts.seed;
  if (opts.replications) config.replications = *opts.replications;
  if (opts.h_scale) config.ci_scale = *opts.h_scale;
  config.validate();
  return config;
}

std::ofstream open_output(const std::string& dir, const std::string& name) {
  std::filesystem::create_directories(dir);
  const std::filesystem::path path = std::filesystem::path(dir) / name;
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

void print_report(const RegretReport& report) {
  std::cout << "oracle: level " << report.oracle_level << ", loss " << report.oracle_loss
            << ", long-run true cost " << report.oracle_lambda << "\n";
  std::cout << "replications: " << report.replications << "\n";
  if (!report.checkpoints.empty()) {
    const CheckpointRow& last = report.checkpoints.back();
    std::cout << "final checkpoint " << last.step << ": pathwise regret "
              << last.mean_regret_pathwise << " (se " << last.se_regret_pathwise
              << "), true-cost regret " << last.mean_regret_true << "\n";
  }
  std::cout << "mean drain steps per round: " << report.mean_drain_steps_per_round() << "\n";
}

int cmd_run(const CommonOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  std::vector<TraceRow> trace;
  const RegretReport report = run_experiment(config, &trace);

  auto regret_out = open_output(opts.out_dir, "regret.csv");
  write_regret_csv(regret_out, report);
  auto trace_out = open_output(opts.out_dir, "trace.csv");
  write_trace_csv(trace_out, trace, opts.expose_demand);

  print_report(report);
  if (!report.final_intervals.empty()) {
    const auto& iv = report.final_intervals.front();
    std::cout << "replication 0 final interval: [" << iv[0] << ", " << iv[1] << "]\n";
  }
  std::cout << "wrote regret.csv and trace.csv to " << opts.out_dir << "\n";
  return 0;
}

int cmd_baseline(const CommonOptions& opts, double level) {
  const ExperimentConfig config = load_config(opts);
  std::vector<TraceRow> trace;
  const RegretReport report = run_baseline(config, level, &trace);

  auto regret_out = open_output(opts.out_dir, "regret.csv");
  write_regret_csv(regret_out, report);
  auto trace_out = open_output(opts.out_dir, "trace.csv");
  write_trace_csv(trace_out, trace, opts.expose_demand);

  // A standalone sample path at the same level, on its own named stream.
  const DemandModel model = config.demand.build();
  RngStream stream = RngStream(config.seed).fork("baseline-trajectory");
  const std::vector<CostRecord> records = simulate_base_stock(
      level, empty_state(config.lead_time), config.horizon, config.params, model, stream);
  auto traj_out = open_output(opts.out_dir, "trajectory.csv");
  write_trajectory_csv(traj_out, records, opts.expose_demand);

  std::cout << "baseline level: " << level << "\n";
  print_report(report);
  std::cout << "wrote regret.csv, trace.csv and trajectory.csv to " << opts.out_dir << "\n";
  return 0;
}

int cmd_oracle(const CommonOptions& opts) {
  const ExperimentConfig config = load_config(opts);
  const DemandModel model = config.demand.build();
  const OptimalBaseStock best =
      optimal_base_stock(model, config.lead_time, config.params, config.oracle_levels(),
                         config.oracle_method, ExactChainOptions{}, config.mc_options);
  auto out = open_output(opts.out_dir, "loss_curve.csv");
  write_loss_curve_csv(out, best.curve, config.params.penalty, model.mean());
  std::cout << "best level: " << best.level << "\n";
  std::cout << "loss at best level: " << best.loss << "\n";
  std::cout << "long-run true cost at best level: "
            << best.loss + config.params.penalty * model.mean() << "\n";
  std::cout << "wrote loss_curve.csv to " << opts.out_dir << "\n";
  return 0;
}

int cmd_verify(std::uint64_t seed, std::int64_t trials, double h_scale) {
  int failures = 0;
  auto report = [&failures](const SuiteResult& suite) {
    std::cout << (suite.passed() ? "pass" : "FAIL") << "  " << suite.name << ": "
              << suite.violations << " violations in " << suite.trials
              << " trials (worst margin " << suite.worst_margin << ")\n";
    if (!suite.passed()) ++failures;
  };

  report(check_dynamics_identity(100'000, seed));
  const CouplingResult coupling = check_coupling(trials, seed + 1);
  report(coupling.sales);
  report(coupling.inventory);
  report(coupling.cost_gap);
  report(check_level_lipschitz(trials, seed + 2));
  report(check_convexity(10, 21, 2.0, seed + 3));

  const CoverageResult coverage = check_ci_coverage(200, seed + 4, h_scale);
  const bool coverage_ok = coverage.coverage() >= 0.99;
  std::cout << (coverage_ok ? "pass" : "FAIL") << "  ci-coverage: " << coverage.covered << "/"
            << coverage.draws << " covered (widths " << coverage.min_width << " .. "
            << coverage.max_width << ")\n";
  if (!coverage_ok) ++failures;

  const EliminationSafetyResult safety = check_elimination_safety(200, seed + 5);
  const bool safety_ok = safety.optimum_lost == 0 && safety.epoch_budget_exceeded == 0 &&
                         safety.width_shrink_violations == 0 &&
                         safety.near_optimality_violations == 0;
  std::cout << (safety_ok ? "pass" : "FAIL") << "  elimination-safety: " << safety.optimum_lost
            << " optimum losses, " << safety.epoch_budget_exceeded << " epoch-budget breaches, "
            << safety.width_shrink_violations << " width violations, "
            << safety.near_optimality_violations << " near-optimality violations in "
            << safety.runs << " runs\n";
  if (!safety_ok) ++failures;

  std::cout << (failures == 0 ? "all suites passed" : "some suites FAILED") << "\n";
  return failures == 0 ? 0 : 1;
}

int cmd_depletion(const CommonOptions& opts, std::int64_t replications) {
  const ExperimentConfig config = load_config(opts);
  const DemandModel model = config.demand.build();
  const DepletionEstimate est =
      estimate_depletion_time(model, RngStream(config.seed).fork("depletion"), replications);
  std::cout << "mean periods for cumulative demand to reach one unit: " << est.value << " (se "
            << est.std_err << ", " << est.replications << " replications)\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and learning laboratory for lost-sales inventory control"};
  app.require_subcommand(1);

  CommonOptions run_opts;
  CLI::App* run = app.add_subcommand("run", "run the trisection learner experiment");
  attach_common(run, &run_opts);

  CommonOptions baseline_opts;
  double baseline_level = 0.0;
  CLI::App* baseline = app.add_subcommand("baseline", "run a fixed base-stock policy");
  attach_common(baseline, &baseline_opts);
  baseline->add_option("--level", baseline_level, "base-stock level to hold")->required();

  CommonOptions oracle_opts;
  CLI::App* oracle = app.add_subcommand("oracle", "evaluate the loss curve over the level grid");
  attach_common(oracle, &oracle_opts);

  std::uint64_t verify_seed = 20260819;
  std::int64_t verify_trials = 2000;
  double verify_h_scale = 0.01;
  CLI::App* verify = app.add_subcommand("verify-lemmas", "run the structural property suites");
  verify->add_option("--seed", verify_seed, "seed for the randomized suites");
  verify->add_option("--trials", verify_trials, "trials for the pathwise suites");
  verify->add_option("--h-scale", verify_h_scale,
                     "interval scale for the coverage suite (1 = analytical width)");

  CommonOptions depletion_opts;
  std::int64_t depletion_reps = 100'000;
  CLI::App* depletion =
      app.add_subcommand("depletion", "estimate the one-unit demand depletion time");
  attach_common(depletion, &depletion_opts);
  depletion->add_option("--depletion-replications", depletion_reps,
                        "replications for the depletion estimate");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return cmd_run(run_opts);
    if (baseline->parsed()) return cmd_baseline(baseline_opts, baseline_level);
    if (oracle->parsed()) return cmd_oracle(oracle_opts);
    if (verify->parsed()) return cmd_verify(verify_seed, verify_trials, verify_h_scale);
    if (depletion->parsed()) return cmd_depletion(depletion_opts, depletion_reps);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
