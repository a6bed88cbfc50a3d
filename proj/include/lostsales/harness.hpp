#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "lostsales/config.hpp"
#include "lostsales/learner.hpp"

namespace lostsales {

/// Aggregated regret at one checkpoint, across replications.
struct CheckpointRow {
  std::int64_t step = 0;
  double mean_regret_true = 0.0;    ///< cumulative true cost minus step * lambda_star
  double se_regret_true = 0.0;
  double mean_regret_pseudo = 0.0;  ///< cumulative pseudo cost minus step * loss_star
  double se_regret_pseudo = 0.0;
  double mean_regret_pathwise = 0.0;  ///< vs. the optimal level replayed on the same demands
  double se_regret_pathwise = 0.0;
  double mean_regret_drain = 0.0;   ///< pseudo regret accumulated in drain periods
  double mean_regret_play = 0.0;    ///< pseudo regret accumulated in play periods
};

struct RegretReport {
  double oracle_level = 0.0;   ///< best base-stock level on the oracle grid
  double oracle_loss = 0.0;    ///< its long-run pseudo-cost
  double oracle_lambda = 0.0;  ///< its long-run true cost
  int replications = 0;
  std::vector<CheckpointRow> checkpoints;
  std::vector<std::array<double, 2>> final_intervals;  ///< learner's [low, high] per replication
  std::vector<int> epochs_per_replication;
  std::int64_t total_rounds_started = 0;
  std::int64_t total_drain_steps = 0;

  double mean_drain_steps_per_round() const {
    return total_rounds_started == 0
               ? 0.0
               : static_cast<double>(total_drain_steps) / static_cast<double>(total_rounds_started);
  }
};

/// One period of a trajectory, for CSV export.
struct TraceRow {
  std::int64_t step = 0;
  Phase phase = Phase::Drain;
  int epoch = 0;
  int round = 0;
  double probe_level = 0.0;  ///< active probe (the drain target while draining)
  double order = 0.0;
  double pseudo_cost = 0.0;
  double demand = 0.0;  ///< exported only on request
  std::optional<RoundSummary> round_closed;
};

/// Run the trisection learner against the configured environment for
/// `config.horizon` periods per replication.  Replications run on a small
/// thread pool with per-replication RNG streams forked by index, so reports
/// are bit-identical regardless of scheduling.  A shadow run of the oracle
/// level replays each replication's exact demand sequence to price the
/// pathwise benchmark.  If `trace` is non-null it receives replication 0's
/// period-by-period trail.
RegretReport run_experiment(const ExperimentConfig& config,
                            std::vector<TraceRow>* trace = nullptr);

/// Same accounting for a fixed base-stock level from the empty system
/// (every period counts as play).
RegretReport run_baseline(const ExperimentConfig& config, double level,
                          std::vector<TraceRow>* trace = nullptr);

void write_regret_csv(std::ostream& out, const RegretReport& report);
void write_loss_curve_csv(std::ostream& out, const std::vector<LossEstimate>& curve,
                          double penalty, double mean_demand);
void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, bool expose_demand);
/// Baseline trajectory export: step, on_hand_pre_demand, sales, true_cost,
/// pseudo_cost (+ demand when exposed).
void write_trajectory_csv(std::ostream& out, const std::vector<CostRecord>& records,
                          bool expose_demand);

}  // namespace lostsales
