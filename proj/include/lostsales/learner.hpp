#pragma once

#include <array>
#include <cstdint>
#include <deque>
#include <optional>
#include <vector>

#include "lostsales/inventory.hpp"

namespace lostsales {

struct LearnerConfig {
  double level_max = 1.0;      ///< upper end of the candidate base-stock range
  int lead_time = 0;
  std::int64_t horizon = 1;    ///< total number of orders the learner may place
  CostParams params;
  double ci_scale = 1.0;       ///< multiplier on the confidence-interval constant

  void validate() const;

  /// Half-width constant of the per-round confidence intervals:
  /// ci_scale * 576 * max(holding, penalty) * (lead_time + 1) * level_max.
  /// At ci_scale = 1 the analytical coverage and epoch-count guarantees hold;
  /// smaller values trade guaranteed coverage for eliminations that actually
  /// trigger at practical horizons.
  double ci_constant() const;
};

enum class Phase { Drain, PlayLeft, PlayCenter, PlayRight };
enum class CutDecision { CutLeft, CutRight, Continue };

const char* to_string(Phase phase);
const char* to_string(CutDecision decision);

struct ConfidenceInterval {
  double lower = 0.0;
  double upper = 0.0;
};

/// Interval of total width ci_constant * gamma centered on the sample mean.
ConfidenceInterval confidence_interval(const std::vector<double>& costs, double gamma,
                                       double ci_constant);

/// Decide whether a quarter of the working interval can be discarded.
/// Cuts require max(lb_l, lb_r) >= min(ub_l, ub_c, ub_r) + h_gamma, i.e. the
/// worse-looking outer probe is separated even after slack h_gamma; the side
/// with the larger lower bound loses, ties cut left.
CutDecision elimination_test(double lb_l, double ub_l, double lb_c, double ub_c, double lb_r,
                             double ub_r, double h_gamma);

/// Everything the learner is allowed to see at the start of a period.
/// Deliberately excludes demand: lost sales are censored, so the only
/// feedback is leftover stock (sales and pre-demand stock arrive separately
/// through record_cost).
struct Observation {
  double leftover_inventory = 0.0;
};

/// Diagnostics emitted when a round of probing closes.
struct RoundSummary {
  int epoch = 0;
  int round = 0;
  double gamma = 0.0;
  std::int64_t samples_per_probe = 0;
  ConfidenceInterval left, center, right;
  CutDecision decision = CutDecision::Continue;
  double interval_low = 0.0;   ///< working interval after the decision
  double interval_high = 0.0;
};

/// Trisection learner for the best base-stock level on [0, level_max].
///
/// Keeps a working interval, probes its three interior quartile points with a
/// base-stock policy for N = ceil(ln(horizon)/gamma^2) periods each (gamma
/// halves every round), and discards the left or right quarter once the
/// confidence intervals separate.  Between probes it orders nothing until the
/// inventory position falls to the lowest probe, so each probe's samples come
/// from that probe's own recurrent process.  Drain periods cost money but are
/// never buffered; the first period of each probe (the order-up step) is.
class TrisectionLearner {
 public:
  explicit TrisectionLearner(const LearnerConfig& config);

  /// Order for the current period.  Zero while draining; otherwise the
  /// base-stock order for the active probe level.  Throws once the configured
  /// horizon is exhausted.
  double next_order(const Observation& observation);

  /// Feed back what the ordered-up period did.  Appends
  /// holding*(on_hand - sales) - penalty*sales to the active probe's buffer;
  /// must only be called for periods ordered in a play phase.
  void record_cost(double sales, double on_hand_pre_demand);

  const LearnerConfig& config() const { return config_; }
  Phase phase() const { return phase_; }
  int epoch() const { return epoch_; }
  int round() const { return round_; }
  double gamma() const { return gamma_; }
  std::int64_t samples_per_probe() const { return samples_per_probe_; }
  std::int64_t steps_used() const { return steps_used_; }
  double interval_low() const { return interval_low_; }
  double interval_high() const { return interval_high_; }
  /// Probe levels {low, mid, high} = interval quartiles.
  std::array<double, 3> probe_levels() const { return {probe_low_, probe_mid_, probe_high_}; }
  /// Level the active play phase orders up to (probe_low_ while draining,
  /// since that is where the drain is headed).
  double active_level() const;

  /// Set when the most recent record_cost closed a round; cleared by the next
  /// next_order call.
  const std::optional<RoundSummary>& last_round_summary() const { return last_round_summary_; }

 private:
  void begin_epoch();
  void begin_round();
  void close_round();
  std::vector<double>& active_buffer();

  LearnerConfig config_;
  double interval_low_ = 0.0;
  double interval_high_ = 0.0;
  double probe_low_ = 0.0, probe_mid_ = 0.0, probe_high_ = 0.0;
  int epoch_ = 1;
  int round_ = 0;
  double gamma_ = 0.5;
  std::int64_t samples_per_probe_ = 1;
  Phase phase_ = Phase::Drain;
  std::int64_t steps_used_ = 0;
  std::deque<double> pipeline_;  ///< the learner's own last L orders, oldest first
  std::vector<double> costs_left_, costs_center_, costs_right_;
  std::optional<RoundSummary> last_round_summary_;
  bool expecting_record_ = false;  ///< a play order is awaiting its record_cost
};

}  // namespace lostsales
