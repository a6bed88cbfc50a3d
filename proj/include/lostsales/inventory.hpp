#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

struct CostParams {
  double holding = 1.0;  ///< per-unit-per-period cost of stock carried over
  double penalty = 1.0;  ///< per-unit cost of lost sales

  void validate() const;  // both strictly positive
  double max_rate() const { return holding > penalty ? holding : penalty; }
};

/// Inventory state of a system with lead time L = outstanding.size().
///
/// Two readings of the same (L+1)-entry tuple are used:
///  - start-of-period view (what `step` consumes): on_hand is the leftover
///    inventory before today's arrival, outstanding[0] is the order arriving
///    today, outstanding[L-1] the most recent order still in flight;
///  - post-arrival view (what the recurrent process under a base-stock policy
///    walks on): on_hand is the inventory after arrival, outstanding holds the
///    orders placed in the last L periods, newest last.  Under base-stock
///    level x the post-arrival entries sum to exactly x once the pipeline has
///    filled, which is the conservation invariant tests lean on.
struct PipelineState {
  double on_hand = 0.0;
  std::vector<double> outstanding;

  int lead_time() const { return static_cast<int>(outstanding.size()); }
  std::vector<double> entries() const;  // on_hand followed by outstanding
  double sum() const;
};

PipelineState empty_state(int lead_time);

/// Post-arrival state (x, 0, ..., 0): everything on hand, nothing in flight.
PipelineState full_on_hand_state(double level, int lead_time);

/// What one period cost and what was observable about it.  `demand` is
/// simulator-private truth: policies learning from data must only see sales
/// and on_hand_pre_demand (demand is censored whenever it exceeds stock).
struct CostRecord {
  double true_cost = 0.0;    ///< holding * leftover + penalty * lost
  double pseudo_cost = 0.0;  ///< true_cost - penalty * demand, observable from sales alone
  double sales = 0.0;
  double on_hand_pre_demand = 0.0;
  double demand = 0.0;
};

/// Start-of-period inventory position: leftover stock plus everything on order.
double inventory_position(const PipelineState& state);

/// Order quantity that brings the position up to `level`, clipped at zero.
/// Evaluated before today's arrival; recomputing the exact shortfall each
/// period (rather than accumulating) is what keeps the post-order position
/// pinned to `level` without floating-point drift.
double base_stock_order(const PipelineState& state, double level);

/// One period: today's arrival joins on-hand stock, demand is served from it,
/// unmet demand is lost, and `new_order` enters the back of the pipeline.
/// `state` is the start-of-period view.
std::pair<PipelineState, CostRecord> step(const PipelineState& state, double new_order,
                                          double demand, const CostParams& params);

/// Drives the base-stock-`level` process.  `start` is either the empty system
/// (all entries zero) or a post-arrival state whose entries sum to `level`
/// within 1e-9.  From the empty system the post-arrival on-hand stays at zero
/// for the first L periods and hits exactly (level, 0, ..., 0) at period L+1.
class BaseStockSimulator {
 public:
  BaseStockSimulator(double level, const PipelineState& start, const CostParams& params);

  /// Advance one period with the given demand realization.
  CostRecord advance(double demand);

  double level() const { return level_; }
  int lead_time() const { return lead_time_; }

  /// Start-of-period view for the upcoming period.
  const PipelineState& pre_state() const { return pre_; }

  /// Post-arrival tuple of the most recent period (valid after advance()).
  const std::vector<double>& last_post_arrival() const { return last_post_; }

 private:
  double level_;
  int lead_time_;
  CostParams params_;
  PipelineState pre_;
  std::vector<double> last_post_;
};

/// Trajectory of length `horizon` under base-stock `level`, demands drawn
/// from `model` via `rng`.
std::vector<CostRecord> simulate_base_stock(double level, const PipelineState& start,
                                            std::int64_t horizon, const CostParams& params,
                                            const DemandModel& model, RngStream& rng);

/// Same, with a caller-supplied demand sequence (for coupled runs).
std::vector<CostRecord> simulate_base_stock(double level, const PipelineState& start,
                                            const std::vector<double>& demands,
                                            const CostParams& params);

}  // namespace lostsales
