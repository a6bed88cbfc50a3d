#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "lostsales/demand.hpp"
#include "lostsales/inventory.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

enum class LossMethod { ExactChain, MonteCarlo };

/// Long-run average pseudo-cost of a base-stock policy at one level.
struct LossEstimate {
  double level = 0.0;
  double loss = 0.0;     ///< estimate of the stationary mean pseudo-cost
  double std_err = 0.0;  ///< 0 for the exact chain; sampling error for Monte Carlo
  LossMethod method = LossMethod::ExactChain;
};

struct ExactChainOptions {
  /// Common grid step of level and demand support; 0 means infer it
  /// (approximate GCD of the level and all support atoms).
  double grid_step = 0.0;
  std::size_t state_cap = 200'000;  ///< abort if more states are reachable
  double tv_tol = 1e-12;            ///< stop when successive iterates move less than this in TV
  std::int64_t max_iterations = 5'000'000;
};

/// Exact stationary mean pseudo-cost of the base-stock chain at `level`.
///
/// Enumerates every post-arrival state reachable from (level, 0, ..., 0) —
/// finite because level and all demand atoms must sit on a common grid, which
/// is validated up front rather than silently rounded — then resolves the
/// stationary distribution by power iteration.  Iteration runs on the
/// half-lazy operator (P + I)/2, which has the same stationary distribution
/// but cannot cycle on periodic chains.  Throws if the level or an atom is off
/// the grid, if the state cap is exceeded, or if the reachable graph splits
/// into more than one closed communicating class (no single long-run average
/// exists to report).
LossEstimate exact_loss(double level, const DemandModel& model, int lead_time,
                        const CostParams& params, const ExactChainOptions& options = {});

/// Monte-Carlo estimate of the same quantity: mean over replications of the
/// time-averaged pseudo-cost on (burn_in, horizon].  Requires
/// horizon > burn_in >= lead_time + 1, replications >= 2.  `start` defaults to
/// (level, 0, ..., 0); any state with entries summing to `level` works.
LossEstimate mc_loss(double level, const DemandModel& model, int lead_time,
                     const CostParams& params, std::int64_t horizon, std::int64_t burn_in,
                     int replications, const RngStream& base,
                     const std::optional<PipelineState>& start = std::nullopt);

/// Long-run average true cost implied by a loss estimate:
/// loss + penalty * mean_demand.
double lambda_from_loss(const LossEstimate& estimate, double penalty, double mean_demand);

struct OptimalBaseStock {
  double level = 0.0;
  double loss = 0.0;
  std::vector<LossEstimate> curve;  ///< every evaluated grid point, in grid order
};

struct McLossOptions {
  std::int64_t horizon = 20'000;
  std::int64_t burn_in = 500;
  int replications = 16;
  std::uint64_t seed = 0;
};

/// Minimize the loss over a sorted grid of candidate levels.  The default is
/// an exhaustive scan (the ground truth for tests); `use_ternary` switches to
/// a discrete ternary search that assumes the loss curve is convex in the
/// level and evaluates far fewer points.  Ties resolve to the smallest level.
OptimalBaseStock optimal_base_stock(const DemandModel& model, int lead_time,
                                    const CostParams& params, const std::vector<double>& grid,
                                    LossMethod method = LossMethod::ExactChain,
                                    const ExactChainOptions& exact_options = {},
                                    const McLossOptions& mc_options = {},
                                    bool use_ternary = false);

/// Single-sign-change dominance between two equal-sum post-arrival states:
/// true iff every entry of s_prime - s is nonnegative up to some index and
/// nonpositive after it.  States comparable this way stay pathwise close under
/// a shared demand sequence.  Throws if the entry sums differ by more than 1e-9.
bool dominates(const PipelineState& s_prime, const PipelineState& s);

struct CoupledDiff {
  double delta_sales = 0.0;        ///< total sales from s_prime minus total sales from s
  double delta_inventory = 0.0;    ///< total post-arrival on-hand difference, s minus s_prime
  double max_abs_cost_gap = 0.0;   ///< max over prefixes of |accumulated pseudo-cost gap|
};

/// Run base-stock `level` from both start states against one shared demand
/// sequence of length `horizon` and report how far the trajectories drift.
/// Both starts must have entries summing to `level`.
CoupledDiff coupled_diff(const PipelineState& s, const PipelineState& s_prime, double level,
                         const DemandModel& model, const CostParams& params,
                         std::int64_t horizon, const RngStream& base);

/// Monte-Carlo mean of the cumulative pseudo-cost over `horizon` periods from
/// a given start (a finite-horizon value diagnostic; differences between
/// starts stay bounded in the horizon).
double finite_horizon_value(double level, const PipelineState& start, std::int64_t horizon,
                            const DemandModel& model, const CostParams& params,
                            int replications, const RngStream& base);

}  // namespace lostsales
