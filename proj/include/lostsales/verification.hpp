#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace lostsales {

/// Property suites shared by the `verify-lemmas` CLI command and the
/// acceptance tests.  Each suite draws randomized instances from a seeded
/// stream, checks a structural bound pathwise, and reports how often it was
/// violated (with floating-point slack of about 1e-9 relative).

struct SuiteResult {
  std::string name;
  std::int64_t trials = 0;
  std::int64_t violations = 0;
  double worst_margin = 0.0;  ///< most negative slack seen (0 if never close)
  bool passed() const { return violations == 0; }
};

/// Per-period identity pseudo = true - penalty*demand (bit-exact) and, on
/// trajectories started inside the recurrent set, conservation of the
/// post-arrival entry sum.  `steps` periods split over random instances.
SuiteResult check_dynamics_identity(std::int64_t steps, std::uint64_t seed);

/// Coupled trajectories from comparable starts (single-sign-change dominance):
/// |total sales gap| <= 3x and |total on-hand gap| <= 6Lx at every prefix.
/// Also checks the implied prefix pseudo-cost gap bound
/// 6*holding*L*x + 3*(holding+penalty)*x.  Random L <= max_lead_time,
/// x <= max_level, prefix lengths <= max_horizon.
struct CouplingResult {
  SuiteResult sales;
  SuiteResult inventory;
  SuiteResult cost_gap;
};
CouplingResult check_coupling(std::int64_t trials, std::uint64_t seed, int max_lead_time = 6,
                              double max_level = 10.0, std::int64_t max_horizon = 2000);

/// Neighbor levels x and x+delta on one demand sequence: per-period pseudo-cost
/// difference within max(holding, penalty)*delta, and entrywise domination of
/// the larger level's states.
SuiteResult check_level_lipschitz(std::int64_t trials, std::uint64_t seed);

/// Second differences of the exact loss curve on an evenly spaced grid are
/// >= -1e-9 for randomized demand models with positive mass at zero.
SuiteResult check_convexity(int models, int grid_points, double level_max, std::uint64_t seed);

/// Confidence intervals built from simulated probe costs cover the exact loss.
/// Returns coverage over `draws` random (instance, level, round) draws.
struct CoverageResult {
  std::int64_t draws = 0;
  std::int64_t covered = 0;
  double min_width = 0.0;   ///< narrowest interval seen
  double max_width = 0.0;
  double coverage() const { return draws == 0 ? 1.0 : static_cast<double>(covered) / draws; }
};
CoverageResult check_ci_coverage(std::int64_t draws, std::uint64_t seed, double ci_scale,
                                 std::int64_t horizon_for_n = 10'000, int max_round = 4);

/// Drive the elimination rule with intervals that are guaranteed to cover the
/// true loss values (coverage event injected by construction) on randomized
/// convex loss curves, and count how often the optimum is ever cut away —
/// must be zero — plus how often the epoch budget log_{4/3}(T) is exceeded.
struct EliminationSafetyResult {
  std::int64_t runs = 0;
  std::int64_t optimum_lost = 0;
  std::int64_t epoch_budget_exceeded = 0;
  std::int64_t width_shrink_violations = 0;
  std::int64_t near_optimality_violations = 0;  ///< Continue round with a probe worse than 12*H*gamma
};
EliminationSafetyResult check_elimination_safety(std::int64_t runs, std::uint64_t seed);

}  // namespace lostsales
