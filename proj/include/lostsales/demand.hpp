#pragma once

#include <cstdint>
#include <vector>

#include "lostsales/rng.hpp"

namespace lostsales {

enum class DemandKind { OnGrid, ScaledBernoulli, TruncatedGeometric };

/// Finite-support demand distribution on a nonnegative grid.
///
/// All families are bounded and discrete; weights sum to one within 1e-12.
/// The mass at zero matters downstream: the long-run loss is convex in the
/// base-stock level only when the distribution puts positive mass at zero.
class DemandModel {
 public:
  /// Arbitrary atoms: strictly increasing nonnegative support, weights >= 0
  /// summing to 1 within 1e-12.  Atoms with zero weight are dropped.
  static DemandModel on_grid(std::vector<double> support, std::vector<double> weights);

  /// Mass q0 at zero and 1-q0 at b > 0.
  static DemandModel scaled_bernoulli(double q0, double b);

  /// Weights proportional to decay^j on {0, step, 2*step, ..., K*step} where
  /// K = floor(support_max / step); normalized.
  static DemandModel truncated_geometric(double decay, double step, double support_max);

  DemandKind kind() const { return kind_; }
  double mean() const { return mean_; }
  double mass_at_zero() const { return mass_at_zero_; }
  double support_max() const { return support_.back(); }
  const std::vector<double>& support() const { return support_; }
  const std::vector<double>& weights() const { return weights_; }

  /// P(demand <= v).
  double cdf(double v) const;

  /// One draw; the returned value is always an element of support().
  /// Inverse-CDF over the stored cumulative weights, so a given stream state
  /// maps to the same atom on every platform.
  double sample(RngStream& rng) const;

 private:
  DemandModel(DemandKind kind, std::vector<double> support, std::vector<double> weights);

  DemandKind kind_;
  std::vector<double> support_;
  std::vector<double> weights_;
  std::vector<double> cumulative_;
  double mean_ = 0.0;
  double mass_at_zero_ = 0.0;
};

struct DepletionEstimate {
  double value = 0.0;    ///< Mean number of draws until the running demand sum reaches 1.
  double std_err = 0.0;  ///< Across-replication standard error of that mean.
  std::int64_t replications = 0;
};

/// Monte-Carlo estimate of the expected time for cumulative demand to reach
/// one unit: mean over replications of min{n : d_1 + ... + d_n >= 1}.
///
/// Each replication draws from its own stream forked by index, so the result
/// is invariant under replication order.  Requires model.mean() > 0; throws if
/// any replication exceeds `step_cap` draws (the model is then indistinguishable
/// from one with zero mean at this cap).
DepletionEstimate estimate_depletion_time(const DemandModel& model, const RngStream& base,
                                          std::int64_t replications,
                                          std::int64_t step_cap = 10'000'000);

}  // namespace lostsales
