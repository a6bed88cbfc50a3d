#include "lostsales/demand.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace lostsales {

namespace {

constexpr double kWeightTol = 1e-12;

void require(bool condition, const char* message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace

DemandModel::DemandModel(DemandKind kind, std::vector<double> support,
                         std::vector<double> weights)
    : kind_(kind), support_(std::move(support)), weights_(std::move(weights)) {
  require(!support_.empty(), "demand model needs at least one atom");
  require(support_.size() == weights_.size(), "support/weights size mismatch");
  for (std::size_t i = 0; i < support_.size(); ++i) {
    require(std::isfinite(support_[i]) && support_[i] >= 0.0,
            "demand atoms must be finite and nonnegative");
    require(i == 0 || support_[i] > support_[i - 1], "demand atoms must be strictly increasing");
    require(std::isfinite(weights_[i]) && weights_[i] >= 0.0,
            "demand weights must be finite and nonnegative");
  }

  // Zero-weight atoms never occur; keep the support equal to what can be drawn.
  std::vector<double> s, w;
  s.reserve(support_.size());
  w.reserve(weights_.size());
  for (std::size_t i = 0; i < support_.size(); ++i) {
    if (weights_[i] > 0.0) {
      s.push_back(support_[i]);
      w.push_back(weights_[i]);
    }
  }
  require(!s.empty(), "demand model needs at least one atom with positive weight");
  support_ = std::move(s);
  weights_ = std::move(w);

  const double total = std::accumulate(weights_.begin(), weights_.end(), 0.0);
  require(std::abs(total - 1.0) <= kWeightTol, "demand weights must sum to 1 within 1e-12");

  mean_ = 0.0;
  for (std::size_t i = 0; i < support_.size(); ++i) mean_ += weights_[i] * support_[i];
  mass_at_zero_ = (support_.front() == 0.0) ? weights_.front() : 0.0;

  cumulative_.resize(weights_.size());
  double acc = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    acc += weights_[i];
    cumulative_[i] = acc;
  }
  cumulative_.back() = 1.0;  // guard against accumulated rounding at the top
}

DemandModel DemandModel::on_grid(std::vector<double> support, std::vector<double> weights) {
  return DemandModel(DemandKind::OnGrid, std::move(support), std::move(weights));
}

DemandModel DemandModel::scaled_bernoulli(double q0, double b) {
  require(q0 >= 0.0 && q0 <= 1.0, "scaled-bernoulli mass at zero must lie in [0, 1]");
  require(std::isfinite(b) && b > 0.0, "scaled-bernoulli atom must be positive");
  return DemandModel(DemandKind::ScaledBernoulli, {0.0, b}, {q0, 1.0 - q0});
}

DemandModel DemandModel::truncated_geometric(double decay, double step, double support_max) {
  require(decay > 0.0 && decay < 1.0, "geometric decay must lie in (0, 1)");
  require(std::isfinite(step) && step > 0.0, "grid step must be positive");
  require(std::isfinite(support_max) && support_max >= 0.0, "support max must be nonnegative");
  const auto atoms = static_cast<std::size_t>(std::floor(support_max / step + 1e-9)) + 1;
  std::vector<double> support(atoms), weights(atoms);
  double w = 1.0, total = 0.0;
  for (std::size_t j = 0; j < atoms; ++j) {
    support[j] = static_cast<double>(j) * step;
    weights[j] = w;
    total += w;
    w *= decay;
  }
  for (auto& wj : weights) wj /= total;
  // Force the normalization residue into the largest weight so the sum is
  // exactly 1 at double precision.
  double sum = std::accumulate(weights.begin(), weights.end(), 0.0);
  weights[0] += 1.0 - sum;
  return DemandModel(DemandKind::TruncatedGeometric, std::move(support), std::move(weights));
}

double DemandModel::cdf(double v) const {
  double acc = 0.0;
  for (std::size_t i = 0; i < support_.size() && support_[i] <= v; ++i) acc += weights_[i];
  return acc;
}

double DemandModel::sample(RngStream& rng) const {
  const double u = rng.next_unit();
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  const auto idx = static_cast<std::size_t>(it - cumulative_.begin());
  return support_[idx < support_.size() ? idx : support_.size() - 1];
}

DepletionEstimate estimate_depletion_time(const DemandModel& model, const RngStream& base,
                                          std::int64_t replications, std::int64_t step_cap) {
  if (replications < 1) throw std::invalid_argument("depletion estimate needs >= 1 replication");
  if (model.mean() <= 0.0)
    throw std::invalid_argument("depletion time is infinite for zero-mean demand");

  double sum = 0.0, sum_sq = 0.0;
  for (std::int64_t r = 0; r < replications; ++r) {
    RngStream stream = base.fork(static_cast<std::uint64_t>(r));
    double cumulative = 0.0;
    std::int64_t draws = 0;
    while (cumulative < 1.0) {
      cumulative += model.sample(stream);
      if (++draws > step_cap)
        throw std::runtime_error("depletion run exceeded " + std::to_string(step_cap) +
                                 " draws; demand mean is effectively zero");
    }
    const auto tau = static_cast<double>(draws);
    sum += tau;
    sum_sq += tau * tau;
  }

  DepletionEstimate result;
  result.replications = replications;
  const auto n = static_cast<double>(replications);
  result.value = sum / n;
  if (replications >= 2) {
    const double var = std::max(0.0, (sum_sq - n * result.value * result.value) / (n - 1.0));
    result.std_err = std::sqrt(var / n);
  }
  return result;
}

}  // namespace lostsales
