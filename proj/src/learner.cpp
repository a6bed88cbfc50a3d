#include "lostsales/learner.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace lostsales {

void LearnerConfig::validate() const {
  params.validate();
  if (!(level_max > 0.0) || !std::isfinite(level_max)) {
    throw std::invalid_argument("level_max must be positive and finite");
  }
  if (lead_time < 0) throw std::invalid_argument("lead time must be nonnegative");
  if (horizon < 1) throw std::invalid_argument("horizon must be at least one period");
  if (!(ci_scale > 0.0) || !std::isfinite(ci_scale)) {
    throw std::invalid_argument("ci_scale must be positive and finite");
  }
}

double LearnerConfig::ci_constant() const {
  return ci_scale * 576.0 * params.max_rate() * static_cast<double>(lead_time + 1) * level_max;
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Drain: return "drain";
    case Phase::PlayLeft: return "play_left";
    case Phase::PlayCenter: return "play_center";
    case Phase::PlayRight: return "play_right";
  }
  return "?";
}

const char* to_string(CutDecision decision) {
  switch (decision) {
    case CutDecision::CutLeft: return "cut_left";
    case CutDecision::CutRight: return "cut_right";
    case CutDecision::Continue: return "continue";
  }
  return "?";
}

ConfidenceInterval confidence_interval(const std::vector<double>& costs, double gamma,
                                       double ci_constant) {
  if (costs.empty()) throw std::invalid_argument("confidence interval needs at least one cost");
  double mean = 0.0;
  for (double c : costs) mean += c;
  mean /= static_cast<double>(costs.size());
  const double half = 0.5 * ci_constant * gamma;
  return {mean - half, mean + half};
}

CutDecision elimination_test(double lb_l, double ub_l, [[maybe_unused]] double lb_c, double ub_c,
                             double lb_r, double ub_r, double h_gamma) {
  const double worst_outer = std::max(lb_l, lb_r);
  const double best_upper = std::min({ub_l, ub_c, ub_r});
  if (worst_outer >= best_upper + h_gamma) {
    return lb_l >= lb_r ? CutDecision::CutLeft : CutDecision::CutRight;
  }
  return CutDecision::Continue;
}

TrisectionLearner::TrisectionLearner(const LearnerConfig& config) : config_(config) {
  config_.validate();
  interval_low_ = 0.0;
  interval_high_ = config_.level_max;
  begin_epoch();
  begin_round();
}

void TrisectionLearner::begin_epoch() {
  const double width = interval_high_ - interval_low_;
  probe_low_ = interval_low_ + 0.25 * width;
  probe_mid_ = interval_low_ + 0.50 * width;
  probe_high_ = interval_low_ + 0.75 * width;
  round_ = 0;
}

void TrisectionLearner::begin_round() {
  ++round_;
  gamma_ = std::ldexp(1.0, -round_);
  const double need = std::ceil(std::log(static_cast<double>(config_.horizon)) / (gamma_ * gamma_));
  // More samples than the horizon can never complete; clamping also keeps the
  // cast safe at deep rounds where 1/gamma^2 explodes.
  const double capped = std::min(need, static_cast<double>(config_.horizon));
  samples_per_probe_ = std::max<std::int64_t>(1, static_cast<std::int64_t>(capped));
  costs_left_.clear();
  costs_center_.clear();
  costs_right_.clear();
  phase_ = Phase::Drain;
}

double TrisectionLearner::active_level() const {
  switch (phase_) {
    case Phase::Drain:
    case Phase::PlayLeft:
      return probe_low_;
    case Phase::PlayCenter:
      return probe_mid_;
    case Phase::PlayRight:
      return probe_high_;
  }
  return probe_low_;
}

std::vector<double>& TrisectionLearner::active_buffer() {
  switch (phase_) {
    case Phase::PlayLeft:
      return costs_left_;
    case Phase::PlayCenter:
      return costs_center_;
    case Phase::PlayRight:
      return costs_right_;
    case Phase::Drain:
      break;
  }
  throw std::logic_error("no active cost buffer while draining");
}

double TrisectionLearner::next_order(const Observation& observation) {
  if (steps_used_ >= config_.horizon) {
    throw std::runtime_error("trisection learner: learning horizon exhausted");
  }
  last_round_summary_.reset();

  double position = observation.leftover_inventory;
  for (double o : pipeline_) position += o;

  if (phase_ == Phase::Drain) {
    const double drain_tol = 1e-9 * (1.0 + config_.level_max);
    if (position <= probe_low_ + drain_tol) {
      phase_ = Phase::PlayLeft;
    }
  }

  double order = 0.0;
  if (phase_ != Phase::Drain) {
    const double target = active_level();
    order = target > position ? target - position : 0.0;
    expecting_record_ = true;
  }

  pipeline_.push_back(order);
  while (pipeline_.size() > static_cast<std::size_t>(config_.lead_time)) {
    pipeline_.pop_front();
  }
  ++steps_used_;
  return order;
}

void TrisectionLearner::record_cost(double sales, double on_hand_pre_demand) {
  if (!expecting_record_) {
    throw std::logic_error("record_cost without a pending play-phase order");
  }
  expecting_record_ = false;

  const double cost =
      config_.params.holding * (on_hand_pre_demand - sales) - config_.params.penalty * sales;
  std::vector<double>& buffer = active_buffer();
  buffer.push_back(cost);
  if (static_cast<std::int64_t>(buffer.size()) < samples_per_probe_) return;

  switch (phase_) {
    case Phase::PlayLeft:
      phase_ = Phase::PlayCenter;
      break;
    case Phase::PlayCenter:
      phase_ = Phase::PlayRight;
      break;
    case Phase::PlayRight:
      close_round();
      break;
    case Phase::Drain:
      break;  // unreachable: record_cost rejects drain periods above
  }
}

void TrisectionLearner::close_round() {
  const double h = config_.ci_constant();
  RoundSummary summary;
  summary.epoch = epoch_;
  summary.round = round_;
  summary.gamma = gamma_;
  summary.samples_per_probe = samples_per_probe_;
  summary.left = confidence_interval(costs_left_, gamma_, h);
  summary.center = confidence_interval(costs_center_, gamma_, h);
  summary.right = confidence_interval(costs_right_, gamma_, h);
  summary.decision =
      elimination_test(summary.left.lower, summary.left.upper, summary.center.lower,
                       summary.center.upper, summary.right.lower, summary.right.upper, h * gamma_);

  if (summary.decision == CutDecision::Continue) {
    begin_round();
  } else {
    if (summary.decision == CutDecision::CutLeft) {
      interval_low_ = probe_low_;
    } else {
      interval_high_ = probe_high_;
    }
    ++epoch_;
    if (config_.ci_scale >= 1.0) {
      // At full-width intervals each cut is provably safe and shrinks the
      // interval by a quarter, which bounds how many cuts the horizon allows.
      const double cap =
          std::ceil(std::log(static_cast<double>(config_.horizon)) / std::log(4.0 / 3.0));
      if (static_cast<double>(epoch_) > std::max(1.0, cap)) {
        throw std::logic_error("trisection learner: epoch count exceeded its analytical bound");
      }
    }
    begin_epoch();
    begin_round();
  }

  summary.interval_low = interval_low_;
  summary.interval_high = interval_high_;
  last_round_summary_ = summary;
}

}  // namespace lostsales
