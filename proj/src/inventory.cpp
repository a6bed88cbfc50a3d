#include "lostsales/inventory.hpp"

#include <cmath>
#include <stdexcept>

namespace lostsales {

namespace {
constexpr double kSumTol = 1e-9;
}

void CostParams::validate() const {
  if (!(holding > 0.0) || !std::isfinite(holding))
    throw std::invalid_argument("holding cost must be positive");
  if (!(penalty > 0.0) || !std::isfinite(penalty))
    throw std::invalid_argument("lost-sales penalty must be positive");
}

std::vector<double> PipelineState::entries() const {
  std::vector<double> all;
  all.reserve(outstanding.size() + 1);
  all.push_back(on_hand);
  all.insert(all.end(), outstanding.begin(), outstanding.end());
  return all;
}

double PipelineState::sum() const {
  double total = on_hand;
  for (double o : outstanding) total += o;
  return total;
}

PipelineState empty_state(int lead_time) {
  if (lead_time < 0) throw std::invalid_argument("lead time must be nonnegative");
  PipelineState s;
  s.outstanding.assign(static_cast<std::size_t>(lead_time), 0.0);
  return s;
}

PipelineState full_on_hand_state(double level, int lead_time) {
  if (level < 0.0) throw std::invalid_argument("base-stock level must be nonnegative");
  PipelineState s = empty_state(lead_time);
  s.on_hand = level;
  return s;
}

double inventory_position(const PipelineState& state) { return state.sum(); }

double base_stock_order(const PipelineState& state, double level) {
  const double shortfall = level - inventory_position(state);
  return shortfall > 0.0 ? shortfall : 0.0;
}

std::pair<PipelineState, CostRecord> step(const PipelineState& state, double new_order,
                                          double demand, const CostParams& params) {
  if (new_order < 0.0) throw std::invalid_argument("orders must be nonnegative");
  if (demand < 0.0) throw std::invalid_argument("demand must be nonnegative");

  // With zero lead time the order placed this period is also the one arriving.
  const bool instant = state.outstanding.empty();
  const double arriving = instant ? new_order : state.outstanding.front();
  const double stocked = state.on_hand + arriving;
  const double sales = stocked < demand ? stocked : demand;
  const double leftover = stocked - sales;  // exact: equals (stocked - demand)^+
  const double lost = demand - sales;

  CostRecord rec;
  rec.on_hand_pre_demand = stocked;
  rec.sales = sales;
  rec.demand = demand;
  rec.true_cost = params.holding * leftover + params.penalty * lost;
  // Defined as the demand-shifted true cost so the identity
  // pseudo == true - penalty*demand holds bit-for-bit in every branch.
  rec.pseudo_cost = rec.true_cost - params.penalty * demand;

  PipelineState next;
  next.on_hand = leftover;
  if (!instant) {
    next.outstanding.assign(state.outstanding.begin() + 1, state.outstanding.end());
    next.outstanding.push_back(new_order);
  }
  return {std::move(next), rec};
}

BaseStockSimulator::BaseStockSimulator(double level, const PipelineState& start,
                                       const CostParams& params)
    : level_(level), lead_time_(start.lead_time()), params_(params) {
  params_.validate();
  if (level < 0.0) throw std::invalid_argument("base-stock level must be nonnegative");
  for (double e : start.entries())
    if (e < -kSumTol) throw std::invalid_argument("state entries must be nonnegative");

  const double total = start.sum();
  const double scale = 1.0 + std::abs(level);
  if (std::abs(total) <= kSumTol * scale) {
    // Empty system: nothing on hand, nothing in flight.
    pre_ = empty_state(lead_time_);
  } else if (std::abs(total - level) <= kSumTol * scale) {
    // Post-arrival tuple (s0, s1, ..., sL).  Its start-of-period equivalent
    // carries s0 as already-arrived stock, shifts s1..s_{L-1} one slot later,
    // and drops sL: the base-stock policy re-places exactly that order on the
    // first advance (position is level - sL), so nothing is lost.
    pre_.on_hand = start.on_hand;
    pre_.outstanding.assign(static_cast<std::size_t>(lead_time_), 0.0);
    for (int i = 0; i + 1 < lead_time_; ++i)
      pre_.outstanding[static_cast<std::size_t>(i) + 1] = start.outstanding[static_cast<std::size_t>(i)];
  } else {
    throw std::invalid_argument(
        "start state must be empty or have entries summing to the base-stock level");
  }
  last_post_.assign(static_cast<std::size_t>(lead_time_) + 1, 0.0);
}

CostRecord BaseStockSimulator::advance(double demand) {
  const double order = base_stock_order(pre_, level_);

  // Post-arrival tuple for this period: stock after arrival, the still-pending
  // orders, and the order just placed.
  last_post_[0] = pre_.on_hand + (lead_time_ == 0 ? order : pre_.outstanding.front());
  for (int i = 1; i < lead_time_; ++i) last_post_[static_cast<std::size_t>(i)] = pre_.outstanding[static_cast<std::size_t>(i)];
  if (lead_time_ > 0) last_post_[static_cast<std::size_t>(lead_time_)] = order;

  auto [next, rec] = step(pre_, order, demand, params_);
  pre_ = std::move(next);
  return rec;
}

std::vector<CostRecord> simulate_base_stock(double level, const PipelineState& start,
                                            std::int64_t horizon, const CostParams& params,
                                            const DemandModel& model, RngStream& rng) {
  BaseStockSimulator sim(level, start, params);
  std::vector<CostRecord> records;
  records.reserve(static_cast<std::size_t>(horizon));
  for (std::int64_t t = 0; t < horizon; ++t) records.push_back(sim.advance(model.sample(rng)));
  return records;
}

std::vector<CostRecord> simulate_base_stock(double level, const PipelineState& start,
                                            const std::vector<double>& demands,
                                            const CostParams& params) {
  BaseStockSimulator sim(level, start, params);
  std::vector<CostRecord> records;
  records.reserve(demands.size());
  for (double d : demands) records.push_back(sim.advance(d));
  return records;
}

}  // namespace lostsales
