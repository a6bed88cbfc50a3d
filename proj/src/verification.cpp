#include "lostsales/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "lostsales/analysis.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/inventory.hpp"
#include "lostsales/learner.hpp"
#include "lostsales/rng.hpp"

namespace lostsales {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

CostParams random_params(RngStream& rng) {
  return {0.25 + 3.75 * rng.next_unit(), 0.25 + 3.75 * rng.next_unit()};
}

// Random finite-support model on multiples of `grid_step` (atoms up to
// 8*grid_step).  With `force_zero_mass`, atom 0 is present and carries at
// least 5% of the weight.
DemandModel random_grid_model(RngStream rng, double grid_step, bool force_zero_mass) {
  const int n_extra = 1 + static_cast<int>(rng.next_below(5));  // atoms besides 0
  std::vector<double> support{0.0};
  std::int64_t unit = 0;
  for (int i = 0; i < n_extra; ++i) {
    unit += 1 + static_cast<std::int64_t>(rng.next_below(3));
    support.push_back(grid_step * static_cast<double>(unit));
  }
  std::vector<double> weights(support.size());
  double total = 0.0;
  for (double& w : weights) {
    w = 0.05 + rng.next_unit();
    total += w;
  }
  for (double& w : weights) w /= total;
  if (force_zero_mass && weights[0] < 0.05) {
    weights[0] = 0.05;
    double rest = 0.0;
    for (std::size_t i = 1; i < weights.size(); ++i) rest += weights[i];
    for (std::size_t i = 1; i < weights.size(); ++i) weights[i] *= 0.95 / rest;
  }
  return DemandModel::on_grid(std::move(support), std::move(weights));
}

void observe(SuiteResult& suite, double margin, double tolerance) {
  suite.worst_margin = std::min(suite.worst_margin, margin);
  if (margin < -tolerance) ++suite.violations;
}

}  // namespace

SuiteResult check_dynamics_identity(std::int64_t steps, std::uint64_t seed) {
  SuiteResult out;
  out.name = "dynamics-identity";
  out.worst_margin = kInf;
  const RngStream root(seed);
  constexpr std::int64_t kChunk = 200;
  std::uint64_t instance = 0;
  std::int64_t done = 0;
  while (done < steps) {
    RngStream rng = root.fork(instance++);
    const int lead_time = static_cast<int>(rng.next_below(7));
    const CostParams params = random_params(rng);
    const DemandModel model = random_grid_model(rng.fork("model"), 0.25, false);
    const double level = 0.25 * static_cast<double>(1 + rng.next_below(40));
    BaseStockSimulator sim(level, full_on_hand_state(level, lead_time), params);
    RngStream demand_stream = rng.fork("demand");
    const std::int64_t n = std::min(kChunk, steps - done);
    for (std::int64_t t = 0; t < n; ++t) {
      const CostRecord rec = sim.advance(model.sample(demand_stream));
      ++out.trials;
      if (rec.pseudo_cost != rec.true_cost - params.penalty * rec.demand) {
        ++out.violations;
        out.worst_margin = std::min(
            out.worst_margin,
            -std::fabs(rec.pseudo_cost - (rec.true_cost - params.penalty * rec.demand)));
      }
      double sum = 0.0;
      for (double e : sim.last_post_arrival()) sum += e;
      observe(out, 1e-9 - std::fabs(sum - level), 0.0);
    }
    done += n;
  }
  if (out.trials == 0) out.worst_margin = 0.0;
  return out;
}

CouplingResult check_coupling(std::int64_t trials, std::uint64_t seed, int max_lead_time,
                              double max_level, std::int64_t max_horizon) {
  CouplingResult res;
  res.sales.name = "coupling-sales";
  res.inventory.name = "coupling-inventory";
  res.cost_gap.name = "coupling-cost-gap";
  res.sales.worst_margin = res.inventory.worst_margin = res.cost_gap.worst_margin = kInf;

  const RngStream root(seed);
  for (std::int64_t trial = 0; trial < trials; ++trial) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(trial));
    const int lead_time = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_lead_time) + 1));
    const double grid_step = 0.25 * static_cast<double>(1 + rng.next_below(4));
    const std::int64_t max_units =
        std::max<std::int64_t>(1, static_cast<std::int64_t>(max_level / grid_step));
    const std::int64_t units = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(max_units)));
    const double level = grid_step * static_cast<double>(units);

    std::vector<std::int64_t> low_units(static_cast<std::size_t>(lead_time) + 1, 0);
    for (std::int64_t u = 0; u < units; ++u) {
      low_units[rng.next_below(static_cast<std::uint64_t>(lead_time) + 1)]++;
    }
    std::vector<std::int64_t> high_units = low_units;
    if (lead_time >= 1) {
      // Move mass from behind a random split point to in front of it; this is
      // exactly the single-sign-change comparability the bounds assume.
      const int split = static_cast<int>(rng.next_below(static_cast<std::uint64_t>(lead_time)));
      const std::int64_t moves = static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(units) + 1));
      for (std::int64_t m = 0; m < moves; ++m) {
        int donor = -1;
        for (int i = lead_time; i > split; --i) {
          if (high_units[static_cast<std::size_t>(i)] > 0) {
            donor = i;
            break;
          }
        }
        if (donor < 0) break;
        high_units[static_cast<std::size_t>(donor)]--;
        high_units[rng.next_below(static_cast<std::uint64_t>(split) + 1)]++;
      }
    }

    auto to_state = [&](const std::vector<std::int64_t>& comp) {
      PipelineState state;
      state.on_hand = grid_step * static_cast<double>(comp[0]);
      for (int i = 1; i <= lead_time; ++i) {
        state.outstanding.push_back(grid_step * static_cast<double>(comp[static_cast<std::size_t>(i)]));
      }
      return state;
    };
    const PipelineState s = to_state(low_units);
    const PipelineState s_prime = to_state(high_units);
    if (!dominates(s_prime, s)) {
      throw std::logic_error("check_coupling: generator produced a non-comparable pair");
    }

    const CostParams params = random_params(rng);
    const DemandModel model = random_grid_model(rng.fork("model"), grid_step, false);
    const std::int64_t horizon = 1 + static_cast<std::int64_t>(rng.next_below(static_cast<std::uint64_t>(max_horizon)));

    BaseStockSimulator from_s(level, s, params);
    BaseStockSimulator from_sp(level, s_prime, params);
    RngStream demand_stream = rng.fork("demand");

    const double sales_bound = 3.0 * level;
    const double inv_bound = 6.0 * static_cast<double>(lead_time) * level;
    const double cost_bound = params.holding * inv_bound + (params.holding + params.penalty) * sales_bound;
    const double tol = 1e-9 * (1.0 + cost_bound);

    double sales_gap_worst = kInf, inv_gap_worst = kInf, cost_gap_worst = kInf;
    double d_sales = 0.0, d_inv = 0.0, d_cost = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const double d = model.sample(demand_stream);
      const CostRecord a = from_s.advance(d);
      const CostRecord b = from_sp.advance(d);
      d_sales += b.sales - a.sales;
      d_inv += a.on_hand_pre_demand - b.on_hand_pre_demand;
      d_cost += b.pseudo_cost - a.pseudo_cost;
      sales_gap_worst = std::min(sales_gap_worst, sales_bound - std::fabs(d_sales));
      inv_gap_worst = std::min(inv_gap_worst, inv_bound - std::fabs(d_inv));
      cost_gap_worst = std::min(cost_gap_worst, cost_bound - std::fabs(d_cost));
    }

    ++res.sales.trials;
    ++res.inventory.trials;
    ++res.cost_gap.trials;
    observe(res.sales, sales_gap_worst, tol);
    observe(res.inventory, inv_gap_worst, tol);
    observe(res.cost_gap, cost_gap_worst, tol);
  }
  return res;
}

SuiteResult check_level_lipschitz(std::int64_t trials, std::uint64_t seed) {
  SuiteResult out;
  out.name = "level-lipschitz";
  out.worst_margin = kInf;
  const RngStream root(seed);
  constexpr std::int64_t kHorizon = 400;

  for (std::int64_t trial = 0; trial < trials; ++trial) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(trial));
    const int lead_time = static_cast<int>(rng.next_below(5));
    const CostParams params = random_params(rng);
    const DemandModel model = random_grid_model(rng.fork("model"), 0.25, false);
    const double level = 8.0 * rng.next_unit();
    const double delta = 0.0625 * static_cast<double>(1 + rng.next_below(16));

    BaseStockSimulator lo(level, full_on_hand_state(level, lead_time), params);
    BaseStockSimulator hi(level + delta, full_on_hand_state(level + delta, lead_time), params);
    RngStream demand_stream = rng.fork("demand");

    const double bound = params.max_rate() * delta;
    const double tol = 1e-9 * (1.0 + bound);
    double worst = kInf;
    bool dominated = true;
    for (std::int64_t t = 0; t < kHorizon; ++t) {
      const double d = model.sample(demand_stream);
      const CostRecord a = lo.advance(d);
      const CostRecord b = hi.advance(d);
      worst = std::min(worst, bound - std::fabs(b.pseudo_cost - a.pseudo_cost));
      const PipelineState& sa = lo.pre_state();
      const PipelineState& sb = hi.pre_state();
      if (sb.on_hand < sa.on_hand - tol) dominated = false;
      for (int i = 0; i < lead_time; ++i) {
        if (sb.outstanding[static_cast<std::size_t>(i)] <
            sa.outstanding[static_cast<std::size_t>(i)] - tol) {
          dominated = false;
        }
      }
    }
    ++out.trials;
    out.worst_margin = std::min(out.worst_margin, worst);
    if (worst < -tol || !dominated) ++out.violations;
  }
  if (out.trials == 0) out.worst_margin = 0.0;
  return out;
}

SuiteResult check_convexity(int models, int grid_points, double level_max, std::uint64_t seed) {
  if (grid_points < 3) throw std::invalid_argument("need at least 3 grid points");
  SuiteResult out;
  out.name = "loss-convexity";
  out.worst_margin = kInf;
  const RngStream root(seed);
  const double spacing = level_max / static_cast<double>(grid_points - 1);

  for (int m = 0; m < models; ++m) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(m));
    const int lead_time = static_cast<int>(rng.next_below(4));
    const CostParams params = random_params(rng);
    // positive mass at zero demand is what makes the loss curve convex
    const DemandModel model = random_grid_model(rng.fork("model"), spacing, true);

    std::vector<double> losses(static_cast<std::size_t>(grid_points));
    for (int i = 0; i < grid_points; ++i) {
      const double level = spacing * static_cast<double>(i);
      losses[static_cast<std::size_t>(i)] = exact_loss(level, model, lead_time, params).loss;
    }
    ++out.trials;
    bool ok = true;
    for (int i = 1; i + 1 < grid_points; ++i) {
      const double second = losses[static_cast<std::size_t>(i) + 1] -
                            2.0 * losses[static_cast<std::size_t>(i)] +
                            losses[static_cast<std::size_t>(i) - 1];
      out.worst_margin = std::min(out.worst_margin, second);
      if (second < -1e-9) ok = false;
    }
    if (!ok) ++out.violations;
  }
  if (out.trials == 0) out.worst_margin = 0.0;
  return out;
}

CoverageResult check_ci_coverage(std::int64_t draws, std::uint64_t seed, double ci_scale,
                                 std::int64_t horizon_for_n, int max_round) {
  CoverageResult out;
  out.draws = draws;
  out.min_width = kInf;
  out.max_width = 0.0;
  const double level_max = 2.0;
  const double grid_step = 0.1;
  const RngStream root(seed);

  for (std::int64_t k = 0; k < draws; ++k) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(k));
    const int lead_time = static_cast<int>(rng.next_below(3));
    CostParams params{0.5 + 3.5 * rng.next_unit(), 0.5 + 3.5 * rng.next_unit()};
    const DemandModel model = random_grid_model(rng.fork("model"), grid_step, false);
    const double level = grid_step * static_cast<double>(1 + rng.next_below(20));
    const int round = 1 + static_cast<int>(rng.next_below(static_cast<std::uint64_t>(max_round)));
    const double gamma = std::ldexp(1.0, -round);
    const std::int64_t n = std::max<std::int64_t>(
        1, static_cast<std::int64_t>(
               std::ceil(std::log(static_cast<double>(horizon_for_n)) / (gamma * gamma))));

    const double truth = exact_loss(level, model, lead_time, params).loss;

    BaseStockSimulator sim(level, full_on_hand_state(level, lead_time), params);
    RngStream demand_stream = rng.fork("demand");
    std::vector<double> costs;
    costs.reserve(static_cast<std::size_t>(n));
    for (std::int64_t t = 0; t < n; ++t) {
      costs.push_back(sim.advance(model.sample(demand_stream)).pseudo_cost);
    }
    const double h_const =
        ci_scale * 576.0 * params.max_rate() * static_cast<double>(lead_time + 1) * level_max;
    const ConfidenceInterval ci = confidence_interval(costs, gamma, h_const);
    if (ci.lower <= truth && truth <= ci.upper) ++out.covered;
    out.min_width = std::min(out.min_width, ci.upper - ci.lower);
    out.max_width = std::max(out.max_width, ci.upper - ci.lower);
  }
  if (draws == 0) out.min_width = 0.0;
  return out;
}

EliminationSafetyResult check_elimination_safety(std::int64_t runs, std::uint64_t seed) {
  EliminationSafetyResult out;
  out.runs = runs;
  const RngStream root(seed);

  for (std::int64_t run = 0; run < runs; ++run) {
    RngStream rng = root.fork(static_cast<std::uint64_t>(run));
    const double level_max = 0.5 + 3.5 * rng.next_unit();
    const double x_star = level_max * rng.next_unit();
    const double slope_left = 0.2 + 4.8 * rng.next_unit();
    const double slope_right = 0.2 + 4.8 * rng.next_unit();
    auto loss_curve = [&](double x) {
      return x < x_star ? slope_left * (x_star - x) : slope_right * (x - x_star);
    };
    const double horizon = std::pow(10.0, 3.0 + static_cast<double>(rng.next_below(4)));
    // Any positive half-width keeps injected intervals covering by
    // construction; a small one makes cuts actually fire.
    const double h_const = (0.05 + rng.next_unit()) * std::max(slope_left, slope_right) * level_max;
    const double epoch_cap =
        std::max(1.0, std::ceil(std::log(horizon) / std::log(4.0 / 3.0)));

    double low = 0.0, high = level_max;
    int epochs = 1;
    double steps_spent = 0.0;
    bool lost = false;
    int round = 0;
    double width_at_epoch_start = level_max;
    while (steps_spent < horizon && !lost) {
      ++round;
      const double gamma = std::ldexp(1.0, -round);
      const double samples = std::ceil(std::log(horizon) / (gamma * gamma));
      steps_spent += 3.0 * std::min(samples, horizon);
      const double width = high - low;
      const double xl = low + 0.25 * width;
      const double xc = low + 0.50 * width;
      const double xr = low + 0.75 * width;
      const double half = 0.5 * h_const * gamma;
      auto inject = [&](double x) {
        const double center = loss_curve(x) + (2.0 * rng.next_unit() - 1.0) * half;
        return ConfidenceInterval{center - half, center + half};
      };
      const ConfidenceInterval l = inject(xl);
      const ConfidenceInterval c = inject(xc);
      const ConfidenceInterval r = inject(xr);
      const CutDecision decision = elimination_test(l.lower, l.upper, c.lower, c.upper, r.lower,
                                                    r.upper, h_const * gamma);
      if (decision == CutDecision::Continue) {
        for (double x : {xl, xc, xr}) {
          if (loss_curve(x) - loss_curve(x_star) > 12.0 * h_const * gamma + 1e-9) {
            ++out.near_optimality_violations;
          }
        }
        continue;
      }
      if (decision == CutDecision::CutLeft) {
        low = xl;
      } else {
        high = xr;
      }
      if (x_star < low - 1e-12 || x_star > high + 1e-12) {
        ++out.optimum_lost;
        lost = true;
      }
      const double new_width = high - low;
      if (std::fabs(new_width - 0.75 * width_at_epoch_start) > 1e-12 * (1.0 + width_at_epoch_start)) {
        ++out.width_shrink_violations;
      }
      width_at_epoch_start = new_width;
      ++epochs;
      if (static_cast<double>(epochs) > epoch_cap) {
        ++out.epoch_budget_exceeded;
        break;
      }
      round = 0;
    }
  }
  return out;
}

}  // namespace lostsales
