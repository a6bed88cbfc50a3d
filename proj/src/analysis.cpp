#include "lostsales/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <deque>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace lostsales {

namespace {

// Euclid on positive reals with an absolute snap tolerance.  All supported
// configurations keep levels and atoms O(1e3), so an absolute snap is safe.
double approx_gcd(double a, double b) {
  constexpr double kSnap = 1e-9;
  a = std::fabs(a);
  b = std::fabs(b);
  if (a < b) std::swap(a, b);
  while (b > kSnap) {
    double r = std::fmod(a, b);
    if (r > b - kSnap) r = 0.0;  // landed just under a multiple
    a = b;
    b = r;
  }
  return a;
}

struct GridLayout {
  double step = 1.0;
  std::int64_t level = 0;
  std::vector<std::int64_t> atoms;
};

std::int64_t snap_to_grid(double value, double step, const char* what) {
  const double q = value / step;
  const double n = std::nearbyint(q);
  if (std::fabs(value - n * step) > 1e-7 * (1.0 + std::fabs(value))) {
    throw std::invalid_argument(std::string(what) +
                                " does not sit on the working grid (step " +
                                std::to_string(step) + ")");
  }
  if (n < 0.0 || n > 5e7) {
    throw std::invalid_argument(std::string(what) + " is out of range for the working grid");
  }
  return static_cast<std::int64_t>(n);
}

GridLayout build_grid(double level, const DemandModel& model, const ExactChainOptions& options) {
  GridLayout grid;
  if (options.grid_step > 0.0) {
    grid.step = options.grid_step;
  } else {
    double g = 0.0;
    auto fold = [&g](double v) {
      if (v > 1e-12) g = (g == 0.0) ? v : approx_gcd(g, v);
    };
    fold(level);
    for (double atom : model.support()) fold(atom);
    grid.step = (g > 1e-12) ? g : 1.0;  // everything is zero: step is arbitrary
  }
  grid.level = snap_to_grid(level, grid.step, "base-stock level");
  grid.atoms.reserve(model.support().size());
  for (double atom : model.support()) {
    grid.atoms.push_back(snap_to_grid(atom, grid.step, "demand atom"));
  }
  return grid;
}

struct StateHash {
  std::size_t operator()(const std::vector<std::int64_t>& v) const noexcept {
    std::uint64_t h = 1469598103934665603ull;
    for (std::int64_t x : v) {
      h ^= static_cast<std::uint64_t>(x);
      h *= 1099511628211ull;
    }
    return static_cast<std::size_t>(h);
  }
};

// Iterative Tarjan over the flat successor table.  Fills comp with component
// ids (0-based) and returns the component count.
int strongly_connected_components(std::size_t n, std::size_t n_atoms,
                                  const std::vector<std::int32_t>& succ,
                                  std::vector<std::int32_t>& comp) {
  constexpr std::int32_t kUnvisited = -1;
  std::vector<std::int32_t> num(n, kUnvisited);
  std::vector<std::int32_t> low(n, 0);
  std::vector<bool> on_stack(n, false);
  std::vector<std::int32_t> stack;
  std::vector<std::pair<std::int32_t, std::size_t>> call;  // node, next edge slot
  comp.assign(n, kUnvisited);
  std::int32_t counter = 0;
  int n_comp = 0;

  for (std::size_t root = 0; root < n; ++root) {
    if (num[root] != kUnvisited) continue;
    call.emplace_back(static_cast<std::int32_t>(root), 0);
    while (!call.empty()) {
      const std::int32_t u = call.back().first;
      const std::size_t e = call.back().second;
      if (e == 0) {
        num[u] = low[u] = counter++;
        stack.push_back(u);
        on_stack[u] = true;
      }
      if (e < n_atoms) {
        call.back().second = e + 1;
        const std::int32_t v = succ[static_cast<std::size_t>(u) * n_atoms + e];
        if (num[v] == kUnvisited) {
          call.emplace_back(v, 0);
        } else if (on_stack[v]) {
          low[u] = std::min(low[u], num[v]);
        }
      } else {
        if (low[u] == num[u]) {
          while (true) {
            const std::int32_t w = stack.back();
            stack.pop_back();
            on_stack[w] = false;
            comp[w] = n_comp;
            if (w == u) break;
          }
          ++n_comp;
        }
        call.pop_back();
        if (!call.empty()) {
          const std::int32_t parent = call.back().first;
          low[parent] = std::min(low[parent], low[u]);
        }
      }
    }
  }
  return n_comp;
}

}  // namespace

LossEstimate exact_loss(double level, const DemandModel& model, int lead_time,
                        const CostParams& params, const ExactChainOptions& options) {
  params.validate();
  if (level < 0.0 || !std::isfinite(level)) {
    throw std::invalid_argument("base-stock level must be finite and nonnegative");
  }
  if (lead_time < 0) throw std::invalid_argument("lead time must be nonnegative");

  const GridLayout grid = build_grid(level, model, options);
  const std::size_t n_entries = static_cast<std::size_t>(lead_time) + 1;
  const std::size_t n_atoms = grid.atoms.size();
  const std::vector<double>& w = model.weights();

  // Enumerate every post-arrival state reachable from (level, 0, ..., 0).
  // Entries sum to the level throughout, so the set is finite on the grid.
  std::vector<std::vector<std::int64_t>> states;
  std::unordered_map<std::vector<std::int64_t>, std::int32_t, StateHash> index;
  std::vector<std::int32_t> succ;        // states.size() x n_atoms, row-major
  std::vector<double> step_cost;         // expected pseudo-cost per state

  std::vector<std::int64_t> start(n_entries, 0);
  start[0] = grid.level;
  states.push_back(start);
  index.emplace(start, 0);

  for (std::size_t s = 0; s < states.size(); ++s) {
    const std::vector<std::int64_t> cur = states[s];  // copy: states may reallocate
    const std::int64_t on_hand = cur[0];
    double expected = 0.0;
    for (std::size_t j = 0; j < n_atoms; ++j) {
      const std::int64_t y = std::min(on_hand, grid.atoms[j]);
      expected += w[j] * (params.holding * static_cast<double>(on_hand - y) -
                          params.penalty * static_cast<double>(y));

      std::vector<std::int64_t> next(n_entries);
      if (lead_time == 0) {
        next[0] = on_hand;  // the reorder equals the sales and arrives at once
      } else {
        next[0] = on_hand - y + cur[1];
        for (int i = 1; i < lead_time; ++i) next[i] = cur[i + 1];
        next[static_cast<std::size_t>(lead_time)] = y;
      }

      auto [it, inserted] = index.emplace(std::move(next), static_cast<std::int32_t>(states.size()));
      if (inserted) {
        if (states.size() >= options.state_cap) {
          throw std::runtime_error("exact_loss: reachable state space exceeds the cap of " +
                                   std::to_string(options.state_cap) + " states");
        }
        if ((states.size() + 1) * n_atoms > 40'000'000) {
          throw std::runtime_error("exact_loss: transition table would be too large");
        }
        states.push_back(it->first);
      }
      succ.push_back(it->second);
    }
    step_cost.push_back(expected * grid.step);
  }

  const std::size_t n = states.size();

  // A long-run average only exists unambiguously when the reachable graph has
  // a single closed communicating class.
  std::vector<std::int32_t> comp;
  const int n_comp = strongly_connected_components(n, n_atoms, succ, comp);
  std::vector<bool> open(static_cast<std::size_t>(n_comp), false);
  for (std::size_t s = 0; s < n; ++s) {
    for (std::size_t j = 0; j < n_atoms; ++j) {
      const std::int32_t t = succ[s * n_atoms + j];
      if (comp[s] != comp[t]) open[static_cast<std::size_t>(comp[s])] = true;
    }
  }
  int closed = 0;
  for (bool is_open : open) {
    if (!is_open) ++closed;
  }
  if (closed != 1) {
    throw std::runtime_error("exact_loss: reachable chain splits into " + std::to_string(closed) +
                             " closed classes; the long-run average depends on the path");
  }

  // Power iteration on the half-lazy operator (P + I)/2: same stationary
  // distribution, but immune to the cycling of periodic chains.
  std::vector<double> pi(n, 0.0);
  std::vector<double> flow(n, 0.0);
  pi[0] = 1.0;
  bool converged = (n == 1);
  for (std::int64_t iter = 0; iter < options.max_iterations && !converged; ++iter) {
    std::fill(flow.begin(), flow.end(), 0.0);
    for (std::size_t s = 0; s < n; ++s) {
      const double mass = pi[s];
      if (mass == 0.0) continue;
      const std::size_t base = s * n_atoms;
      for (std::size_t j = 0; j < n_atoms; ++j) {
        flow[static_cast<std::size_t>(succ[base + j])] += mass * w[j];
      }
    }
    double tv = 0.0;
    for (std::size_t s = 0; s < n; ++s) {
      const double blended = 0.5 * (pi[s] + flow[s]);
      tv += std::fabs(blended - pi[s]);
      pi[s] = blended;
    }
    converged = (0.5 * tv <= options.tv_tol);
  }
  if (!converged) {
    throw std::runtime_error("exact_loss: power iteration did not converge within " +
                             std::to_string(options.max_iterations) + " iterations");
  }

  double total = 0.0;
  for (double mass : pi) total += mass;
  double loss = 0.0;
  for (std::size_t s = 0; s < n; ++s) loss += (pi[s] / total) * step_cost[s];

  LossEstimate out;
  out.level = level;
  out.loss = loss;
  out.std_err = 0.0;
  out.method = LossMethod::ExactChain;
  return out;
}

LossEstimate mc_loss(double level, const DemandModel& model, int lead_time,
                     const CostParams& params, std::int64_t horizon, std::int64_t burn_in,
                     int replications, const RngStream& base,
                     const std::optional<PipelineState>& start) {
  params.validate();
  if (level < 0.0 || !std::isfinite(level)) {
    throw std::invalid_argument("base-stock level must be finite and nonnegative");
  }
  if (lead_time < 0) throw std::invalid_argument("lead time must be nonnegative");
  if (replications < 2) throw std::invalid_argument("mc_loss needs at least two replications");
  if (burn_in < lead_time + 1) {
    throw std::invalid_argument("burn-in must be at least lead_time + 1 so the pipeline fills");
  }
  if (horizon <= burn_in) throw std::invalid_argument("horizon must exceed the burn-in");

  const PipelineState s0 = start ? *start : full_on_hand_state(level, lead_time);
  const double window = static_cast<double>(horizon - burn_in);

  std::vector<double> per_rep;
  per_rep.reserve(static_cast<std::size_t>(replications));
  for (int r = 0; r < replications; ++r) {
    RngStream stream = base.fork(static_cast<std::uint64_t>(r));
    BaseStockSimulator sim(level, s0, params);
    double acc = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      const CostRecord rec = sim.advance(model.sample(stream));
      if (t >= burn_in) acc += rec.pseudo_cost;
    }
    per_rep.push_back(acc / window);
  }

  double mean = 0.0;
  for (double v : per_rep) mean += v;
  mean /= static_cast<double>(replications);
  double ss = 0.0;
  for (double v : per_rep) ss += (v - mean) * (v - mean);
  const double variance = ss / static_cast<double>(replications - 1);

  LossEstimate out;
  out.level = level;
  out.loss = mean;
  out.std_err = std::sqrt(variance / static_cast<double>(replications));
  out.method = LossMethod::MonteCarlo;
  return out;
}

double lambda_from_loss(const LossEstimate& estimate, double penalty, double mean_demand) {
  return estimate.loss + penalty * mean_demand;
}

OptimalBaseStock optimal_base_stock(const DemandModel& model, int lead_time,
                                    const CostParams& params, const std::vector<double>& grid,
                                    LossMethod method, const ExactChainOptions& exact_options,
                                    const McLossOptions& mc_options, bool use_ternary) {
  if (grid.empty()) throw std::invalid_argument("candidate grid must be non-empty");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid[i] < 0.0 || !std::isfinite(grid[i])) {
      throw std::invalid_argument("candidate levels must be finite and nonnegative");
    }
    if (i > 0 && grid[i] <= grid[i - 1]) {
      throw std::invalid_argument("candidate levels must be strictly increasing");
    }
  }

  // One shared stream for every level keeps the Monte-Carlo draws common
  // across candidates, which sharpens the argmin comparison.
  const RngStream mc_base = RngStream(mc_options.seed).fork("loss-grid");
  auto evaluate = [&](double x) {
    if (method == LossMethod::ExactChain) {
      return exact_loss(x, model, lead_time, params, exact_options);
    }
    return mc_loss(x, model, lead_time, params, mc_options.horizon, mc_options.burn_in,
                   mc_options.replications, mc_base);
  };

  std::vector<std::optional<LossEstimate>> memo(grid.size());
  auto at = [&](std::size_t i) -> const LossEstimate& {
    if (!memo[i]) memo[i] = evaluate(grid[i]);
    return *memo[i];
  };

  std::size_t lo = 0;
  std::size_t hi = grid.size() - 1;
  if (use_ternary) {
    // Discrete ternary search; assumes the loss is convex along the grid.  On
    // flat stretches it still lands on a minimizer, though not necessarily the
    // leftmost one.
    while (hi - lo > 2) {
      const std::size_t m1 = lo + (hi - lo) / 3;
      const std::size_t m2 = hi - (hi - lo) / 3;
      if (at(m1).loss <= at(m2).loss) {
        hi = m2;
      } else {
        lo = m1;
      }
    }
  }

  std::size_t best = lo;
  for (std::size_t i = lo; i <= hi; ++i) {
    if (at(i).loss < at(best).loss) best = i;
  }

  OptimalBaseStock out;
  out.level = grid[best];
  out.loss = at(best).loss;
  for (const auto& entry : memo) {
    if (entry) out.curve.push_back(*entry);
  }
  return out;
}

bool dominates(const PipelineState& s_prime, const PipelineState& s) {
  if (s_prime.lead_time() != s.lead_time()) {
    throw std::invalid_argument("dominance needs states with equal lead times");
  }
  if (std::fabs(s_prime.sum() - s.sum()) > 1e-9) {
    throw std::invalid_argument("dominance needs states holding the same total stock");
  }
  const std::vector<double> a = s_prime.entries();
  const std::vector<double> b = s.entries();
  double scale = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    scale = std::max({scale, std::fabs(a[i]), std::fabs(b[i])});
  }
  const double tol = 1e-12 * (1.0 + scale);

  // Equal sums make single-sign-change equivalent to: no strictly positive
  // entry of (s_prime - s) after a strictly negative one.
  bool seen_negative = false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    if (d < -tol) {
      seen_negative = true;
    } else if (d > tol && seen_negative) {
      return false;
    }
  }
  return true;
}

CoupledDiff coupled_diff(const PipelineState& s, const PipelineState& s_prime, double level,
                         const DemandModel& model, const CostParams& params,
                         std::int64_t horizon, const RngStream& base) {
  RngStream demand_stream = base.fork("coupled-demand");
  BaseStockSimulator from_s(level, s, params);
  BaseStockSimulator from_sp(level, s_prime, params);

  double sales_s = 0.0, sales_sp = 0.0;
  double inv_s = 0.0, inv_sp = 0.0;
  double cost_s = 0.0, cost_sp = 0.0;
  double worst = 0.0;
  for (std::int64_t t = 0; t < horizon; ++t) {
    const double d = model.sample(demand_stream);
    const CostRecord rec_s = from_s.advance(d);
    const CostRecord rec_sp = from_sp.advance(d);
    sales_s += rec_s.sales;
    sales_sp += rec_sp.sales;
    inv_s += rec_s.on_hand_pre_demand;
    inv_sp += rec_sp.on_hand_pre_demand;
    cost_s += rec_s.pseudo_cost;
    cost_sp += rec_sp.pseudo_cost;
    worst = std::max(worst, std::fabs(cost_sp - cost_s));
  }

  CoupledDiff out;
  out.delta_sales = sales_sp - sales_s;
  out.delta_inventory = inv_s - inv_sp;
  out.max_abs_cost_gap = worst;
  return out;
}

double finite_horizon_value(double level, const PipelineState& start, std::int64_t horizon,
                            const DemandModel& model, const CostParams& params,
                            int replications, const RngStream& base) {
  if (replications < 1) throw std::invalid_argument("need at least one replication");
  double acc = 0.0;
  for (int r = 0; r < replications; ++r) {
    RngStream stream = base.fork(static_cast<std::uint64_t>(r));
    BaseStockSimulator sim(level, start, params);
    double total = 0.0;
    for (std::int64_t t = 0; t < horizon; ++t) {
      total += sim.advance(model.sample(stream)).pseudo_cost;
    }
    acc += total;
  }
  return acc / static_cast<double>(replications);
}

}  // namespace lostsales
