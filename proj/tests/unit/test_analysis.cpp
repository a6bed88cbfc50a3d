#include <cmath>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "lostsales/analysis.hpp"

using namespace lostsales;

namespace {

PipelineState make_state(double on_hand, std::vector<double> outstanding) {
  PipelineState s;
  s.on_hand = on_hand;
  s.outstanding = std::move(outstanding);
  return s;
}

const DemandModel kCoin = DemandModel::scaled_bernoulli(0.5, 1.0);

}  // namespace

TEST_CASE("exact loss of the two-state chain") {
  // lead time 1, level 1, coin-flip demand, holding 1, penalty 3.
  // Post-arrival states (1,0) and (0,1); stationary weights 2/3 and 1/3.
  // Expected pseudo-costs: state (1,0) gives (1 - 3)/2 = -1, state (0,1)
  // gives 0, so the long-run mean is -2/3.
  const LossEstimate est = exact_loss(1.0, kCoin, 1, CostParams{1.0, 3.0});
  CHECK(est.loss == doctest::Approx(-2.0 / 3.0).epsilon(1e-10));
  CHECK(est.std_err == 0.0);
  CHECK(est.method == LossMethod::ExactChain);
  CHECK(est.level == 1.0);
}

TEST_CASE("exact loss with zero lead time") {
  // Stock is always refilled to the level before demand hits, so at level 1
  // the pseudo-cost is h with probability 1/2 and -p with probability 1/2.
  const LossEstimate est = exact_loss(1.0, kCoin, 0, CostParams{1.0, 1.0});
  CHECK(est.loss == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("true long-run rate from the pseudo rate") {
  LossEstimate two_state;
  two_state.loss = -2.0 / 3.0;
  CHECK(lambda_from_loss(two_state, 3.0, 0.5) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));

  LossEstimate flat;
  flat.loss = 0.0;
  CHECK(lambda_from_loss(flat, 1.0, 0.5) == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("exact loss degenerate demands") {
  const CostParams params{2.0, 1.0};
  SUBCASE("no demand means pure holding") {
    const DemandModel none = DemandModel::on_grid({0.0}, {1.0});
    const LossEstimate est = exact_loss(0.75, none, 1, params);
    CHECK(est.loss == doctest::Approx(2.0 * 0.75).epsilon(1e-12));
  }
  SUBCASE("level zero costs nothing") {
    const LossEstimate est = exact_loss(0.0, kCoin, 2, params);
    CHECK(est.loss == doctest::Approx(0.0).epsilon(1e-12));
  }
}

TEST_CASE("periodic chain still converges") {
  // Demand exactly 1 every period at level 1, lead time 1: the post-arrival
  // state alternates (1,0) <-> (0,1) forever.  Plain power iteration would
  // oscillate; the half-lazy operator settles on weights (1/2, 1/2), giving
  // a long-run pseudo-cost of -p/2.
  const DemandModel unit = DemandModel::on_grid({1.0}, {1.0});
  const LossEstimate est = exact_loss(1.0, unit, 1, CostParams{1.0, 4.0});
  CHECK(est.loss == doctest::Approx(-2.0).epsilon(1e-10));
}

TEST_CASE("exact loss validates the grid") {
  const DemandModel model = DemandModel::on_grid({0.0, 0.4}, {0.5, 0.5});
  ExactChainOptions options;
  options.grid_step = 0.4;
  // level 1 is not a multiple of 0.4
  CHECK_THROWS_AS(exact_loss(1.0, model, 1, CostParams{1.0, 1.0}, options),
                  std::invalid_argument);
  // on the grid it works
  const LossEstimate ok = exact_loss(1.2, model, 1, CostParams{1.0, 1.0}, options);
  CHECK(std::isfinite(ok.loss));
}

TEST_CASE("exact loss respects the state cap") {
  ExactChainOptions options;
  options.state_cap = 1;
  CHECK_THROWS_AS(exact_loss(1.0, kCoin, 1, CostParams{1.0, 3.0}, options), std::runtime_error);
}

TEST_CASE("monte carlo agrees with the exact chain") {
  const CostParams params{1.0, 3.0};
  const LossEstimate exact = exact_loss(1.0, kCoin, 1, params);
  const LossEstimate mc = mc_loss(1.0, kCoin, 1, params, 4000, 200, 32, RngStream(404));
  CHECK(mc.method == LossMethod::MonteCarlo);
  CHECK(mc.std_err > 0.0);
  CHECK(std::fabs(mc.loss - exact.loss) <= 4.0 * mc.std_err);
}

TEST_CASE("monte carlo preconditions") {
  const CostParams params{1.0, 1.0};
  const RngStream base(7);
  CHECK_THROWS_AS(mc_loss(1.0, kCoin, 1, params, 100, 10, 1, base), std::invalid_argument);
  CHECK_THROWS_AS(mc_loss(1.0, kCoin, 1, params, 100, 1, 4, base), std::invalid_argument);
  CHECK_THROWS_AS(mc_loss(1.0, kCoin, 1, params, 10, 10, 4, base), std::invalid_argument);
}

TEST_CASE("optimal level by exhaustive scan") {
  const std::vector<double> grid{0.0, 1.0, 2.0};
  SUBCASE("expensive lost sales push the level up") {
    // zero lead time: losses are 0, -4, -3 across the grid
    const OptimalBaseStock best = optimal_base_stock(kCoin, 0, CostParams{1.0, 9.0}, grid);
    CHECK(best.level == 1.0);
    CHECK(best.loss == doctest::Approx(-4.0).epsilon(1e-10));
    REQUIRE(best.curve.size() == 3);
    CHECK(best.curve[2].loss == doctest::Approx(-3.0).epsilon(1e-10));
  }
  SUBCASE("expensive holding pushes the level to zero") {
    const OptimalBaseStock best = optimal_base_stock(kCoin, 0, CostParams{9.0, 1.0}, grid);
    CHECK(best.level == 0.0);
    CHECK(best.loss == doctest::Approx(0.0).epsilon(1e-10));
  }
}

TEST_CASE("ternary search matches the scan on a convex curve") {
  std::vector<double> grid;
  for (int i = 0; i <= 40; ++i) grid.push_back(0.05 * i);
  const CostParams params{1.0, 4.0};

  const OptimalBaseStock scan = optimal_base_stock(kCoin, 1, params, grid);
  const OptimalBaseStock ternary = optimal_base_stock(kCoin, 1, params, grid,
                                                      LossMethod::ExactChain, {}, {}, true);
  CHECK(ternary.level == scan.level);
  CHECK(ternary.loss == doctest::Approx(scan.loss).epsilon(1e-12));
  CHECK(scan.curve.size() == grid.size());
  CHECK(ternary.curve.size() < grid.size());  // the point of the ternary search
}

TEST_CASE("optimal level validates the grid") {
  const CostParams params{1.0, 1.0};
  CHECK_THROWS_AS(optimal_base_stock(kCoin, 0, params, {}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_base_stock(kCoin, 0, params, {0.0, 0.0, 1.0}), std::invalid_argument);
  CHECK_THROWS_AS(optimal_base_stock(kCoin, 0, params, {0.0, -1.0}), std::invalid_argument);
}

TEST_CASE("single-crossing dominance") {
  CHECK(dominates(make_state(2.0, {1.0, 0.0}), make_state(1.0, {1.0, 1.0})));
  CHECK_FALSE(dominates(make_state(1.0, {1.0, 1.0}), make_state(2.0, {1.0, 0.0})));
  CHECK(dominates(make_state(1.0, {0.0, 1.0}), make_state(0.0, {1.0, 1.0})));
  // difference (-1, 1, 0) changes sign the wrong way
  CHECK_FALSE(dominates(make_state(0.0, {2.0, 1.0}), make_state(1.0, {1.0, 1.0})));
  CHECK(dominates(make_state(1.0, {2.0}), make_state(1.0, {2.0})));  // reflexive

  CHECK_THROWS_AS(dominates(make_state(1.0, {1.0}), make_state(1.0, {2.0})),
                  std::invalid_argument);
  CHECK_THROWS_AS(dominates(make_state(1.0, {1.0}), make_state(2.0, {})),
                  std::invalid_argument);
}

TEST_CASE("coupled runs from the same start never drift") {
  const PipelineState start = full_on_hand_state(1.0, 1);
  const CoupledDiff diff =
      coupled_diff(start, start, 1.0, kCoin, CostParams{1.0, 4.0}, 500, RngStream(99));
  CHECK(diff.delta_sales == 0.0);
  CHECK(diff.delta_inventory == 0.0);
  CHECK(diff.max_abs_cost_gap == 0.0);
}

TEST_CASE("coupled drift between comparable starts stays bounded") {
  // (1,0) versus (0,1), both level 1, lead time 1
  const PipelineState s = make_state(0.0, {1.0});
  const PipelineState s_prime = make_state(1.0, {0.0});
  REQUIRE(dominates(s_prime, s));
  const CostParams params{1.0, 4.0};
  const double level = 1.0;
  const CoupledDiff diff = coupled_diff(s, s_prime, level, kCoin, params, 2000, RngStream(314));
  CHECK(std::fabs(diff.delta_sales) <= 3.0 * level + 1e-9);
  CHECK(std::fabs(diff.delta_inventory) <= 6.0 * level + 1e-9);
  const double cost_bound = params.holding * 6.0 * level + (params.holding + params.penalty) * 3.0 * level;
  CHECK(diff.max_abs_cost_gap <= cost_bound + 1e-9);
}

TEST_CASE("finite-horizon value with no demand is pure holding") {
  const DemandModel none = DemandModel::on_grid({0.0}, {1.0});
  const double value = finite_horizon_value(0.5, full_on_hand_state(0.5, 1), 20, none,
                                            CostParams{2.0, 1.0}, 3, RngStream(1));
  CHECK(value == 20.0);  // 20 periods of holding cost 2 * 0.5, exact in binary
}
