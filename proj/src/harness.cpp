#include "lostsales/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <utility>
#include <vector>

#include "lostsales/analysis.hpp"
#include "lostsales/csv.hpp"

namespace lostsales {

namespace {

struct Oracle {
  double level = 0.0;
  double loss = 0.0;
  double lambda = 0.0;
};

Oracle compute_oracle(const ExperimentConfig& config, const DemandModel& model) {
  const OptimalBaseStock best =
      optimal_base_stock(model, config.lead_time, config.params, config.oracle_levels(),
                         config.oracle_method, ExactChainOptions{}, config.mc_options);
  // A curve still falling at the top of the candidate range cannot bracket the
  // minimum; the benchmark is then the constrained optimum, which is worth a
  // note but not a failure.
  const auto& curve = best.curve;
  if (curve.size() >= 2 && best.level == curve.back().level &&
      curve.back().loss < curve[curve.size() - 2].loss - 1e-12) {
    std::cerr << "warning: loss curve is still decreasing at the top of the level grid; "
                 "the unconstrained optimum may lie above U\n";
  }
  Oracle oracle;
  oracle.level = best.level;
  oracle.loss = best.loss;
  oracle.lambda = best.loss + config.params.penalty * model.mean();
  return oracle;
}

struct RepOutcome {
  // one entry per checkpoint
  std::vector<double> regret_true, regret_pseudo, regret_path, regret_drain, regret_play;
  std::array<double, 2> final_interval{0.0, 0.0};
  int epochs = 0;
  std::int64_t rounds_started = 0;
  std::int64_t drain_steps = 0;
};

RngStream replication_stream(std::uint64_t seed, int rep) {
  return RngStream(seed).fork("experiment").fork(static_cast<std::uint64_t>(rep));
}

RepOutcome run_learner_replication(const ExperimentConfig& config, const DemandModel& model,
                                   const Oracle& oracle,
                                   const std::vector<std::int64_t>& checkpoints, int rep,
                                   std::vector<TraceRow>* trace) {
  RngStream demand_stream = replication_stream(config.seed, rep).fork("demand");

  LearnerConfig learner_config;
  learner_config.level_max = config.level_max;
  learner_config.lead_time = config.lead_time;
  learner_config.horizon = config.horizon;
  learner_config.params = config.params;
  learner_config.ci_scale = config.ci_scale;
  TrisectionLearner learner(learner_config);

  PipelineState env = empty_state(config.lead_time);
  BaseStockSimulator shadow(oracle.level, empty_state(config.lead_time), config.params);

  RepOutcome out;
  double cum_true = 0.0, cum_pseudo = 0.0, cum_shadow = 0.0;
  double drain_regret = 0.0, play_regret = 0.0;
  std::size_t next_checkpoint = 0;
  int prev_epoch = 0, prev_round = 0;

  for (std::int64_t t = 0; t < config.horizon; ++t) {
    const double order = learner.next_order({env.on_hand});
    const Phase phase = learner.phase();
    const int epoch = learner.epoch();
    const int round = learner.round();
    const double probe = learner.active_level();
    if (epoch != prev_epoch || round != prev_round) {
      prev_epoch = epoch;
      prev_round = round;
      ++out.rounds_started;
    }

    const double demand = model.sample(demand_stream);
    auto [next_env, rec] = step(env, order, demand, config.params);
    env = std::move(next_env);
    if (phase != Phase::Drain) learner.record_cost(rec.sales, rec.on_hand_pre_demand);
    const CostRecord shadow_rec = shadow.advance(demand);

    cum_true += rec.true_cost;
    cum_pseudo += rec.pseudo_cost;
    cum_shadow += shadow_rec.pseudo_cost;
    if (phase == Phase::Drain) {
      ++out.drain_steps;
      drain_regret += rec.pseudo_cost - oracle.loss;
    } else {
      play_regret += rec.pseudo_cost - oracle.loss;
    }

    if (trace) {
      TraceRow row;
      row.step = t + 1;
      row.phase = phase;
      row.epoch = epoch;
      row.round = round;
      row.probe_level = probe;
      row.order = order;
      row.pseudo_cost = rec.pseudo_cost;
      row.demand = demand;
      row.round_closed = learner.last_round_summary();
      trace->push_back(std::move(row));
    }

    if (next_checkpoint < checkpoints.size() && t + 1 == checkpoints[next_checkpoint]) {
      const double steps = static_cast<double>(t + 1);
      out.regret_true.push_back(cum_true - steps * oracle.lambda);
      out.regret_pseudo.push_back(cum_pseudo - steps * oracle.loss);
      out.regret_path.push_back(cum_pseudo - cum_shadow);
      out.regret_drain.push_back(drain_regret);
      out.regret_play.push_back(play_regret);
      ++next_checkpoint;
    }
  }

  out.final_interval = {learner.interval_low(), learner.interval_high()};
  out.epochs = learner.epoch();
  return out;
}

RepOutcome run_fixed_replication(const ExperimentConfig& config, const DemandModel& model,
                                 const Oracle& oracle, double level,
                                 const std::vector<std::int64_t>& checkpoints, int rep,
                                 std::vector<TraceRow>* trace) {
  RngStream demand_stream = replication_stream(config.seed, rep).fork("demand");
  BaseStockSimulator sim(level, empty_state(config.lead_time), config.params);
  BaseStockSimulator shadow(oracle.level, empty_state(config.lead_time), config.params);

  RepOutcome out;
  out.final_interval = {level, level};
  double cum_true = 0.0, cum_pseudo = 0.0, cum_shadow = 0.0;
  double play_regret = 0.0;
  std::size_t next_checkpoint = 0;

  for (std::int64_t t = 0; t < config.horizon; ++t) {
    const double order = base_stock_order(sim.pre_state(), level);
    const double demand = model.sample(demand_stream);
    const CostRecord rec = sim.advance(demand);
    const CostRecord shadow_rec = shadow.advance(demand);

    cum_true += rec.true_cost;
    cum_pseudo += rec.pseudo_cost;
    cum_shadow += shadow_rec.pseudo_cost;
    play_regret += rec.pseudo_cost - oracle.loss;

    if (trace) {
      TraceRow row;
      row.step = t + 1;
      row.phase = Phase::PlayCenter;
      row.epoch = 0;
      row.round = 0;
      row.probe_level = level;
      row.order = order;
      row.pseudo_cost = rec.pseudo_cost;
      row.demand = demand;
      trace->push_back(std::move(row));
    }

    if (next_checkpoint < checkpoints.size() && t + 1 == checkpoints[next_checkpoint]) {
      const double steps = static_cast<double>(t + 1);
      out.regret_true.push_back(cum_true - steps * oracle.lambda);
      out.regret_pseudo.push_back(cum_pseudo - steps * oracle.loss);
      out.regret_path.push_back(cum_pseudo - cum_shadow);
      out.regret_drain.push_back(0.0);
      out.regret_play.push_back(play_regret);
      ++next_checkpoint;
    }
  }
  return out;
}

struct MeanSe {
  double mean = 0.0;
  double se = 0.0;
};

template <typename Extract>
MeanSe across_reps(const std::vector<RepOutcome>& outcomes, Extract extract) {
  const std::size_t n = outcomes.size();
  double mean = 0.0;
  for (const RepOutcome& o : outcomes) mean += extract(o);
  mean /= static_cast<double>(n);
  if (n < 2) return {mean, 0.0};
  double ss = 0.0;
  for (const RepOutcome& o : outcomes) {
    const double d = extract(o) - mean;
    ss += d * d;
  }
  return {mean, std::sqrt(ss / static_cast<double>(n - 1) / static_cast<double>(n))};
}

template <typename RunRep>
RegretReport run_replicated(const ExperimentConfig& config, const Oracle& oracle,
                            const std::vector<std::int64_t>& checkpoints, RunRep run_rep,
                            std::vector<TraceRow>* trace) {
  const int reps = config.replications;
  if (trace) trace->clear();
  std::vector<RepOutcome> outcomes(static_cast<std::size_t>(reps));

  const unsigned hw = std::thread::hardware_concurrency();
  const int workers = std::max(1, std::min<int>(hw == 0 ? 1 : static_cast<int>(hw), reps));
  std::atomic<int> next_rep{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;

  auto work = [&]() {
    for (;;) {
      const int rep = next_rep.fetch_add(1);
      if (rep >= reps) return;
      try {
        outcomes[static_cast<std::size_t>(rep)] = run_rep(rep, rep == 0 ? trace : nullptr);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        return;
      }
    }
  };

  if (workers == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(workers));
    for (int i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);

  RegretReport report;
  report.oracle_level = oracle.level;
  report.oracle_loss = oracle.loss;
  report.oracle_lambda = oracle.lambda;
  report.replications = reps;
  for (std::size_t k = 0; k < checkpoints.size(); ++k) {
    CheckpointRow row;
    row.step = checkpoints[k];
    const MeanSe t = across_reps(outcomes, [&](const RepOutcome& o) { return o.regret_true[k]; });
    const MeanSe ps =
        across_reps(outcomes, [&](const RepOutcome& o) { return o.regret_pseudo[k]; });
    const MeanSe pw = across_reps(outcomes, [&](const RepOutcome& o) { return o.regret_path[k]; });
    const MeanSe dr =
        across_reps(outcomes, [&](const RepOutcome& o) { return o.regret_drain[k]; });
    const MeanSe pl = across_reps(outcomes, [&](const RepOutcome& o) { return o.regret_play[k]; });
    row.mean_regret_true = t.mean;
    row.se_regret_true = t.se;
    row.mean_regret_pseudo = ps.mean;
    row.se_regret_pseudo = ps.se;
    row.mean_regret_pathwise = pw.mean;
    row.se_regret_pathwise = pw.se;
    row.mean_regret_drain = dr.mean;
    row.mean_regret_play = pl.mean;
    report.checkpoints.push_back(row);
  }
  for (const RepOutcome& o : outcomes) {
    report.final_intervals.push_back(o.final_interval);
    report.epochs_per_replication.push_back(o.epochs);
    report.total_rounds_started += o.rounds_started;
    report.total_drain_steps += o.drain_steps;
  }
  return report;
}

}  // namespace

RegretReport run_experiment(const ExperimentConfig& config, std::vector<TraceRow>* trace) {
  config.validate();
  const DemandModel model = config.demand.build();
  const Oracle oracle = compute_oracle(config, model);
  const std::vector<std::int64_t> checkpoints = config.effective_checkpoints();
  return run_replicated(
      config, oracle, checkpoints,
      [&](int rep, std::vector<TraceRow>* rep_trace) {
        return run_learner_replication(config, model, oracle, checkpoints, rep, rep_trace);
      },
      trace);
}

RegretReport run_baseline(const ExperimentConfig& config, double level,
                          std::vector<TraceRow>* trace) {
  config.validate();
  if (level < 0.0 || !std::isfinite(level)) {
    throw std::invalid_argument("baseline level must be finite and nonnegative");
  }
  const DemandModel model = config.demand.build();
  const Oracle oracle = compute_oracle(config, model);
  const std::vector<std::int64_t> checkpoints = config.effective_checkpoints();
  return run_replicated(
      config, oracle, checkpoints,
      [&](int rep, std::vector<TraceRow>* rep_trace) {
        return run_fixed_replication(config, model, oracle, level, checkpoints, rep, rep_trace);
      },
      trace);
}

void write_regret_csv(std::ostream& out, const RegretReport& report) {
  CsvWriter csv(out);
  csv.row({"checkpoint", "mean_regret_true", "mean_regret_pseudo", "mean_regret_pathwise",
           "stderr", "regret0", "regret1"});
  for (const CheckpointRow& row : report.checkpoints) {
    csv.row({CsvWriter::field(row.step), CsvWriter::field(row.mean_regret_true),
             CsvWriter::field(row.mean_regret_pseudo), CsvWriter::field(row.mean_regret_pathwise),
             CsvWriter::field(row.se_regret_pathwise), CsvWriter::field(row.mean_regret_drain),
             CsvWriter::field(row.mean_regret_play)});
  }
}

void write_loss_curve_csv(std::ostream& out, const std::vector<LossEstimate>& curve,
                          double penalty, double mean_demand) {
  CsvWriter csv(out);
  csv.row({"level", "loss", "std_err", "lambda"});
  for (const LossEstimate& e : curve) {
    csv.row({CsvWriter::field(e.level), CsvWriter::field(e.loss), CsvWriter::field(e.std_err),
             CsvWriter::field(lambda_from_loss(e, penalty, mean_demand))});
  }
}

void write_trace_csv(std::ostream& out, const std::vector<TraceRow>& rows, bool expose_demand) {
  CsvWriter csv(out);
  std::vector<std::string> header = {"step",  "phase",       "epoch",
                                     "round", "probe_level", "order",
                                     "pseudo_cost"};
  header.push_back("interval_low");
  header.push_back("interval_high");
  if (expose_demand) header.push_back("demand");
  csv.row(header);
  for (const TraceRow& row : rows) {
    std::vector<std::string> fields;
    fields.push_back(CsvWriter::field(row.step));
    fields.push_back(to_string(row.phase));
    fields.push_back(CsvWriter::field(row.epoch));
    fields.push_back(CsvWriter::field(row.round));
    fields.push_back(CsvWriter::field(row.probe_level));
    fields.push_back(CsvWriter::field(row.order));
    fields.push_back(CsvWriter::field(row.pseudo_cost));
    if (row.round_closed) {
      fields.push_back(CsvWriter::field(row.round_closed->interval_low));
      fields.push_back(CsvWriter::field(row.round_closed->interval_high));
    } else {
      fields.push_back("");
      fields.push_back("");
    }
    if (expose_demand) fields.push_back(CsvWriter::field(row.demand));
    csv.row(fields);
  }
}

void write_trajectory_csv(std::ostream& out, const std::vector<CostRecord>& records,
                          bool expose_demand) {
  CsvWriter csv(out);
  std::vector<std::string> header = {"step", "on_hand_pre_demand", "sales", "true_cost",
                                     "pseudo_cost"};
  if (expose_demand) header.push_back("demand");
  csv.row(header);
  for (std::size_t i = 0; i < records.size(); ++i) {
    const CostRecord& rec = records[i];
    std::vector<std::string> fields = {
        CsvWriter::field(static_cast<std::int64_t>(i + 1)),
        CsvWriter::field(rec.on_hand_pre_demand),
        CsvWriter::field(rec.sales),
        CsvWriter::field(rec.true_cost),
        CsvWriter::field(rec.pseudo_cost)};
    if (expose_demand) fields.push_back(CsvWriter::field(rec.demand));
    csv.row(fields);
  }
}

}  // namespace lostsales
