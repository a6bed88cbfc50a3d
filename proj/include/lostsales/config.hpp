#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "lostsales/analysis.hpp"
#include "lostsales/demand.hpp"
#include "lostsales/inventory.hpp"

namespace lostsales {

/// How to build a DemandModel, as written in a config file.
struct DemandSpec {
  DemandKind kind = DemandKind::ScaledBernoulli;
  // scaled-bernoulli
  double q0 = 0.5;
  double b = 1.0;
  // on-grid
  std::vector<double> support;
  std::vector<double> weights;
  // truncated-geometric
  double decay = 0.5;
  double step = 1.0;
  double support_max = 1.0;

  DemandModel build() const;
};

struct ExperimentConfig {
  DemandSpec demand;
  int lead_time = 0;            // L
  double level_max = 1.0;       // U
  std::int64_t horizon = 1;     // T
  CostParams params;            // h, p
  double ci_scale = 1.0;        // h_scale knob
  std::uint64_t seed = 0;
  int replications = 1;
  std::vector<std::int64_t> checkpoints;  // defaults to powers of 10 up to T, plus T
  int oracle_grid = 21;                   // grid points on [0, level_max]
  LossMethod oracle_method = LossMethod::ExactChain;
  McLossOptions mc_options;

  void validate() const;
  std::vector<std::int64_t> effective_checkpoints() const;
  std::vector<double> oracle_levels() const;
};

/// Parse the flat key=value config format ('#' starts a comment, one key per
/// line).  Unknown keys are errors; so are duplicate keys and malformed
/// numbers.  See the README for the key list.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

}  // namespace lostsales
