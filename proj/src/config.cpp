#include "lostsales/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace lostsales {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

[[noreturn]] void fail(const std::string& key, const std::string& why) {
  throw std::invalid_argument("config key '" + key + "': " + why);
}

double parse_double(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  double out = 0.0;
  try {
    out = std::stod(value, &pos);
  } catch (const std::exception&) {
    fail(key, "expected a number, got '" + value + "'");
  }
  if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
  return out;
}

std::int64_t parse_int(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  std::int64_t out = 0;
  try {
    out = std::stoll(value, &pos);
  } catch (const std::exception&) {
    fail(key, "expected an integer, got '" + value + "'");
  }
  if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
  return out;
}

std::uint64_t parse_uint(const std::string& value, const std::string& key) {
  std::size_t pos = 0;
  std::uint64_t out = 0;
  try {
    out = std::stoull(value, &pos);
  } catch (const std::exception&) {
    fail(key, "expected a nonnegative integer, got '" + value + "'");
  }
  if (pos != value.size()) fail(key, "trailing characters in '" + value + "'");
  return out;
}

std::vector<double> parse_double_list(const std::string& value, const std::string& key) {
  std::vector<double> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) fail(key, "empty element in list '" + value + "'");
    out.push_back(parse_double(t, key));
  }
  if (out.empty()) fail(key, "expected a comma-separated list");
  return out;
}

std::vector<std::int64_t> parse_int_list(const std::string& value, const std::string& key) {
  std::vector<std::int64_t> out;
  std::stringstream ss(value);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const std::string t = trim(item);
    if (t.empty()) fail(key, "empty element in list '" + value + "'");
    out.push_back(parse_int(t, key));
  }
  if (out.empty()) fail(key, "expected a comma-separated list");
  return out;
}

}  // namespace

DemandModel DemandSpec::build() const {
  switch (kind) {
    case DemandKind::ScaledBernoulli:
      return DemandModel::scaled_bernoulli(q0, b);
    case DemandKind::OnGrid:
      return DemandModel::on_grid(support, weights);
    case DemandKind::TruncatedGeometric:
      return DemandModel::truncated_geometric(decay, step, support_max);
  }
  throw std::logic_error("unhandled demand kind");
}

void ExperimentConfig::validate() const {
  params.validate();
  if (lead_time < 0) throw std::invalid_argument("L must be nonnegative");
  if (!(level_max > 0.0) || !std::isfinite(level_max)) {
    throw std::invalid_argument("U must be positive and finite");
  }
  if (horizon < 1) throw std::invalid_argument("T must be at least 1");
  if (!(ci_scale > 0.0) || !std::isfinite(ci_scale)) {
    throw std::invalid_argument("h_scale must be positive and finite");
  }
  if (replications < 1) throw std::invalid_argument("replications must be at least 1");
  if (oracle_grid < 2) throw std::invalid_argument("oracle_grid needs at least 2 points");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > horizon) {
      throw std::invalid_argument("checkpoints must lie in [1, T]");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw std::invalid_argument("checkpoints must be strictly increasing");
    }
  }
  if (oracle_method == LossMethod::MonteCarlo) {
    if (mc_options.replications < 2) {
      throw std::invalid_argument("mc_replications must be at least 2");
    }
    if (mc_options.burn_in < lead_time + 1) {
      throw std::invalid_argument("mc_burn_in must be at least L + 1");
    }
    if (mc_options.horizon <= mc_options.burn_in) {
      throw std::invalid_argument("mc_horizon must exceed mc_burn_in");
    }
  }
  demand.build();  // throws if the demand parameters are inconsistent
}

std::vector<std::int64_t> ExperimentConfig::effective_checkpoints() const {
  if (!checkpoints.empty()) return checkpoints;
  std::vector<std::int64_t> out;
  for (std::int64_t c = 10; c < horizon; c *= 10) out.push_back(c);
  out.push_back(horizon);
  return out;
}

std::vector<double> ExperimentConfig::oracle_levels() const {
  std::vector<double> grid(static_cast<std::size_t>(oracle_grid));
  for (int i = 0; i < oracle_grid; ++i) {
    grid[static_cast<std::size_t>(i)] =
        level_max * static_cast<double>(i) / static_cast<double>(oracle_grid - 1);
  }
  grid.back() = level_max;
  return grid;
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig config;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const auto eq = stripped.find('=');
    if (eq == std::string::npos) {
      throw std::invalid_argument("config line " + std::to_string(line_no) +
                                  ": expected key = value");
    }
    const std::string key = trim(stripped.substr(0, eq));
    const std::string value = trim(stripped.substr(eq + 1));
    if (key.empty()) {
      throw std::invalid_argument("config line " + std::to_string(line_no) + ": empty key");
    }
    if (value.empty()) fail(key, "empty value");
    if (!seen.insert(key).second) fail(key, "duplicate key");

    if (key == "demand.kind") {
      if (value == "scaled_bernoulli") {
        config.demand.kind = DemandKind::ScaledBernoulli;
      } else if (value == "on_grid") {
        config.demand.kind = DemandKind::OnGrid;
      } else if (value == "truncated_geometric") {
        config.demand.kind = DemandKind::TruncatedGeometric;
      } else {
        fail(key, "expected scaled_bernoulli, on_grid, or truncated_geometric");
      }
    } else if (key == "demand.q0") {
      config.demand.q0 = parse_double(value, key);
    } else if (key == "demand.b") {
      config.demand.b = parse_double(value, key);
    } else if (key == "demand.support") {
      config.demand.support = parse_double_list(value, key);
    } else if (key == "demand.weights") {
      config.demand.weights = parse_double_list(value, key);
    } else if (key == "demand.decay") {
      config.demand.decay = parse_double(value, key);
    } else if (key == "demand.step") {
      config.demand.step = parse_double(value, key);
    } else if (key == "demand.support_max") {
      config.demand.support_max = parse_double(value, key);
    } else if (key == "L") {
      config.lead_time = static_cast<int>(parse_int(value, key));
    } else if (key == "U") {
      config.level_max = parse_double(value, key);
    } else if (key == "T") {
      config.horizon = parse_int(value, key);
    } else if (key == "h") {
      config.params.holding = parse_double(value, key);
    } else if (key == "p") {
      config.params.penalty = parse_double(value, key);
    } else if (key == "h_scale") {
      config.ci_scale = parse_double(value, key);
    } else if (key == "seed") {
      config.seed = parse_uint(value, key);
    } else if (key == "replications") {
      config.replications = static_cast<int>(parse_int(value, key));
    } else if (key == "checkpoints") {
      config.checkpoints = parse_int_list(value, key);
    } else if (key == "oracle_grid") {
      config.oracle_grid = static_cast<int>(parse_int(value, key));
    } else if (key == "oracle_method") {
      if (value == "exact") {
        config.oracle_method = LossMethod::ExactChain;
      } else if (value == "mc") {
        config.oracle_method = LossMethod::MonteCarlo;
      } else {
        fail(key, "expected exact or mc");
      }
    } else if (key == "mc_horizon") {
      config.mc_options.horizon = parse_int(value, key);
    } else if (key == "mc_burn_in") {
      config.mc_options.burn_in = parse_int(value, key);
    } else if (key == "mc_replications") {
      config.mc_options.replications = static_cast<int>(parse_int(value, key));
    } else if (key == "mc_seed") {
      config.mc_options.seed = parse_uint(value, key);
    } else {
      fail(key, "unknown key");
    }
  }
  config.validate();
  return config;
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

}  // namespace lostsales
