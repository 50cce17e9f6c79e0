#include "selfsep/config.hpp"

#include <fstream>
#include <sstream>

#include "selfsep/csv.hpp"
#include "selfsep/error.hpp"

namespace selfsep {

const char* to_string(Method method) {
  switch (method) {
    case Method::lw_hf: return "lw-hf";
    case Method::lw_mf: return "lw-mf";
    case Method::map_hf: return "map-hf";
    case Method::map_mf: return "map-mf";
    case Method::bayes_mf: return "bayes-mf";
  }
  return "unknown";
}

Method method_from_string(std::string_view name) {
  if (name == "lw-hf") return Method::lw_hf;
  if (name == "lw-mf") return Method::lw_mf;
  if (name == "map-hf") return Method::map_hf;
  if (name == "map-mf") return Method::map_mf;
  if (name == "bayes-mf") return Method::bayes_mf;
  raise(ErrorCode::parse, "unknown method: " + std::string(name));
}

uint64_t method_id(Method method) {
  switch (method) {
    case Method::lw_hf: return 1;
    case Method::lw_mf: return 2;
    case Method::map_hf: return 3;
    case Method::map_mf: return 4;
    case Method::bayes_mf: return 5;
  }
  raise(ErrorCode::internal, "bad method enum value");
}

bool method_uses_low_fidelity(Method method) {
  return method == Method::lw_mf || method == Method::map_mf ||
         method == Method::bayes_mf;
}

bool method_model_based(Method method) {
  return method == Method::map_hf || method == Method::map_mf ||
         method == Method::bayes_mf;
}

CouplingPrior ExperimentConfig::coupling_prior() const {
  CouplingPrior prior = CouplingPrior::defaults(scenario);
  if (prior_mean) prior.mean = *prior_mean;
  if (prior_covariance) prior.covariance = *prior_covariance;
  return prior;
}

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) {
    s.remove_prefix(1);
  }
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
    s.remove_suffix(1);
  }
  return s;
}

std::vector<std::string_view> split_list(std::string_view value) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string_view::npos) {
      items.push_back(trim(value.substr(start)));
      break;
    }
    items.push_back(trim(value.substr(start, comma - start)));
    start = comma + 1;
  }
  return items;
}

int parse_int(std::string_view key, std::string_view value) {
  const double d = parse_double(value);
  const int i = static_cast<int>(d);
  require(static_cast<double>(i) == d, ErrorCode::parse,
          std::string(key) + " must be an integer");
  return i;
}

int parse_positive_int(std::string_view key, std::string_view value) {
  const int i = parse_int(key, value);
  require(i >= 1, ErrorCode::parse, std::string(key) + " must be >= 1");
  return i;
}

std::vector<double> parse_double_list(std::string_view value) {
  std::vector<double> out;
  for (const auto item : split_list(value)) out.push_back(parse_double(item));
  return out;
}

// `lo:step:hi` range shorthand or an explicit comma list.
std::vector<double> parse_grid_values(std::string_view value) {
  if (value.find(':') != std::string_view::npos) {
    const std::size_t first = value.find(':');
    const std::size_t second = value.find(':', first + 1);
    require(second != std::string_view::npos, ErrorCode::parse,
            "grid range must be lo:step:hi");
    const double lo = parse_double(trim(value.substr(0, first)));
    const double step = parse_double(trim(value.substr(first + 1, second - first - 1)));
    const double hi = parse_double(trim(value.substr(second + 1)));
    return WeightGrid::linear(lo, hi, step).values;
  }
  return parse_double_list(value);
}

template <std::size_t N>
std::array<double, N> parse_double_array(std::string_view key,
                                         std::string_view value) {
  const std::vector<double> items = parse_double_list(value);
  require(items.size() == N, ErrorCode::parse,
          std::string(key) + " needs exactly " + std::to_string(N) + " values");
  std::array<double, N> out{};
  std::copy(items.begin(), items.end(), out.begin());
  return out;
}

std::string join_doubles(std::span<const double> values) {
  std::string out;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += ", ";
    out += format_double(values[i]);
  }
  return out;
}

void check_weight(std::string_view key, double w) {
  require(w >= 0.0 && w <= 1.0, ErrorCode::parse,
          std::string(key) + " must lie in [0, 1]");
}

}  // namespace

void config_set(ExperimentConfig& config, std::string_view key,
                std::string_view value) {
  const std::string k(trim(key));
  const std::string_view v = trim(value);

  if (k == "scenario") {
    config.scenario = ground_truth_preset(std::string(v));
  } else if (k == "scenario.scenario_name") {
    config.scenario.scenario_name = std::string(v);
  } else if (k == "scenario.w_low.w1") {
    config.scenario.w_low.w1 = parse_double(v);
    check_weight(k, config.scenario.w_low.w1);
  } else if (k == "scenario.w_low.w2") {
    config.scenario.w_low.w2 = parse_double(v);
    check_weight(k, config.scenario.w_low.w2);
  } else if (k == "scenario.w_high.w1") {
    config.scenario.w_high.w1 = parse_double(v);
    check_weight(k, config.scenario.w_high.w1);
  } else if (k == "scenario.w_high.w2") {
    config.scenario.w_high.w2 = parse_double(v);
    check_weight(k, config.scenario.w_high.w2);
  } else if (k == "n_high_sweep") {
    std::vector<int> sweep;
    for (const auto item : split_list(v)) {
      sweep.push_back(parse_positive_int(k, item));
    }
    require(!sweep.empty(), ErrorCode::parse, "n_high_sweep must be non-empty");
    config.n_high_sweep = std::move(sweep);
  } else if (k == "n_low") {
    config.n_low = parse_positive_int(k, v);
  } else if (k == "trials") {
    config.trials = parse_positive_int(k, v);
  } else if (k == "n_test") {
    config.n_test = parse_positive_int(k, v);
  } else if (k == "methods") {
    std::vector<Method> methods;
    for (const auto item : split_list(v)) {
      methods.push_back(method_from_string(item));
    }
    require(!methods.empty(), ErrorCode::parse, "methods must be non-empty");
    config.methods = std::move(methods);
  } else if (k == "base_seed") {
    config.base_seed = parse_u64(v);
  } else if (k == "grid.values") {
    config.grid.values = parse_grid_values(v);
    require(!config.grid.values.empty(), ErrorCode::parse,
            "grid.values must be non-empty");
    for (std::size_t i = 0; i < config.grid.values.size(); ++i) {
      check_weight(k, config.grid.values[i]);
      require(i == 0 || config.grid.values[i] > config.grid.values[i - 1],
              ErrorCode::parse, "grid.values must be strictly increasing");
    }
  } else if (k == "n_ensemble") {
    config.n_ensemble = parse_positive_int(k, v);
  } else if (k == "n_prediction_samples") {
    config.n_prediction_samples = parse_positive_int(k, v);
  } else if (k == "threads") {
    config.threads = parse_positive_int(k, v);
  } else if (k == "decision.observation_samples") {
    config.decision.observation_samples = parse_positive_int(k, v);
  } else if (k == "decision.candidate_actions") {
    config.decision.candidate_actions = parse_positive_int(k, v);
  } else if (k == "decision.action_bound") {
    config.decision.action_bound = parse_double(v);
    require(config.decision.action_bound > 0.0, ErrorCode::parse,
            "decision.action_bound must be positive");
  } else if (k == "decision.duration") {
    config.decision.duration = parse_double(v);
  } else if (k == "decision.reward_scale") {
    config.decision.reward_scale = parse_double(v);
    require(config.decision.reward_scale > 0.0, ErrorCode::parse,
            "decision.reward_scale must be positive");
  } else if (k == "scenario_config.train_approach_angles") {
    config.scenario_config.train_approach_angles = parse_double_list(v);
  } else if (k == "scenario_config.test_approach_angles") {
    config.scenario_config.test_approach_angles = parse_double_list(v);
  } else if (k == "scenario_config.heading_sd") {
    config.scenario_config.heading_sd = parse_double(v);
    require(config.scenario_config.heading_sd >= 0.0, ErrorCode::parse,
            "scenario_config.heading_sd must be nonnegative");
  } else if (k == "scenario_config.airspeed") {
    config.scenario_config.airspeed = parse_double(v);
    require(config.scenario_config.airspeed > 0.0, ErrorCode::parse,
            "scenario_config.airspeed must be positive");
  } else if (k == "scenario_config.initial_range") {
    config.scenario_config.initial_range = parse_double(v);
    require(config.scenario_config.initial_range > 0.0, ErrorCode::parse,
            "scenario_config.initial_range must be positive");
  } else if (k == "scenario_config.duration") {
    config.scenario_config.duration = parse_double(v);
  } else if (k == "prior.mean") {
    config.prior_mean = parse_double_array<4>(k, v);
  } else if (k == "prior.covariance") {
    config.prior_covariance = parse_double_array<16>(k, v);
  } else {
    raise(ErrorCode::parse, "unknown config key: " + k);
  }
}

std::string config_get(const ExperimentConfig& config, std::string_view key) {
  const std::string k(trim(key));
  if (k == "scenario" || k == "scenario.scenario_name") {
    return config.scenario.scenario_name;
  }
  if (k == "scenario.w_low.w1") return format_double(config.scenario.w_low.w1);
  if (k == "scenario.w_low.w2") return format_double(config.scenario.w_low.w2);
  if (k == "scenario.w_high.w1") return format_double(config.scenario.w_high.w1);
  if (k == "scenario.w_high.w2") return format_double(config.scenario.w_high.w2);
  if (k == "n_high_sweep") {
    std::string out;
    for (std::size_t i = 0; i < config.n_high_sweep.size(); ++i) {
      if (i > 0) out += ", ";
      out += std::to_string(config.n_high_sweep[i]);
    }
    return out;
  }
  if (k == "n_low") return std::to_string(config.n_low);
  if (k == "trials") return std::to_string(config.trials);
  if (k == "n_test") return std::to_string(config.n_test);
  if (k == "methods") {
    std::string out;
    for (std::size_t i = 0; i < config.methods.size(); ++i) {
      if (i > 0) out += ", ";
      out += to_string(config.methods[i]);
    }
    return out;
  }
  if (k == "base_seed") return std::to_string(config.base_seed);
  if (k == "grid.values") return join_doubles(config.grid.values);
  if (k == "n_ensemble") return std::to_string(config.n_ensemble);
  if (k == "n_prediction_samples") {
    return std::to_string(config.n_prediction_samples);
  }
  if (k == "threads") return std::to_string(config.threads);
  if (k == "decision.observation_samples") {
    return std::to_string(config.decision.observation_samples);
  }
  if (k == "decision.candidate_actions") {
    return std::to_string(config.decision.candidate_actions);
  }
  if (k == "decision.action_bound") {
    return format_double(config.decision.action_bound);
  }
  if (k == "decision.duration") return format_double(config.decision.duration);
  if (k == "decision.reward_scale") {
    return format_double(config.decision.reward_scale);
  }
  if (k == "scenario_config.train_approach_angles") {
    return join_doubles(config.scenario_config.train_approach_angles);
  }
  if (k == "scenario_config.test_approach_angles") {
    return join_doubles(config.scenario_config.test_approach_angles);
  }
  if (k == "scenario_config.heading_sd") {
    return format_double(config.scenario_config.heading_sd);
  }
  if (k == "scenario_config.airspeed") {
    return format_double(config.scenario_config.airspeed);
  }
  if (k == "scenario_config.initial_range") {
    return format_double(config.scenario_config.initial_range);
  }
  if (k == "scenario_config.duration") {
    return format_double(config.scenario_config.duration);
  }
  if (k == "prior.mean") {
    return join_doubles(config.coupling_prior().mean);
  }
  if (k == "prior.covariance") {
    return join_doubles(config.coupling_prior().covariance);
  }
  raise(ErrorCode::parse, "unknown config key: " + k);
}

ExperimentConfig parse_config(std::string_view text) {
  ExperimentConfig config;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t nl = text.find('\n', start);
    std::string_view line = nl == std::string_view::npos
                                ? text.substr(start)
                                : text.substr(start, nl - start);
    ++line_no;
    const std::size_t hash = line.find('#');
    if (hash != std::string_view::npos) line = line.substr(0, hash);
    line = trim(line);
    if (!line.empty()) {
      const std::size_t eq = line.find('=');
      require(eq != std::string_view::npos, ErrorCode::parse,
              "line " + std::to_string(line_no) + ": expected key = value");
      config_set(config, line.substr(0, eq), line.substr(eq + 1));
    }
    if (nl == std::string_view::npos) break;
    start = nl + 1;
  }
  return config;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

namespace {

constexpr const char* kAllKeys[] = {
    "scenario.scenario_name",
    "scenario.w_low.w1",
    "scenario.w_low.w2",
    "scenario.w_high.w1",
    "scenario.w_high.w2",
    "n_high_sweep",
    "n_low",
    "trials",
    "n_test",
    "methods",
    "base_seed",
    "grid.values",
    "n_ensemble",
    "n_prediction_samples",
    "threads",
    "decision.observation_samples",
    "decision.candidate_actions",
    "decision.action_bound",
    "decision.duration",
    "decision.reward_scale",
    "scenario_config.train_approach_angles",
    "scenario_config.test_approach_angles",
    "scenario_config.heading_sd",
    "scenario_config.airspeed",
    "scenario_config.initial_range",
    "scenario_config.duration",
    "prior.mean",
    "prior.covariance",
};

}  // namespace

std::vector<std::pair<std::string, std::string>> config_items(
    const ExperimentConfig& config) {
  std::vector<std::pair<std::string, std::string>> items;
  for (const char* key : kAllKeys) {
    items.emplace_back(key, config_get(config, key));
  }
  return items;
}

std::string config_to_string(const ExperimentConfig& config) {
  std::string out;
  for (const auto& [key, value] : config_items(config)) {
    out += key;
    out += " = ";
    out += value;
    out += '\n';
  }
  return out;
}

}  // namespace selfsep
