#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "selfsep/modelbased.hpp"
#include "selfsep/scenario.hpp"
#include "selfsep/types.hpp"

namespace selfsep {

enum class Method { lw_hf, lw_mf, map_hf, map_mf, bayes_mf };

const char* to_string(Method method);
Method method_from_string(std::string_view name);

// Stable integer used in seed derivation; must never be renumbered.
uint64_t method_id(Method method);

bool method_uses_low_fidelity(Method method);
bool method_model_based(Method method);

struct ExperimentConfig {
  GroundTruth scenario = ground_truth_preset("identical");
  std::vector<int> n_high_sweep{5, 10, 20, 50, 100, 200};
  int n_low = 1000;
  int trials = 10;
  int n_test = 100;
  std::vector<Method> methods{Method::lw_hf, Method::lw_mf, Method::map_hf,
                              Method::map_mf, Method::bayes_mf};
  uint64_t base_seed = 0;
  WeightGrid grid = WeightGrid::linear(0.80, 0.99, 0.01);
  int n_ensemble = 1000;
  int n_prediction_samples = 10;
  int threads = 1;
  DecisionParams decision;
  ScenarioConfig scenario_config;

  // Coupling prior defaults derive from the scenario's ground truth; these
  // override mean and covariance when set.
  std::optional<std::array<double, 4>> prior_mean;
  std::optional<std::array<double, 16>> prior_covariance;

  CouplingPrior coupling_prior() const;
};

// Applies one `key = value` assignment using the dotted key names of the
// config file; unknown keys raise a parse error.
void config_set(ExperimentConfig& config, std::string_view key,
                std::string_view value);

// Formatted value of one key, in the same syntax config_set accepts.
std::string config_get(const ExperimentConfig& config, std::string_view key);

// Parses `key = value` lines; '#' starts a comment, blank lines are skipped.
ExperimentConfig parse_config(std::string_view text);
ExperimentConfig load_config(const std::filesystem::path& path);

// Every key with its formatted value, in a stable order.
std::vector<std::pair<std::string, std::string>> config_items(
    const ExperimentConfig& config);

// Full dump, one key per line, readable back by parse_config.
std::string config_to_string(const ExperimentConfig& config);

}  // namespace selfsep
