// Command-line front end; talks to the toolkit exclusively through the C API.

#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "selfsep/selfsep.h"

namespace {

struct ConfigOptions {
  std::string config_path;
  std::vector<std::string> overrides;  // key=value pairs, applied in order
  std::optional<uint64_t> seed;
  std::optional<int> threads;
};

void add_config_options(CLI::App* cmd, ConfigOptions& options) {
  cmd->add_option("-c,--config", options.config_path,
                  "configuration file (key = value lines)");
  cmd->add_option("--set", options.overrides,
                  "override one config key (key=value, repeatable)");
  cmd->add_option("--seed", options.seed, "override base_seed");
  cmd->add_option("--threads", options.threads, "override worker thread count");
}

int fail(selfsep_status status) {
  std::fprintf(stderr, "error: %s: %s\n", selfsep_status_name(status),
               selfsep_last_error());
  return static_cast<int>(status);
}

// Builds the resolved config: file first, then --set pairs, then the
// dedicated flags.  Returns nullptr after printing the failure.
selfsep_config* make_config(const ConfigOptions& options) {
  selfsep_config* config = nullptr;
  selfsep_status status =
      options.config_path.empty()
          ? selfsep_config_create(&config)
          : selfsep_config_load(options.config_path.c_str(), &config);
  if (status != SELFSEP_OK) {
    fail(status);
    return nullptr;
  }
  for (const std::string& pair : options.overrides) {
    const std::size_t eq = pair.find('=');
    if (eq == std::string::npos) {
      std::fprintf(stderr, "error: --set expects key=value, got '%s'\n",
                   pair.c_str());
      selfsep_config_destroy(config);
      return nullptr;
    }
    status = selfsep_config_set(config, pair.substr(0, eq).c_str(),
                                pair.substr(eq + 1).c_str());
    if (status != SELFSEP_OK) {
      fail(status);
      selfsep_config_destroy(config);
      return nullptr;
    }
  }
  const auto set_or_fail = [&](const char* key, const std::string& value) {
    status = selfsep_config_set(config, key, value.c_str());
    if (status != SELFSEP_OK) {
      fail(status);
      selfsep_config_destroy(config);
      config = nullptr;
    }
    return config != nullptr;
  };
  if (options.seed && !set_or_fail("base_seed", std::to_string(*options.seed))) {
    return nullptr;
  }
  if (options.threads &&
      !set_or_fail("threads", std::to_string(*options.threads))) {
    return nullptr;
  }
  return config;
}

const char* opt_cstr(const std::string& s) {
  return s.empty() ? nullptr : s.c_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-separation game simulator and multi-fidelity predictor "
               "benchmark"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(selfsep_version()));

  ConfigOptions options;

  auto* generate = app.add_subcommand(
      "generate", "simulate encounters and write a dataset CSV");
  std::string split;
  std::string fidelity;
  uint64_t count = 0;
  std::string output;
  add_config_options(generate, options);
  generate->add_option("--split", split, "train or test")
      ->required()
      ->check(CLI::IsMember({"train", "test"}));
  generate->add_option("--fidelity", fidelity, "low or high")
      ->required()
      ->check(CLI::IsMember({"low", "high"}));
  generate->add_option("-n,--count", count, "number of encounters")->required();
  generate->add_option("-o,--output", output, "output CSV path")->required();

  auto* ensemble = app.add_subcommand(
      "ensemble", "build the per-weight-combination action ensemble cache");
  add_config_options(ensemble, options);
  ensemble->add_option("--fidelity", fidelity, "low or high")
      ->required()
      ->check(CLI::IsMember({"low", "high"}));
  ensemble->add_option("-o,--output", output, "output cache CSV path")
      ->required();

  auto* fit = app.add_subcommand(
      "fit", "estimate utility weights from training data");
  std::string method;
  std::string high_csv;
  std::string low_csv;
  std::string ensemble_low_csv;
  std::string ensemble_high_csv;
  add_config_options(fit, options);
  fit->add_option("--method", method, "map-hf, map-mf, or bayes-mf")->required();
  fit->add_option("--high", high_csv, "high-fidelity training CSV")->required();
  fit->add_option("--low", low_csv, "low-fidelity training CSV");
  fit->add_option("--ensemble-low", ensemble_low_csv,
                  "low-fidelity ensemble cache CSV");
  fit->add_option("--ensemble-high", ensemble_high_csv,
                  "high-fidelity ensemble cache CSV");

  auto* predict = app.add_subcommand(
      "predict", "fit a method and score it against a test CSV");
  std::string test_csv;
  add_config_options(predict, options);
  predict->add_option("--method", method, "prediction method")->required();
  predict->add_option("--high", high_csv, "high-fidelity training CSV")
      ->required();
  predict->add_option("--low", low_csv, "low-fidelity training CSV");
  predict->add_option("--ensemble-low", ensemble_low_csv,
                      "low-fidelity ensemble cache CSV");
  predict->add_option("--ensemble-high", ensemble_high_csv,
                      "high-fidelity ensemble cache CSV");
  predict->add_option("--test", test_csv, "test dataset CSV")->required();

  auto* sweep = app.add_subcommand(
      "sweep", "run the full benchmark sweep and write results");
  std::string out_dir;
  bool svg = false;
  add_config_options(sweep, options);
  sweep->add_option("-o,--out-dir", out_dir, "output directory")->required();
  sweep->add_flag("--svg", svg, "also render curves.svg");

  auto* plot = app.add_subcommand(
      "plot", "aggregate a raw results CSV into an efficiency-curve SVG");
  std::string raw_csv;
  std::string title;
  plot->add_option("--raw", raw_csv, "raw results CSV")->required();
  plot->add_option("-o,--output", output, "output SVG path")->required();
  plot->add_option("--title", title, "plot title");

  CLI11_PARSE(app, argc, argv);

  if (plot->parsed()) {
    const selfsep_status status =
        selfsep_plot(raw_csv.c_str(), opt_cstr(title), output.c_str());
    return status == SELFSEP_OK ? 0 : fail(status);
  }

  selfsep_config* config = make_config(options);
  if (config == nullptr) return 1;

  selfsep_status status = SELFSEP_OK;
  if (generate->parsed()) {
    status = selfsep_generate(config, split.c_str(), fidelity.c_str(), count,
                              output.c_str());
  } else if (ensemble->parsed()) {
    status = selfsep_ensemble(config, fidelity.c_str(), output.c_str());
  } else if (fit->parsed()) {
    double w1 = 0.0;
    double w2 = 0.0;
    status = selfsep_fit(config, method.c_str(), high_csv.c_str(),
                         opt_cstr(low_csv), opt_cstr(ensemble_low_csv),
                         opt_cstr(ensemble_high_csv), &w1, &w2);
    if (status == SELFSEP_OK) std::printf("w1 = %.6g\nw2 = %.6g\n", w1, w2);
  } else if (predict->parsed()) {
    double error = 0.0;
    double lower_bound = 0.0;
    double efficiency = 0.0;
    int exact = 0;
    status = selfsep_score(config, method.c_str(), high_csv.c_str(),
                           opt_cstr(low_csv), opt_cstr(ensemble_low_csv),
                           opt_cstr(ensemble_high_csv), test_csv.c_str(),
                           &error, &lower_bound, &efficiency, &exact);
    if (status == SELFSEP_OK) {
      std::printf("D = %.10g\nD_lb = %.10g\n", error, lower_bound);
      if (exact != 0) {
        std::printf("efficiency = exact\n");
      } else {
        std::printf("efficiency = %.10g\n", efficiency);
      }
    }
  } else if (sweep->parsed()) {
    status = selfsep_sweep(config, out_dir.c_str(), svg ? 1 : 0);
  }

  selfsep_config_destroy(config);
  return status == SELFSEP_OK ? 0 : fail(status);
}
