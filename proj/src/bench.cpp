#include "selfsep/bench.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <mutex>
#include <thread>

#include <json.hpp>

#include "selfsep/csv.hpp"
#include "selfsep/error.hpp"
#include "selfsep/modelfree.hpp"
#include "selfsep/svg.hpp"

namespace selfsep {

double test_set_error(std::span<const JointAction> predicted,
                      std::span<const JointAction> actual) {
  require(predicted.size() == actual.size() && !predicted.empty(),
          ErrorCode::invalid_argument,
          "prediction and test lists must have equal non-zero length");
  double total = 0.0;
  for (std::size_t i = 0; i < predicted.size(); ++i) {
    total += std::hypot(predicted[i].a1 - actual[i].a1,
                        predicted[i].a2 - actual[i].a2);
  }
  return total;
}

double lower_bound_error(const Dataset& test, const GroundTruth& truth,
                         const DecisionParams& params, int n_samples,
                         const RandomSource& rng) {
  require(!test.empty(), ErrorCode::invalid_argument, "test set is empty");
  const FidelityModel fidelity = FidelityModel::high();
  std::vector<JointAction> predicted;
  predicted.reserve(test.size());
  for (std::size_t i = 0; i < test.size(); ++i) {
    predicted.push_back(predict_map(test[i].sample.geometry, truth.w_high,
                                    fidelity, params, n_samples,
                                    rng.substream(i)));
  }
  return test_set_error(predicted, dataset_actions(test));
}

std::optional<double> predictive_efficiency(double error, double lower_bound) {
  require(error >= 0.0 && lower_bound >= 0.0, ErrorCode::invalid_argument,
          "errors must be nonnegative");
  if (error < kExactThreshold) return std::nullopt;
  return lower_bound / error;
}

uint64_t cell_seed(uint64_t base_seed, Method method, int n_high, int trial) {
  uint64_t s = mix64(base_seed, hash_label("cell"));
  s = mix64(s, method_id(method));
  s = mix64(s, static_cast<uint64_t>(n_high));
  return mix64(s, static_cast<uint64_t>(trial));
}

uint64_t shared_seed(uint64_t base_seed, std::string_view label, int n_high,
                     int trial) {
  uint64_t s = mix64(base_seed, hash_label(label));
  s = mix64(s, static_cast<uint64_t>(n_high));
  return mix64(s, static_cast<uint64_t>(trial));
}

ModelContext build_model_context(const ExperimentConfig& config, bool need_low,
                                 bool need_high) {
  ModelContext context;
  if (!need_low && !need_high) return context;

  const RandomSource base(config.base_seed);
  const std::vector<EncounterGeometry> novel = sample_novel_encounters(
      static_cast<std::size_t>(config.n_ensemble), config.scenario_config,
      base.substream("novel"));
  const RandomSource ensemble_rng = base.substream("ensemble");

  if (need_low) {
    context.ensemble_low = build_action_ensemble(
        config.grid, novel, FidelityModel::low(), config.decision,
        ensemble_rng.substream("low"));
    context.densities_low = fit_densities(*context.ensemble_low);
  }
  if (need_high) {
    context.ensemble_high = build_action_ensemble(
        config.grid, novel, FidelityModel::high(), config.decision,
        ensemble_rng.substream("high"));
    context.densities_high = fit_densities(*context.ensemble_high);
  }
  return context;
}

std::vector<JointAction> predict_with_method(const ExperimentConfig& config,
                                             const ModelContext& context,
                                             Method method,
                                             const Dataset& train_h,
                                             const Dataset& train_l,
                                             const Dataset& test,
                                             const RandomSource& predict_rng) {
  const FidelityModel high = FidelityModel::high();
  std::vector<JointAction> predicted;
  predicted.reserve(test.size());

  switch (method) {
    case Method::lw_hf: {
      const LwPredictor predictor = fit_lw_hf(train_h);
      for (const auto& r : test) {
        predicted.push_back(
            predictor.predict(geometry_features(r.sample.geometry)));
      }
      break;
    }
    case Method::lw_mf: {
      const LwMfPredictor predictor = fit_lw_mf(train_l, train_h);
      for (const auto& r : test) {
        predicted.push_back(predictor.predict(r.sample.geometry));
      }
      break;
    }
    case Method::map_hf:
    case Method::map_mf: {
      const UtilityWeights w =
          method == Method::map_hf
              ? fit_map_hf(train_h, *context.ensemble_high,
                           *context.densities_high)
              : fit_map_mf(train_l, train_h, *context.ensemble_low,
                           *context.densities_low, *context.ensemble_high,
                           *context.densities_high);
      for (std::size_t i = 0; i < test.size(); ++i) {
        predicted.push_back(predict_map(test[i].sample.geometry, w, high,
                                        config.decision,
                                        config.n_prediction_samples,
                                        predict_rng.substream(i)));
      }
      break;
    }
    case Method::bayes_mf: {
      const auto actions_h = dataset_actions(train_h);
      const auto actions_l = dataset_actions(train_l);
      const LikelihoodTable table_h = build_likelihood_table(
          actions_h, *context.ensemble_high, *context.densities_high);
      const LikelihoodTable table_l = build_likelihood_table(
          actions_l, *context.ensemble_low, *context.densities_low);
      const PosteriorTable posterior =
          weight_posterior(table_h, table_l, config.coupling_prior());
      for (std::size_t i = 0; i < test.size(); ++i) {
        predicted.push_back(predict_bayes(test[i].sample.geometry, posterior,
                                          high, config.decision,
                                          config.n_prediction_samples,
                                          predict_rng.substream(i)));
      }
      break;
    }
  }
  return predicted;
}

TrialResult run_condition(const ExperimentConfig& config,
                          const ModelContext& context, Method method,
                          int n_high, int trial) {
  require(n_high >= 1, ErrorCode::invalid_argument, "n_high must be >= 1");
  require(trial >= 0, ErrorCode::invalid_argument, "trial must be >= 0");

  const uint64_t seed = cell_seed(config.base_seed, method, n_high, trial);
  const RandomSource cell(seed);

  const Dataset train_h = generate_dataset(
      static_cast<std::size_t>(n_high), Split::train, FidelityModel::high(),
      config.scenario, config.scenario_config, config.decision,
      cell.substream("train_high"));
  Dataset train_l;
  if (method_uses_low_fidelity(method)) {
    train_l = generate_dataset(static_cast<std::size_t>(config.n_low),
                               Split::train, FidelityModel::low(),
                               config.scenario, config.scenario_config,
                               config.decision, cell.substream("train_low"));
  }

  // Test set and lower bound are functions of (base_seed, n_high, trial)
  // only, so every method in a cell is scored against identical data.
  const Dataset test = generate_dataset(
      static_cast<std::size_t>(config.n_test), Split::test,
      FidelityModel::high(), config.scenario, config.scenario_config,
      config.decision,
      RandomSource(shared_seed(config.base_seed, "test_set", n_high, trial)));
  const double lower_bound = lower_bound_error(
      test, config.scenario, config.decision, config.n_prediction_samples,
      RandomSource(shared_seed(config.base_seed, "lower_bound", n_high, trial)));

  const std::vector<JointAction> predicted =
      predict_with_method(config, context, method, train_h, train_l, test,
                          cell.substream("predict"));
  const double error = test_set_error(predicted, dataset_actions(test));

  TrialResult result;
  result.scenario = config.scenario.scenario_name;
  result.method = method;
  result.n_high = n_high;
  result.n_low = config.n_low;
  result.trial = trial;
  result.seed = seed;
  result.error = error;
  result.lower_bound = lower_bound;
  result.efficiency = predictive_efficiency(error, lower_bound);
  return result;
}

TrialResult run_condition(const ExperimentConfig& config, Method method,
                          int n_high, int trial) {
  const bool model_based = method_model_based(method);
  const ModelContext context = build_model_context(
      config, model_based && method_uses_low_fidelity(method), model_based);
  return run_condition(config, context, method, n_high, trial);
}

std::vector<CurvePoint> aggregate_curves(std::span<const TrialResult> raw) {
  std::vector<CurvePoint> curves;
  for (const auto& r : raw) {
    auto it = std::find_if(curves.begin(), curves.end(), [&](const CurvePoint& c) {
      return c.method == r.method && c.n_high == r.n_high &&
             c.scenario == r.scenario;
    });
    if (it == curves.end()) {
      CurvePoint point;
      point.scenario = r.scenario;
      point.method = r.method;
      point.n_high = r.n_high;
      curves.push_back(point);
      it = curves.end() - 1;
    }
    if (r.efficiency) {
      it->mean_efficiency =
          it->mean_efficiency.value_or(0.0) + *r.efficiency;
      ++it->trials;
    }
  }
  // First pass accumulated sums; convert to means, then a second pass over
  // the raw rows accumulates squared deviations for the standard error.
  for (auto& c : curves) {
    if (c.trials > 0) *c.mean_efficiency /= static_cast<double>(c.trials);
  }
  for (auto& c : curves) {
    if (c.trials < 2) continue;
    double ss = 0.0;
    for (const auto& r : raw) {
      if (r.method == c.method && r.n_high == c.n_high &&
          r.scenario == c.scenario && r.efficiency) {
        const double d = *r.efficiency - *c.mean_efficiency;
        ss += d * d;
      }
    }
    const double n = static_cast<double>(c.trials);
    c.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return curves;
}

std::string raw_results_to_csv(std::span<const TrialResult> raw) {
  std::string out(kRawResultsHeader);
  out += '\n';
  for (const auto& r : raw) {
    out += r.scenario;
    out += ',';
    out += to_string(r.method);
    out += ',';
    out += std::to_string(r.n_high);
    out += ',';
    out += std::to_string(r.n_low);
    out += ',';
    out += std::to_string(r.trial);
    out += ',';
    out += std::to_string(r.seed);
    out += ',';
    out += format_double(r.error);
    out += ',';
    out += format_double(r.lower_bound);
    out += ',';
    out += r.efficiency ? format_double(*r.efficiency) : "exact";
    out += '\n';
  }
  return out;
}

std::vector<TrialResult> raw_results_from_csv(std::istream& in) {
  std::string line;
  require(static_cast<bool>(std::getline(in, line)), ErrorCode::parse,
          "empty results file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  require(line == kRawResultsHeader, ErrorCode::parse,
          "unexpected results header: " + line);
  std::vector<TrialResult> raw;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = split_fields(line);
    require(f.size() == 9, ErrorCode::parse,
            "results row needs 9 fields, got " + std::to_string(f.size()));
    TrialResult r;
    r.scenario = std::string(f[0]);
    r.method = method_from_string(f[1]);
    r.n_high = static_cast<int>(parse_u64(f[2]));
    r.n_low = static_cast<int>(parse_u64(f[3]));
    r.trial = static_cast<int>(parse_u64(f[4]));
    r.seed = parse_u64(f[5]);
    r.error = parse_double(f[6]);
    r.lower_bound = parse_double(f[7]);
    if (f[8] == "exact") {
      r.efficiency = std::nullopt;
    } else {
      r.efficiency = parse_double(f[8]);
    }
    raw.push_back(std::move(r));
  }
  return raw;
}

std::vector<TrialResult> read_raw_results(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorCode::io, "cannot open " + path.string());
  return raw_results_from_csv(in);
}

std::string curves_to_csv(std::span<const CurvePoint> curves) {
  std::string out(kCurvesHeader);
  out += '\n';
  for (const auto& c : curves) {
    out += c.scenario;
    out += ',';
    out += to_string(c.method);
    out += ',';
    out += std::to_string(c.n_high);
    out += ',';
    out += c.mean_efficiency ? format_double(*c.mean_efficiency) : "exact";
    out += ',';
    out += c.mean_efficiency ? format_double(c.std_error) : "exact";
    out += ',';
    out += std::to_string(c.trials);
    out += '\n';
  }
  return out;
}

std::string sweep_metadata_json(const ExperimentConfig& config) {
  nlohmann::json meta;
  nlohmann::json cfg = nlohmann::json::object();
  for (const auto& [key, value] : config_items(config)) {
    cfg[key] = value;
  }
  meta["config"] = cfg;
  meta["notes"] = nlohmann::json::array(
      {"test set and lower bound are shared across methods within each "
       "(n_high, trial) cell",
       "training sets are drawn fresh per (method, n_high, trial) cell",
       "efficiency sentinel `exact` rows are excluded from curve means; the "
       "`trials` column counts the rows included"});
  return meta.dump(2) + "\n";
}

SweepResult run_sweep(const ExperimentConfig& config,
                      const std::optional<std::filesystem::path>& out_dir,
                      bool write_svg) {
  require(config.trials >= 1, ErrorCode::invalid_argument, "trials must be >= 1");
  require(!config.methods.empty(), ErrorCode::invalid_argument,
          "methods must be non-empty");
  require(!config.n_high_sweep.empty(), ErrorCode::invalid_argument,
          "n_high_sweep must be non-empty");

  bool need_low = false;
  bool need_high = false;
  for (const Method m : config.methods) {
    if (method_model_based(m)) {
      need_high = true;
      if (method_uses_low_fidelity(m)) need_low = true;
    }
  }
  const ModelContext context = build_model_context(config, need_low, need_high);

  struct Cell {
    Method method;
    int n_high;
    int trial;
  };
  std::vector<Cell> cells;
  for (const Method method : config.methods) {
    for (const int n_high : config.n_high_sweep) {
      for (int trial = 0; trial < config.trials; ++trial) {
        cells.push_back(Cell{method, n_high, trial});
      }
    }
  }

  if (out_dir) std::filesystem::create_directories(*out_dir);

  std::vector<TrialResult> raw(cells.size());
  std::vector<bool> done(cells.size(), false);
  std::mutex flush_mutex;
  std::size_t next_cell = 0;
  std::mutex queue_mutex;
  std::exception_ptr first_failure;

  auto flush_partial = [&] {
    if (!out_dir) return;
    std::vector<TrialResult> completed;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (done[i]) completed.push_back(raw[i]);
    }
    atomic_write_file(*out_dir / "raw.partial.csv",
                      raw_results_to_csv(completed));
  };

  auto worker = [&] {
    while (true) {
      std::size_t index;
      {
        std::lock_guard<std::mutex> lock(queue_mutex);
        if (first_failure || next_cell >= cells.size()) return;
        index = next_cell++;
      }
      const Cell& cell = cells[index];
      try {
        TrialResult result = run_condition(config, context, cell.method,
                                           cell.n_high, cell.trial);
        std::lock_guard<std::mutex> lock(flush_mutex);
        raw[index] = std::move(result);
        done[index] = true;
        flush_partial();
      } catch (...) {
        std::lock_guard<std::mutex> lock(queue_mutex);
        if (!first_failure) first_failure = std::current_exception();
        return;
      }
    }
  };

  const std::size_t n_workers = std::min<std::size_t>(
      static_cast<std::size_t>(std::max(config.threads, 1)), cells.size());
  if (n_workers <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (std::size_t i = 0; i < n_workers; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (first_failure) std::rethrow_exception(first_failure);

  SweepResult result;
  result.raw = std::move(raw);
  result.curves = aggregate_curves(result.raw);

  if (out_dir) {
    atomic_write_file(*out_dir / "raw.csv", raw_results_to_csv(result.raw));
    atomic_write_file(*out_dir / "curves.csv", curves_to_csv(result.curves));
    atomic_write_file(*out_dir / "meta.json", sweep_metadata_json(config));
    if (write_svg) {
      atomic_write_file(*out_dir / "curves.svg",
                        render_curves_svg(result.curves,
                                          config.scenario.scenario_name));
    }
    std::error_code ec;
    std::filesystem::remove(*out_dir / "raw.partial.csv", ec);
  }
  return result;
}

}  // namespace selfsep
