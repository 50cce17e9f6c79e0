#include "selfsep/selfsep.h"

#include <cstring>
#include <memory>
#include <string>

#include "selfsep/bench.hpp"
#include "selfsep/config.hpp"
#include "selfsep/csv.hpp"
#include "selfsep/error.hpp"
#include "selfsep/modelbased.hpp"
#include "selfsep/scenario.hpp"
#include "selfsep/svg.hpp"

struct selfsep_config {
  selfsep::ExperimentConfig cfg;
};

namespace {

thread_local std::string g_last_error;

selfsep_status to_status(selfsep::ErrorCode code) {
  return static_cast<selfsep_status>(static_cast<int>(code));
}

template <typename Fn>
selfsep_status guarded(Fn&& fn) {
  try {
    fn();
    g_last_error.clear();
    return SELFSEP_OK;
  } catch (const selfsep::Error& e) {
    g_last_error = e.what();
    return to_status(e.code());
  } catch (const std::exception& e) {
    g_last_error = e.what();
    return SELFSEP_ERR_INTERNAL;
  } catch (...) {
    g_last_error = "unknown error";
    return SELFSEP_ERR_INTERNAL;
  }
}

void require_arg(bool ok, const char* message) {
  selfsep::require(ok, selfsep::ErrorCode::invalid_argument, message);
}

selfsep::Fidelity parse_fidelity_name(const char* fidelity) {
  require_arg(fidelity != nullptr, "fidelity is null");
  const std::string_view f(fidelity);
  if (f == "low") return selfsep::Fidelity::low;
  if (f == "high") return selfsep::Fidelity::high;
  selfsep::raise(selfsep::ErrorCode::invalid_argument,
                 "fidelity must be low or high");
}

// Ensembles for the explicit fit/score entry points: loaded from a cache
// written by selfsep_ensemble when a path is given, simulated from the
// config's base seed otherwise (the same streams the sweep uses).
selfsep::ModelContext context_for_method(const selfsep::ExperimentConfig& cfg,
                                         selfsep::Method method,
                                         const char* ensemble_low_csv,
                                         const char* ensemble_high_csv) {
  using namespace selfsep;
  if (!method_model_based(method)) return ModelContext{};
  const bool need_low = method_uses_low_fidelity(method);

  ModelContext context;
  const RandomSource base(cfg.base_seed);
  const RandomSource ensemble_rng = base.substream("ensemble");

  std::vector<EncounterGeometry> novel;
  const auto simulate = [&](Fidelity fid) {
    if (novel.empty()) {
      novel = sample_novel_encounters(static_cast<std::size_t>(cfg.n_ensemble),
                                      cfg.scenario_config,
                                      base.substream("novel"));
    }
    return build_action_ensemble(cfg.grid, novel, FidelityModel::for_fidelity(fid),
                                 cfg.decision,
                                 ensemble_rng.substream(to_string(fid)));
  };

  if (ensemble_high_csv != nullptr) {
    context.ensemble_high = ensemble_from_cache_rows(
        read_ensemble_rows(ensemble_high_csv), cfg.grid, Fidelity::high);
  } else {
    context.ensemble_high = simulate(Fidelity::high);
  }
  context.densities_high = fit_densities(*context.ensemble_high);

  if (need_low) {
    if (ensemble_low_csv != nullptr) {
      context.ensemble_low = ensemble_from_cache_rows(
          read_ensemble_rows(ensemble_low_csv), cfg.grid, Fidelity::low);
    } else {
      context.ensemble_low = simulate(Fidelity::low);
    }
    context.densities_low = fit_densities(*context.ensemble_low);
  }
  return context;
}

selfsep::Dataset load_required(const char* path, const char* what) {
  require_arg(path != nullptr, what);
  return selfsep::read_dataset(path);
}

}  // namespace

extern "C" {

const char* selfsep_version(void) { return "0.1.0"; }

const char* selfsep_status_name(selfsep_status status) {
  switch (status) {
    case SELFSEP_OK: return "ok";
    case SELFSEP_ERR_INVALID_ARGUMENT: return "invalid_argument";
    case SELFSEP_ERR_INVALID_STATE: return "invalid_state";
    case SELFSEP_ERR_INFEASIBLE_GEOMETRY: return "infeasible_geometry";
    case SELFSEP_ERR_IO: return "io";
    case SELFSEP_ERR_PARSE: return "parse";
    case SELFSEP_ERR_NUMERIC: return "numeric";
    case SELFSEP_ERR_UNSUPPORTED: return "unsupported";
    case SELFSEP_ERR_INTERNAL: return "internal";
  }
  return "unknown";
}

const char* selfsep_last_error(void) { return g_last_error.c_str(); }

selfsep_status selfsep_config_create(selfsep_config** out) {
  return guarded([&] {
    require_arg(out != nullptr, "out is null");
    *out = new selfsep_config{};
  });
}

selfsep_status selfsep_config_load(const char* path, selfsep_config** out) {
  return guarded([&] {
    require_arg(path != nullptr && out != nullptr, "path or out is null");
    auto config = std::make_unique<selfsep_config>();
    config->cfg = selfsep::load_config(path);
    *out = config.release();
  });
}

selfsep_status selfsep_config_set(selfsep_config* config, const char* key,
                                  const char* value) {
  return guarded([&] {
    require_arg(config != nullptr && key != nullptr && value != nullptr,
                "config, key, and value must be non-null");
    selfsep::config_set(config->cfg, key, value);
  });
}

selfsep_status selfsep_config_get(const selfsep_config* config, const char* key,
                                  char* buffer, size_t size, size_t* required) {
  return guarded([&] {
    require_arg(config != nullptr && key != nullptr,
                "config and key must be non-null");
    const std::string value = selfsep::config_get(config->cfg, key);
    if (required != nullptr) *required = value.size();
    if (buffer != nullptr && size > 0) {
      const size_t n = std::min(size - 1, value.size());
      std::memcpy(buffer, value.data(), n);
      buffer[n] = '\0';
    }
  });
}

void selfsep_config_destroy(selfsep_config* config) { delete config; }

selfsep_status selfsep_generate(const selfsep_config* config, const char* split,
                                const char* fidelity, uint64_t n,
                                const char* out_path) {
  return guarded([&] {
    using namespace selfsep;
    require_arg(config != nullptr && split != nullptr && out_path != nullptr,
                "config, split, and out_path must be non-null");
    const std::string_view split_name(split);
    require_arg(split_name == "train" || split_name == "test",
                "split must be train or test");
    const Fidelity fid = parse_fidelity_name(fidelity);
    const auto& cfg = config->cfg;
    const RandomSource rng = RandomSource(cfg.base_seed)
                                 .substream("generate")
                                 .substream(split_name)
                                 .substream(to_string(fid));
    const Dataset data = generate_dataset(
        n, split_name == "train" ? Split::train : Split::test,
        FidelityModel::for_fidelity(fid), cfg.scenario, cfg.scenario_config,
        cfg.decision, rng);
    write_dataset(data, out_path);
  });
}

selfsep_status selfsep_ensemble(const selfsep_config* config,
                                const char* fidelity, const char* out_path) {
  return guarded([&] {
    using namespace selfsep;
    require_arg(config != nullptr && out_path != nullptr,
                "config and out_path must be non-null");
    const Fidelity fid = parse_fidelity_name(fidelity);
    const auto& cfg = config->cfg;
    const RandomSource base(cfg.base_seed);
    const std::vector<EncounterGeometry> novel = sample_novel_encounters(
        static_cast<std::size_t>(cfg.n_ensemble), cfg.scenario_config,
        base.substream("novel"));
    const RandomSource combo_rng =
        base.substream("ensemble").substream(to_string(fid));
    const ActionEnsemble ensemble =
        build_action_ensemble(cfg.grid, novel, FidelityModel::for_fidelity(fid),
                              cfg.decision, combo_rng);
    write_ensemble_rows(ensemble_cache_rows(ensemble, combo_rng), out_path);
  });
}

selfsep_status selfsep_fit(const selfsep_config* config, const char* method,
                           const char* high_csv, const char* low_csv,
                           const char* ensemble_low_csv,
                           const char* ensemble_high_csv, double* w1,
                           double* w2) {
  return guarded([&] {
    using namespace selfsep;
    require_arg(config != nullptr && method != nullptr && w1 != nullptr &&
                    w2 != nullptr,
                "config, method, w1, and w2 must be non-null");
    const Method m = method_from_string(method);
    require(method_model_based(m), ErrorCode::unsupported,
            "only model-based methods have fitted weights");
    const auto& cfg = config->cfg;

    const Dataset train_h = load_required(high_csv, "high_csv is null");
    Dataset train_l;
    if (method_uses_low_fidelity(m)) {
      train_l = load_required(low_csv, "low_csv is required for this method");
    }
    const ModelContext context =
        context_for_method(cfg, m, ensemble_low_csv, ensemble_high_csv);

    UtilityWeights w{};
    if (m == Method::map_hf) {
      w = fit_map_hf(train_h, *context.ensemble_high, *context.densities_high);
    } else if (m == Method::map_mf) {
      w = fit_map_mf(train_l, train_h, *context.ensemble_low,
                     *context.densities_low, *context.ensemble_high,
                     *context.densities_high);
    } else {
      const auto actions_h = dataset_actions(train_h);
      const auto actions_l = dataset_actions(train_l);
      const LikelihoodTable table_h = build_likelihood_table(
          actions_h, *context.ensemble_high, *context.densities_high);
      const LikelihoodTable table_l = build_likelihood_table(
          actions_l, *context.ensemble_low, *context.densities_low);
      const PosteriorTable posterior =
          weight_posterior(table_h, table_l, cfg.coupling_prior());
      for (std::size_t j = 0; j < posterior.probability.size(); ++j) {
        const UtilityWeights combo = posterior.grid.combo(j);
        w.w1 += posterior.probability[j] * combo.w1;
        w.w2 += posterior.probability[j] * combo.w2;
      }
    }
    *w1 = w.w1;
    *w2 = w.w2;
  });
}

selfsep_status selfsep_score(const selfsep_config* config, const char* method,
                             const char* high_csv, const char* low_csv,
                             const char* ensemble_low_csv,
                             const char* ensemble_high_csv,
                             const char* test_csv, double* error,
                             double* lower_bound, double* efficiency,
                             int* exact) {
  return guarded([&] {
    using namespace selfsep;
    require_arg(config != nullptr && method != nullptr && error != nullptr &&
                    lower_bound != nullptr && efficiency != nullptr &&
                    exact != nullptr,
                "config, method, and output pointers must be non-null");
    const Method m = method_from_string(method);
    const auto& cfg = config->cfg;

    const Dataset train_h = load_required(high_csv, "high_csv is null");
    Dataset train_l;
    if (method_uses_low_fidelity(m)) {
      train_l = load_required(low_csv, "low_csv is required for this method");
    }
    const Dataset test = load_required(test_csv, "test_csv is null");
    const ModelContext context =
        context_for_method(cfg, m, ensemble_low_csv, ensemble_high_csv);

    const RandomSource score_rng(mix64(cfg.base_seed, hash_label("score")));
    const std::vector<JointAction> predicted =
        predict_with_method(cfg, context, m, train_h, train_l, test,
                            score_rng.substream("predict"));
    *error = test_set_error(predicted, dataset_actions(test));
    *lower_bound = lower_bound_error(test, cfg.scenario, cfg.decision,
                                     cfg.n_prediction_samples,
                                     score_rng.substream("lower_bound"));
    const std::optional<double> eff = predictive_efficiency(*error, *lower_bound);
    *exact = eff ? 0 : 1;
    *efficiency = eff.value_or(0.0);
  });
}

selfsep_status selfsep_sweep(const selfsep_config* config, const char* out_dir,
                             int write_svg) {
  return guarded([&] {
    require_arg(config != nullptr && out_dir != nullptr,
                "config and out_dir must be non-null");
    selfsep::run_sweep(config->cfg, std::filesystem::path(out_dir),
                       write_svg != 0);
  });
}

selfsep_status selfsep_plot(const char* raw_csv, const char* title,
                            const char* out_svg) {
  return guarded([&] {
    using namespace selfsep;
    require_arg(raw_csv != nullptr && out_svg != nullptr,
                "raw_csv and out_svg must be non-null");
    const std::vector<TrialResult> raw = read_raw_results(raw_csv);
    const std::vector<CurvePoint> curves = aggregate_curves(raw);
    const std::string name =
        title != nullptr ? title
                         : (raw.empty() ? std::string() : raw.front().scenario);
    atomic_write_file(out_svg, render_curves_svg(curves, name));
  });
}

}  // extern "C"
