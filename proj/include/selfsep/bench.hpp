#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "selfsep/config.hpp"
#include "selfsep/modelbased.hpp"
#include "selfsep/rng.hpp"
#include "selfsep/types.hpp"

namespace selfsep {

// D below this threshold counts as an exact prediction and the efficiency
// ratio is replaced by the `exact` sentinel instead of dividing.
inline constexpr double kExactThreshold = 1e-9;

struct TrialResult {
  std::string scenario;
  Method method = Method::lw_hf;
  int n_high = 0;
  int n_low = 0;
  int trial = 0;
  uint64_t seed = 0;
  double error = 0.0;        // D
  double lower_bound = 0.0;  // D_lb
  std::optional<double> efficiency;  // nullopt renders as `exact`
};

struct CurvePoint {
  std::string scenario;
  Method method = Method::lw_hf;
  int n_high = 0;
  // Aggregated over the trials with numeric efficiency; when none exist the
  // CSV renders mean and stderr as `exact`.
  std::optional<double> mean_efficiency;
  double std_error = 0.0;
  int trials = 0;
};

// Sum over encounters of the Euclidean distance between predicted and actual
// joint actions.
double test_set_error(std::span<const JointAction> predicted,
                      std::span<const JointAction> actual);

// Test-set error of the ground-truth model itself: each test encounter is
// predicted via predict_map at the ground-truth high-fidelity weights, using
// rng.substream(i) for encounter i.
double lower_bound_error(const Dataset& test, const GroundTruth& truth,
                         const DecisionParams& params, int n_samples,
                         const RandomSource& rng);

std::optional<double> predictive_efficiency(double error, double lower_bound);

// Per-cell seed: chained mix64 over (base_seed, "cell" tag, method id,
// n_high, trial).  Test-set and lower-bound seeds chain (base_seed, label
// tag, n_high, trial) with no method term, so every method within a cell
// scores against the same test set and lower bound.
uint64_t cell_seed(uint64_t base_seed, Method method, int n_high, int trial);
uint64_t shared_seed(uint64_t base_seed, std::string_view label, int n_high,
                     int trial);

// Action ensembles and fitted densities shared by the model-based methods.
// Everything derives from base_seed alone (novel encounters from the "novel"
// substream, per-fidelity simulations from "ensemble"/"low" and
// "ensemble"/"high"), so a context built once per sweep equals one built
// per cell.
struct ModelContext {
  std::optional<ActionEnsemble> ensemble_low;
  std::optional<ActionEnsemble> ensemble_high;
  std::optional<EnsembleDensities> densities_low;
  std::optional<EnsembleDensities> densities_high;
};

ModelContext build_model_context(const ExperimentConfig& config,
                                 bool need_low, bool need_high);

// Fits the method on the given training data and predicts every test
// encounter; model-based predictions for test index i draw from
// predict_rng.substream(i).  The context must hold whatever ensembles the
// method needs; train_l may be empty for high-fidelity-only methods.
std::vector<JointAction> predict_with_method(const ExperimentConfig& config,
                                             const ModelContext& context,
                                             Method method,
                                             const Dataset& train_h,
                                             const Dataset& train_l,
                                             const Dataset& test,
                                             const RandomSource& predict_rng);

TrialResult run_condition(const ExperimentConfig& config, Method method,
                          int n_high, int trial);
TrialResult run_condition(const ExperimentConfig& config,
                          const ModelContext& context, Method method,
                          int n_high, int trial);

struct SweepResult {
  std::vector<TrialResult> raw;
  std::vector<CurvePoint> curves;
};

// Runs all (method x n_high x trial) cells on config.threads workers with
// per-cell seeds, so execution order never affects results.  When out_dir is
// given, completed cells are flushed to raw.partial.csv as they finish and
// the final raw.csv, curves.csv, meta.json (and optionally curves.svg) are
// written atomically.
SweepResult run_sweep(const ExperimentConfig& config,
                      const std::optional<std::filesystem::path>& out_dir,
                      bool write_svg);

// Mean and standard error (sample sd / sqrt(count)) of the numeric
// efficiencies per (method, n_high), in first-appearance order; a single
// trial yields standard error 0.
std::vector<CurvePoint> aggregate_curves(std::span<const TrialResult> raw);

inline constexpr std::string_view kRawResultsHeader =
    "scenario,method,n_high,n_low,trial,seed,D,D_lb,efficiency";
inline constexpr std::string_view kCurvesHeader =
    "scenario,method,n_high,mean_efficiency,stderr,trials";

std::string raw_results_to_csv(std::span<const TrialResult> raw);
std::vector<TrialResult> raw_results_from_csv(std::istream& in);
std::vector<TrialResult> read_raw_results(const std::filesystem::path& path);

std::string curves_to_csv(std::span<const CurvePoint> curves);

// Configuration echo plus provenance notes, JSON-formatted.
std::string sweep_metadata_json(const ExperimentConfig& config);

}  // namespace selfsep
