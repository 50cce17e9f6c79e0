#pragma once

#include <array>
#include <span>
#include <vector>

#include "selfsep/csv.hpp"
#include "selfsep/kde.hpp"
#include "selfsep/rng.hpp"
#include "selfsep/scenario.hpp"
#include "selfsep/types.hpp"

namespace selfsep {

// Discrete weight grid shared by both players.  Joint combinations are
// indexed lexicographically: j = i1 * size + i2 picks (values[i1], values[i2]),
// so "lowest index" ties resolve to the lexicographically smallest pair.
struct WeightGrid {
  std::vector<double> values;

  std::size_t combos() const { return values.size() * values.size(); }
  UtilityWeights combo(std::size_t j) const;

  static WeightGrid linear(double lo, double hi, double step);
};

// Per-weight-combination joint actions obtained by simulating one shared set
// of novel encounters.
struct ActionEnsemble {
  WeightGrid grid;
  Fidelity fidelity = Fidelity::high;
  std::vector<EncounterGeometry> novel;
  std::vector<std::vector<JointAction>> actions;  // [combo][encounter]
};

std::vector<EncounterGeometry> sample_novel_encounters(
    std::size_t n, const ScenarioConfig& config, const RandomSource& rng);

// Simulates every novel encounter once per grid combination.  Combination j,
// encounter i uses rng.substream(j).substream(i), so construction is
// order-independent and cacheable.
ActionEnsemble build_action_ensemble(const WeightGrid& grid,
                                     const std::vector<EncounterGeometry>& novel,
                                     const FidelityModel& fidelity,
                                     const DecisionParams& params,
                                     const RandomSource& rng);

// Cache rows for an ensemble, ordered combination-major; the per-row seed is
// re-derived from the same rng that built the ensemble.  Loading validates
// the rows against an expected grid and fidelity and checks that every
// combination saw the same novel encounters.
std::vector<EnsembleRow> ensemble_cache_rows(const ActionEnsemble& ensemble,
                                             const RandomSource& rng);
ActionEnsemble ensemble_from_cache_rows(std::span<const EnsembleRow> rows,
                                        const WeightGrid& expected_grid,
                                        Fidelity expected_fidelity);

// Fitted densities plus the floored log-density at every ensemble member;
// nearest-neighbor likelihoods only ever evaluate the density at members, so
// the table makes repeated scoring cheap.
struct EnsembleDensities {
  std::vector<Kde2D> density;                          // [combo]
  std::vector<std::vector<double>> log_at_member;      // [combo][encounter]
};

EnsembleDensities fit_densities(const ActionEnsemble& ensemble);

// Index of the Euclidean nearest neighbor in the ensemble (ties to lowest
// index).
std::size_t nearest_neighbor(const JointAction& query,
                             std::span<const JointAction> ensemble);

// Sum over training actions of the floored log density at each action's
// nearest ensemble member.
double nn_loglik(std::span<const JointAction> train,
                 std::span<const JointAction> ensemble, const Kde2D& density);

// Summed log-likelihood per grid combination.
struct LikelihoodTable {
  WeightGrid grid;
  std::vector<double> loglik;  // [combo]
};

std::vector<JointAction> dataset_actions(const Dataset& data);

LikelihoodTable build_likelihood_table(std::span<const JointAction> train,
                                       const ActionEnsemble& ensemble,
                                       const EnsembleDensities& densities);

// Argmax of log_prior + loglik over the grid (uniform prior when log_prior is
// empty); ties resolve to the lexicographically smallest combination.
UtilityWeights map_estimate(const LikelihoodTable& table,
                            std::span<const double> log_prior = {});

UtilityWeights fit_map_hf(const Dataset& train_h, const ActionEnsemble& ensemble_h,
                          const EnsembleDensities& densities_h);

// Sums the high- and low-fidelity tables per combination before the argmax,
// treating pilots as identical across fidelities.
UtilityWeights fit_map_mf(const Dataset& train_l, const Dataset& train_h,
                          const ActionEnsemble& ensemble_l,
                          const EnsembleDensities& densities_l,
                          const ActionEnsemble& ensemble_h,
                          const EnsembleDensities& densities_h);

// 4-D Gaussian over (w_l^1, w_l^2, w_h^1, w_h^2) coupling the two
// fidelities' weights.
struct CouplingPrior {
  std::array<double, 4> mean{};
  std::array<double, 16> covariance{};  // row-major

  // Mean at the ground-truth weights; covariance with .0017 on the diagonal
  // and .0013 linking the same player across fidelities.
  static CouplingPrior defaults(const GroundTruth& truth);

  // Log density up to the constant that cancels under normalization
  // (-0.5 * quadratic form - 0.5 * log det).  Raises on a covariance that is
  // not positive definite.
  double log_density(const std::array<double, 4>& x) const;
};

struct PosteriorTable {
  WeightGrid grid;
  std::vector<double> probability;  // [high combo], sums to 1
};

// p(w_h^j | A_l, A_h) proportional to p(w_h^j | A_h) * sum_k p(w_l^k | A_l)
// p(w_l^k, w_h^j), all factors normalized over the grid, computed in log
// space.
PosteriorTable weight_posterior(const LikelihoodTable& loglik_h,
                                const LikelihoodTable& loglik_l,
                                const CouplingPrior& prior);

// Mean joint action over n_samples independent simulations of the encounter
// at the given weights; sample ell uses rng.substream(ell).
JointAction predict_map(const EncounterGeometry& geometry,
                        const UtilityWeights& w, const FidelityModel& fidelity,
                        const DecisionParams& params, int n_samples,
                        const RandomSource& rng);

// Posterior-weighted mixture of predict_map over all grid combinations;
// combination j uses rng.substream(j).
JointAction predict_bayes(const EncounterGeometry& geometry,
                          const PosteriorTable& posterior,
                          const FidelityModel& fidelity,
                          const DecisionParams& params, int n_samples,
                          const RandomSource& rng);

}  // namespace selfsep
