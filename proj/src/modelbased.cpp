#include "selfsep/modelbased.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "selfsep/encounter.hpp"
#include "selfsep/error.hpp"

namespace selfsep {

UtilityWeights WeightGrid::combo(std::size_t j) const {
  require(j < combos(), ErrorCode::invalid_argument,
          "weight combination index out of range");
  return UtilityWeights{values[j / values.size()], values[j % values.size()]};
}

WeightGrid WeightGrid::linear(double lo, double hi, double step) {
  require(step > 0.0 && hi >= lo, ErrorCode::invalid_argument,
          "bad weight grid range");
  WeightGrid grid;
  // Half-step slack keeps the endpoint in the grid despite rounding.
  const int count = static_cast<int>(std::floor((hi - lo) / step + 0.5)) + 1;
  grid.values.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    // Snapping to a 1e-12 lattice keeps decimal-step grids on the doubles
    // nearest the intended decimals, so values round-trip through config
    // files without accumulated-sum digits.
    const double v = lo + step * static_cast<double>(i);
    grid.values.push_back(std::round(v * 1e12) / 1e12);
  }
  return grid;
}

std::vector<EncounterGeometry> sample_novel_encounters(
    std::size_t n, const ScenarioConfig& config, const RandomSource& rng) {
  require(n >= 1, ErrorCode::invalid_argument, "need at least one encounter");
  std::vector<EncounterGeometry> novel;
  novel.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomSource child = rng.substream(static_cast<uint64_t>(i));
    novel.push_back(sample_geometry(config, Split::train, child));
  }
  return novel;
}

ActionEnsemble build_action_ensemble(const WeightGrid& grid,
                                     const std::vector<EncounterGeometry>& novel,
                                     const FidelityModel& fidelity,
                                     const DecisionParams& params,
                                     const RandomSource& rng) {
  require(!grid.values.empty(), ErrorCode::invalid_argument,
          "weight grid is empty");
  require(!novel.empty(), ErrorCode::invalid_argument,
          "novel encounter set is empty");
  ActionEnsemble ensemble;
  ensemble.grid = grid;
  ensemble.fidelity = fidelity.has_instrument ? Fidelity::high : Fidelity::low;
  ensemble.novel = novel;
  ensemble.actions.resize(grid.combos());
  for (std::size_t j = 0; j < grid.combos(); ++j) {
    const UtilityWeights w = grid.combo(j);
    const RandomSource combo_rng = rng.substream(j);
    auto& list = ensemble.actions[j];
    list.reserve(novel.size());
    for (std::size_t i = 0; i < novel.size(); ++i) {
      list.push_back(simulate_encounter(novel[i], w, fidelity, params,
                                        combo_rng.substream(i)));
    }
  }
  return ensemble;
}

std::vector<EnsembleRow> ensemble_cache_rows(const ActionEnsemble& ensemble,
                                             const RandomSource& rng) {
  std::vector<EnsembleRow> rows;
  rows.reserve(ensemble.grid.combos() * ensemble.novel.size());
  for (std::size_t j = 0; j < ensemble.grid.combos(); ++j) {
    const UtilityWeights w = ensemble.grid.combo(j);
    const RandomSource combo_rng = rng.substream(j);
    for (std::size_t i = 0; i < ensemble.novel.size(); ++i) {
      EnsembleRow row;
      row.record.encounter_id = static_cast<uint64_t>(i);
      row.record.fidelity = ensemble.fidelity;
      row.record.sample = ensemble.actions[j][i];
      row.record.seed = combo_rng.substream(i).seed();
      row.weights = w;
      rows.push_back(row);
    }
  }
  return rows;
}

ActionEnsemble ensemble_from_cache_rows(std::span<const EnsembleRow> rows,
                                        const WeightGrid& expected_grid,
                                        Fidelity expected_fidelity) {
  const std::size_t combos = expected_grid.combos();
  require(!rows.empty() && rows.size() % combos == 0,
          ErrorCode::invalid_argument,
          "cache row count does not cover the weight grid");
  const std::size_t per_combo = rows.size() / combos;

  ActionEnsemble ensemble;
  ensemble.grid = expected_grid;
  ensemble.fidelity = expected_fidelity;
  ensemble.novel.reserve(per_combo);
  ensemble.actions.assign(combos, {});
  for (std::size_t j = 0; j < combos; ++j) {
    const UtilityWeights w = expected_grid.combo(j);
    ensemble.actions[j].reserve(per_combo);
    for (std::size_t i = 0; i < per_combo; ++i) {
      const EnsembleRow& row = rows[j * per_combo + i];
      require(row.weights.w1 == w.w1 && row.weights.w2 == w.w2,
              ErrorCode::invalid_argument,
              "cache weights do not match the configured grid");
      require(row.record.fidelity == expected_fidelity,
              ErrorCode::invalid_argument,
              "cache fidelity does not match the request");
      const EncounterGeometry& g = row.record.sample.geometry;
      if (j == 0) {
        ensemble.novel.push_back(g);
      } else {
        const EncounterGeometry& first = ensemble.novel[i];
        require(g.ownship.x == first.ownship.x && g.ownship.y == first.ownship.y &&
                    g.ownship.vx == first.ownship.vx &&
                    g.ownship.vy == first.ownship.vy &&
                    g.intruder.x == first.intruder.x &&
                    g.intruder.y == first.intruder.y &&
                    g.intruder.vx == first.intruder.vx &&
                    g.intruder.vy == first.intruder.vy,
                ErrorCode::invalid_argument,
                "cache combinations disagree on the novel encounters");
      }
      ensemble.actions[j].push_back(row.record.sample);
    }
  }
  return ensemble;
}

EnsembleDensities fit_densities(const ActionEnsemble& ensemble) {
  EnsembleDensities out;
  out.density.reserve(ensemble.actions.size());
  out.log_at_member.reserve(ensemble.actions.size());
  for (const auto& actions : ensemble.actions) {
    out.density.push_back(kde_fit(actions));
    const Kde2D& density = out.density.back();
    std::vector<double> logs(actions.size());
    for (std::size_t i = 0; i < actions.size(); ++i) {
      logs[i] = std::log(std::max(density.eval(actions[i]), kDensityFloor));
    }
    out.log_at_member.push_back(std::move(logs));
  }
  return out;
}

std::size_t nearest_neighbor(const JointAction& query,
                             std::span<const JointAction> ensemble) {
  require(!ensemble.empty(), ErrorCode::invalid_argument,
          "nearest neighbor over empty ensemble");
  std::size_t best = 0;
  double best_sq = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const double d1 = query.a1 - ensemble[i].a1;
    const double d2 = query.a2 - ensemble[i].a2;
    const double sq = d1 * d1 + d2 * d2;
    if (sq < best_sq) {
      best_sq = sq;
      best = i;
    }
  }
  return best;
}

double nn_loglik(std::span<const JointAction> train,
                 std::span<const JointAction> ensemble, const Kde2D& density) {
  require(!train.empty(), ErrorCode::invalid_argument,
          "likelihood over empty training actions");
  double total = 0.0;
  for (const auto& a : train) {
    const std::size_t nn = nearest_neighbor(a, ensemble);
    total += std::log(std::max(density.eval(ensemble[nn]), kDensityFloor));
  }
  return total;
}

std::vector<JointAction> dataset_actions(const Dataset& data) {
  std::vector<JointAction> actions;
  actions.reserve(data.size());
  for (const auto& r : data) {
    JointAction a;
    a.a1 = r.sample.a1;
    a.a2 = r.sample.a2;
    actions.push_back(a);
  }
  return actions;
}

LikelihoodTable build_likelihood_table(std::span<const JointAction> train,
                                       const ActionEnsemble& ensemble,
                                       const EnsembleDensities& densities) {
  require(!train.empty(), ErrorCode::invalid_argument,
          "likelihood over empty training actions");
  require(densities.density.size() == ensemble.actions.size(),
          ErrorCode::invalid_argument, "densities do not match ensemble");
  LikelihoodTable table;
  table.grid = ensemble.grid;
  table.loglik.resize(ensemble.actions.size());
  for (std::size_t j = 0; j < ensemble.actions.size(); ++j) {
    const auto& members = ensemble.actions[j];
    const auto& logs = densities.log_at_member[j];
    double total = 0.0;
    for (const auto& a : train) {
      total += logs[nearest_neighbor(a, members)];
    }
    table.loglik[j] = total;
  }
  return table;
}

UtilityWeights map_estimate(const LikelihoodTable& table,
                            std::span<const double> log_prior) {
  require(!table.loglik.empty(), ErrorCode::invalid_argument,
          "likelihood table is empty");
  require(log_prior.empty() || log_prior.size() == table.loglik.size(),
          ErrorCode::invalid_argument, "prior does not match grid");
  std::size_t best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  bool any_finite = false;
  for (std::size_t j = 0; j < table.loglik.size(); ++j) {
    const double score =
        table.loglik[j] + (log_prior.empty() ? 0.0 : log_prior[j]);
    if (std::isfinite(score) && score > best_score) {
      best_score = score;
      best = j;
      any_finite = true;
    }
  }
  require(any_finite, ErrorCode::numeric,
          "degenerate likelihood: no finite grid entry");
  return table.grid.combo(best);
}

UtilityWeights fit_map_hf(const Dataset& train_h,
                          const ActionEnsemble& ensemble_h,
                          const EnsembleDensities& densities_h) {
  require(!train_h.empty(), ErrorCode::invalid_argument,
          "high-fidelity training set is empty");
  const auto actions = dataset_actions(train_h);
  return map_estimate(build_likelihood_table(actions, ensemble_h, densities_h));
}

UtilityWeights fit_map_mf(const Dataset& train_l, const Dataset& train_h,
                          const ActionEnsemble& ensemble_l,
                          const EnsembleDensities& densities_l,
                          const ActionEnsemble& ensemble_h,
                          const EnsembleDensities& densities_h) {
  require(!train_l.empty(), ErrorCode::invalid_argument,
          "low-fidelity training set is empty");
  require(!train_h.empty(), ErrorCode::invalid_argument,
          "high-fidelity training set is empty");
  const auto actions_l = dataset_actions(train_l);
  const auto actions_h = dataset_actions(train_h);
  const LikelihoodTable table_l =
      build_likelihood_table(actions_l, ensemble_l, densities_l);
  LikelihoodTable table = build_likelihood_table(actions_h, ensemble_h, densities_h);
  require(table.loglik.size() == table_l.loglik.size(),
          ErrorCode::invalid_argument, "fidelity grids differ");
  for (std::size_t j = 0; j < table.loglik.size(); ++j) {
    table.loglik[j] += table_l.loglik[j];
  }
  return map_estimate(table);
}

CouplingPrior CouplingPrior::defaults(const GroundTruth& truth) {
  CouplingPrior prior;
  prior.mean = {truth.w_low.w1, truth.w_low.w2, truth.w_high.w1,
                truth.w_high.w2};
  prior.covariance.fill(0.0);
  for (int i = 0; i < 4; ++i) prior.covariance[i * 4 + i] = 0.0017;
  // Same player across fidelities: (w_l^1, w_h^1) and (w_l^2, w_h^2).
  prior.covariance[0 * 4 + 2] = prior.covariance[2 * 4 + 0] = 0.0013;
  prior.covariance[1 * 4 + 3] = prior.covariance[3 * 4 + 1] = 0.0013;
  return prior;
}

namespace {

// Lower-triangular Cholesky factor of a 4x4 covariance; raises when the
// matrix is not positive definite.
std::array<double, 16> cholesky4(const std::array<double, 16>& m) {
  std::array<double, 16> l{};
  for (int i = 0; i < 4; ++i) {
    for (int j = 0; j <= i; ++j) {
      double sum = m[i * 4 + j];
      for (int k = 0; k < j; ++k) sum -= l[i * 4 + k] * l[j * 4 + k];
      if (i == j) {
        require(sum > 0.0, ErrorCode::invalid_argument,
                "coupling covariance is not positive definite");
        l[i * 4 + i] = std::sqrt(sum);
      } else {
        l[i * 4 + j] = sum / l[j * 4 + j];
      }
    }
  }
  return l;
}

}  // namespace

double CouplingPrior::log_density(const std::array<double, 4>& x) const {
  const std::array<double, 16> l = cholesky4(covariance);
  // Solve L y = (x - mean) by forward substitution; the quadratic form is
  // then |y|^2 and log det = 2 sum log L_ii.
  std::array<double, 4> y{};
  for (int i = 0; i < 4; ++i) {
    double sum = x[static_cast<std::size_t>(i)] - mean[static_cast<std::size_t>(i)];
    for (int k = 0; k < i; ++k) sum -= l[i * 4 + k] * y[static_cast<std::size_t>(k)];
    y[static_cast<std::size_t>(i)] = sum / l[i * 4 + i];
  }
  double quad = 0.0;
  double log_det = 0.0;
  for (int i = 0; i < 4; ++i) {
    quad += y[static_cast<std::size_t>(i)] * y[static_cast<std::size_t>(i)];
    log_det += 2.0 * std::log(l[i * 4 + i]);
  }
  return -0.5 * (quad + log_det);
}

namespace {

// log(sum(exp(v))) with the max factored out.
double log_sum_exp(std::span<const double> v) {
  double max_v = -std::numeric_limits<double>::infinity();
  for (double x : v) max_v = std::max(max_v, x);
  if (!std::isfinite(max_v)) return max_v;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max_v);
  return max_v + std::log(sum);
}

std::vector<double> log_normalize(std::span<const double> loglik) {
  const double lse = log_sum_exp(loglik);
  require(std::isfinite(lse), ErrorCode::numeric,
          "degenerate likelihood table");
  std::vector<double> out(loglik.size());
  for (std::size_t i = 0; i < loglik.size(); ++i) out[i] = loglik[i] - lse;
  return out;
}

}  // namespace

PosteriorTable weight_posterior(const LikelihoodTable& loglik_h,
                                const LikelihoodTable& loglik_l,
                                const CouplingPrior& prior) {
  const std::size_t n = loglik_h.loglik.size();
  require(n > 0 && loglik_l.loglik.size() == n, ErrorCode::invalid_argument,
          "likelihood tables must cover the same grid");

  const std::vector<double> log_ph = log_normalize(loglik_h.loglik);
  const std::vector<double> log_pl = log_normalize(loglik_l.loglik);

  // Coupling prior at every (low combo k, high combo j) pair, normalized over
  // the joint grid.
  std::vector<double> log_joint(n * n);
  for (std::size_t k = 0; k < n; ++k) {
    const UtilityWeights wl = loglik_l.grid.combo(k);
    for (std::size_t j = 0; j < n; ++j) {
      const UtilityWeights wh = loglik_h.grid.combo(j);
      log_joint[k * n + j] = prior.log_density({wl.w1, wl.w2, wh.w1, wh.w2});
    }
  }
  const double joint_lse = log_sum_exp(log_joint);
  for (auto& v : log_joint) v -= joint_lse;

  std::vector<double> log_post(n);
  std::vector<double> terms(n);
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t k = 0; k < n; ++k) {
      terms[k] = log_pl[k] + log_joint[k * n + j];
    }
    log_post[j] = log_ph[j] + log_sum_exp(terms);
  }
  const std::vector<double> normalized = log_normalize(log_post);

  PosteriorTable table;
  table.grid = loglik_h.grid;
  table.probability.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    table.probability[j] = std::exp(normalized[j]);
  }
  return table;
}

JointAction predict_map(const EncounterGeometry& geometry,
                        const UtilityWeights& w, const FidelityModel& fidelity,
                        const DecisionParams& params, int n_samples,
                        const RandomSource& rng) {
  require(n_samples >= 1, ErrorCode::invalid_argument,
          "prediction needs at least one sample");
  JointAction mean;
  for (int ell = 0; ell < n_samples; ++ell) {
    const JointAction sample = simulate_encounter(
        geometry, w, fidelity, params, rng.substream(static_cast<uint64_t>(ell)));
    mean.a1 += sample.a1;
    mean.a2 += sample.a2;
  }
  mean.a1 /= static_cast<double>(n_samples);
  mean.a2 /= static_cast<double>(n_samples);
  mean.geometry = geometry;
  return mean;
}

JointAction predict_bayes(const EncounterGeometry& geometry,
                          const PosteriorTable& posterior,
                          const FidelityModel& fidelity,
                          const DecisionParams& params, int n_samples,
                          const RandomSource& rng) {
  require(!posterior.probability.empty(), ErrorCode::invalid_argument,
          "posterior table is empty");
  JointAction mix;
  for (std::size_t j = 0; j < posterior.probability.size(); ++j) {
    const JointAction pred =
        predict_map(geometry, posterior.grid.combo(j), fidelity, params,
                    n_samples, rng.substream(j));
    mix.a1 += posterior.probability[j] * pred.a1;
    mix.a2 += posterior.probability[j] * pred.a2;
  }
  mix.geometry = geometry;
  return mix;
}

}  // namespace selfsep
