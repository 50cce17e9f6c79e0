#include "selfsep/modelfree.hpp"

#include <algorithm>
#include <cmath>

#include "selfsep/error.hpp"

namespace selfsep {

std::vector<double> geometry_features(const EncounterGeometry& geometry) {
  return {geometry.ownship.x,  geometry.ownship.y,  geometry.ownship.vx,
          geometry.ownship.vy, geometry.intruder.x, geometry.intruder.y,
          geometry.intruder.vx, geometry.intruder.vy};
}

FeatureStats FeatureStats::fit(std::span<const std::vector<double>> features) {
  require(!features.empty(), ErrorCode::invalid_argument,
          "feature stats need at least one vector");
  const std::size_t dims = features.front().size();
  FeatureStats stats;
  stats.mean.assign(dims, 0.0);
  stats.sd.assign(dims, 0.0);
  for (const auto& f : features) {
    require(f.size() == dims, ErrorCode::invalid_argument,
            "inconsistent feature dimensions");
    for (std::size_t k = 0; k < dims; ++k) stats.mean[k] += f[k];
  }
  const double n = static_cast<double>(features.size());
  for (auto& m : stats.mean) m /= n;
  for (const auto& f : features) {
    for (std::size_t k = 0; k < dims; ++k) {
      const double d = f[k] - stats.mean[k];
      stats.sd[k] += d * d;
    }
  }
  for (auto& s : stats.sd) {
    s = std::sqrt(s / n);
    if (s == 0.0) s = 1.0;
  }
  return stats;
}

double standardized_distance(std::span<const double> a,
                             std::span<const double> b,
                             const FeatureStats& stats) {
  require(a.size() == b.size() && a.size() == stats.sd.size(),
          ErrorCode::invalid_argument, "feature dimension mismatch");
  double sum = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) {
    const double d = (a[k] - b[k]) / stats.sd[k];
    sum += d * d;
  }
  return std::sqrt(sum);
}

std::vector<double> kernel_weights(std::span<const double> distances) {
  require(!distances.empty(), ErrorCode::invalid_argument,
          "kernel weights need at least one distance");
  const double dmin = *std::min_element(distances.begin(), distances.end());
  std::vector<double> z(distances.size());
  double total = 0.0;
  for (std::size_t j = 0; j < distances.size(); ++j) {
    z[j] = std::exp(-(distances[j] - dmin));
    total += z[j];
  }
  for (auto& w : z) w /= total;
  return z;
}

LwPredictor::LwPredictor(std::vector<std::vector<double>> inputs,
                         std::vector<JointAction> outputs)
    : inputs_(std::move(inputs)),
      outputs_(std::move(outputs)),
      stats_(FeatureStats::fit(inputs_)) {
  require(inputs_.size() == outputs_.size() && !inputs_.empty(),
          ErrorCode::invalid_argument,
          "predictor needs matching non-empty inputs and outputs");
}

JointAction LwPredictor::predict(std::span<const double> query) const {
  std::vector<double> distances(inputs_.size());
  for (std::size_t j = 0; j < inputs_.size(); ++j) {
    distances[j] = standardized_distance(query, inputs_[j], stats_);
  }
  const std::vector<double> z = kernel_weights(distances);
  JointAction out;
  for (std::size_t j = 0; j < outputs_.size(); ++j) {
    out.a1 += z[j] * outputs_[j].a1;
    out.a2 += z[j] * outputs_[j].a2;
  }
  return out;
}

namespace {

std::pair<std::vector<std::vector<double>>, std::vector<JointAction>>
split_features_actions(const Dataset& data) {
  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  inputs.reserve(data.size());
  outputs.reserve(data.size());
  for (const auto& r : data) {
    inputs.push_back(geometry_features(r.sample.geometry));
    JointAction a;
    a.a1 = r.sample.a1;
    a.a2 = r.sample.a2;
    outputs.push_back(a);
  }
  return {std::move(inputs), std::move(outputs)};
}

std::vector<double> augmented_features(const EncounterGeometry& geometry,
                                       const LwPredictor& low) {
  std::vector<double> f = geometry_features(geometry);
  const JointAction predicted = low.predict(f);
  f.push_back(predicted.a1);
  f.push_back(predicted.a2);
  return f;
}

}  // namespace

LwPredictor fit_lw_hf(const Dataset& train_h) {
  require(!train_h.empty(), ErrorCode::invalid_argument,
          "high-fidelity training set is empty");
  auto [inputs, outputs] = split_features_actions(train_h);
  return LwPredictor(std::move(inputs), std::move(outputs));
}

LwMfPredictor::LwMfPredictor(LwPredictor low, LwPredictor augmented)
    : low_(std::move(low)), augmented_(std::move(augmented)) {}

JointAction LwMfPredictor::predict(const EncounterGeometry& geometry) const {
  return augmented_.predict(augmented_features(geometry, low_));
}

LwMfPredictor fit_lw_mf(const Dataset& train_l, const Dataset& train_h) {
  require(!train_l.empty(), ErrorCode::invalid_argument,
          "low-fidelity training set is empty");
  require(!train_h.empty(), ErrorCode::invalid_argument,
          "high-fidelity training set is empty");

  auto [low_inputs, low_outputs] = split_features_actions(train_l);
  LwPredictor low(std::move(low_inputs), std::move(low_outputs));

  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  inputs.reserve(train_h.size());
  outputs.reserve(train_h.size());
  for (const auto& r : train_h) {
    inputs.push_back(augmented_features(r.sample.geometry, low));
    JointAction a;
    a.a1 = r.sample.a1;
    a.a2 = r.sample.a2;
    outputs.push_back(a);
  }
  LwPredictor augmented(std::move(inputs), std::move(outputs));
  return LwMfPredictor(std::move(low), std::move(augmented));
}

}  // namespace selfsep
