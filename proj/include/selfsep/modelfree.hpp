#pragma once

#include <array>
#include <span>
#include <vector>

#include "selfsep/types.hpp"

namespace selfsep {

// Raw 8-D geometry features: (s1.x, s1.y, s1.vx, s1.vy, s2.x, s2.y, s2.vx,
// s2.vy).
std::vector<double> geometry_features(const EncounterGeometry& geometry);

// Per-dimension mean and standard deviation of a feature set, used for
// standardized distances.  Zero-variance dimensions get sd = 1 so a constant
// feature contributes nothing without dividing by zero.
struct FeatureStats {
  std::vector<double> mean;
  std::vector<double> sd;

  static FeatureStats fit(std::span<const std::vector<double>> features);
};

double standardized_distance(std::span<const double> a,
                             std::span<const double> b,
                             const FeatureStats& stats);

// Softmin kernel weights over the training set: z_j = e^{-d_j} / sum e^{-d},
// computed with the minimum distance subtracted before exponentiation so
// distant points underflow harmlessly.
std::vector<double> kernel_weights(std::span<const double> distances);

// Locally weighted regressor from feature vectors to joint actions.
class LwPredictor {
 public:
  LwPredictor(std::vector<std::vector<double>> inputs,
              std::vector<JointAction> outputs);

  std::size_t dimensions() const { return stats_.mean.size(); }
  std::size_t size() const { return inputs_.size(); }

  // Kernel-weighted average of the training actions (weights per the
  // standardized distances to the query).
  JointAction predict(std::span<const double> query) const;

 private:
  std::vector<std::vector<double>> inputs_;
  std::vector<JointAction> outputs_;
  FeatureStats stats_;
};

// High-fidelity-only predictor over 8-D geometry features.
LwPredictor fit_lw_hf(const Dataset& train_h);

// Multi-fidelity predictor: a low-fidelity regressor R_l supplies two extra
// action features, and the final regressor is trained on the 10-D augmented
// inputs (geometry plus R_l's prediction), all dimensions standardized.
class LwMfPredictor {
 public:
  LwMfPredictor(LwPredictor low, LwPredictor augmented);

  JointAction predict(const EncounterGeometry& geometry) const;
  const LwPredictor& low_fidelity() const { return low_; }

 private:
  LwPredictor low_;
  LwPredictor augmented_;
};

LwMfPredictor fit_lw_mf(const Dataset& train_l, const Dataset& train_h);

}  // namespace selfsep
