#pragma once

#include <string>
#include <vector>

#include "selfsep/rng.hpp"
#include "selfsep/types.hpp"

namespace selfsep {

enum class Split { train, test };

struct ScenarioConfig {
  std::vector<double> train_approach_angles{-45.0, 0.0, 45.0};  // degrees
  std::vector<double> test_approach_angles{-22.5, 22.5};        // degrees
  double heading_sd = 5.0;       // degrees, noise on the collision heading
  double airspeed = 500.0;       // ft/s, both aircraft
  double initial_range = 5000.0; // ft
  double duration = 5.0;         // seconds
};

// Ground-truth separation weights for the two fidelity environments.
struct GroundTruth {
  UtilityWeights w_low;
  UtilityWeights w_high;
  std::string scenario_name;
};

// Named presets: identical weights in both environments, a small low-fidelity
// offset, and a large one.
GroundTruth ground_truth_preset(const std::string& name);

// Intruder heading (radians) that makes the straight-line closest point of
// approach zero: relative velocity anti-parallel to relative position.
// Raises infeasible_geometry when no intercept solution exists.
double collision_heading(const AircraftState& own, double intruder_x,
                         double intruder_y, double intruder_speed);

// One encounter geometry.  Ownship flies +x at config.airspeed from the
// origin; the intruder sits at initial_range on a bearing drawn uniformly
// from the split's approach-angle set, heading = collision heading plus
// Gaussian(0, heading_sd) noise.  Draw order: angle choice, then heading
// noise.
EncounterGeometry sample_geometry(const ScenarioConfig& config, Split split,
                                  RandomSource& rng);

// n labeled encounters at one fidelity under the fidelity-appropriate
// ground-truth weights.  Record i uses substream(i) of rng, with sub-labels
// "geometry" and "sim"; the recorded seed is that child stream's seed, so any
// single record can be regenerated in isolation.
Dataset generate_dataset(std::size_t n, Split split,
                         const FidelityModel& fidelity,
                         const GroundTruth& truth,
                         const ScenarioConfig& config,
                         const DecisionParams& params, const RandomSource& rng);

}  // namespace selfsep
