#include "selfsep/scenario.hpp"

#include <cmath>
#include <numbers>

#include "selfsep/encounter.hpp"
#include "selfsep/error.hpp"

namespace selfsep {

GroundTruth ground_truth_preset(const std::string& name) {
  // High-fidelity weights are (0.89, 0.90) in all presets; the scenarios
  // differ in how far the low-fidelity environment's weights drift from them.
  GroundTruth truth;
  truth.scenario_name = name;
  truth.w_high = UtilityWeights{0.89, 0.90};
  if (name == "identical") {
    truth.w_low = UtilityWeights{0.89, 0.90};
  } else if (name == "small-diff") {
    truth.w_low = UtilityWeights{0.88, 0.89};
  } else if (name == "large-diff") {
    truth.w_low = UtilityWeights{0.80, 0.81};
  } else {
    raise(ErrorCode::invalid_argument, "unknown ground-truth preset: " + name);
  }
  return truth;
}

double collision_heading(const AircraftState& own, double intruder_x,
                         double intruder_y, double intruder_speed) {
  require(intruder_speed > 0.0, ErrorCode::invalid_argument,
          "intruder_speed must be positive");
  const double rx = intruder_x - own.x;
  const double ry = intruder_y - own.y;
  const double range = std::hypot(rx, ry);
  require(range > 0.0, ErrorCode::infeasible_geometry,
          "aircraft already co-located");
  const double ux = rx / range;
  const double uy = ry / range;

  // Collision requires the relative velocity v2 - v1 to point from the
  // intruder toward ownship: v2 = v1 - lambda * u with closure rate
  // lambda > 0.  |v2| = intruder_speed gives a quadratic in lambda; the
  // larger root is the faster (head-on style) closure.
  const double along = own.vx * ux + own.vy * uy;
  const double own_speed_sq = own.vx * own.vx + own.vy * own.vy;
  const double disc = along * along - own_speed_sq +
                      intruder_speed * intruder_speed;
  require(disc >= 0.0, ErrorCode::infeasible_geometry,
          "no straight-line intercept for this geometry");
  const double lambda = along + std::sqrt(disc);
  require(lambda > 0.0, ErrorCode::infeasible_geometry,
          "geometry only admits a receding solution");

  const double v2x = own.vx - lambda * ux;
  const double v2y = own.vy - lambda * uy;
  return std::atan2(v2y, v2x);
}

EncounterGeometry sample_geometry(const ScenarioConfig& config, Split split,
                                  RandomSource& rng) {
  require(config.heading_sd >= 0.0, ErrorCode::invalid_argument,
          "heading_sd must be nonnegative");
  require(config.airspeed > 0.0, ErrorCode::invalid_argument,
          "airspeed must be positive");
  require(config.initial_range > 0.0, ErrorCode::invalid_argument,
          "initial_range must be positive");
  const auto& angles = split == Split::train ? config.train_approach_angles
                                             : config.test_approach_angles;
  require(!angles.empty(), ErrorCode::invalid_argument,
          "approach-angle set is empty");

  const double u = rng.next_uniform();
  const std::size_t pick =
      std::min(angles.size() - 1,
               static_cast<std::size_t>(u * static_cast<double>(angles.size())));
  const double bearing = angles[pick] * std::numbers::pi / 180.0;

  EncounterGeometry geom;
  geom.ownship = AircraftState{0.0, 0.0, config.airspeed, 0.0};
  geom.intruder.x = config.initial_range * std::cos(bearing);
  geom.intruder.y = config.initial_range * std::sin(bearing);

  const double exact = collision_heading(geom.ownship, geom.intruder.x,
                                         geom.intruder.y, config.airspeed);
  const double noise_sd = config.heading_sd * std::numbers::pi / 180.0;
  const double heading = rng.next_normal(exact, noise_sd);
  geom.intruder.vx = config.airspeed * std::cos(heading);
  geom.intruder.vy = config.airspeed * std::sin(heading);
  return geom;
}

Dataset generate_dataset(std::size_t n, Split split,
                         const FidelityModel& fidelity,
                         const GroundTruth& truth,
                         const ScenarioConfig& config,
                         const DecisionParams& params,
                         const RandomSource& rng) {
  require(n >= 1, ErrorCode::invalid_argument, "dataset size must be >= 1");
  const UtilityWeights& weights =
      fidelity.has_instrument ? truth.w_high : truth.w_low;

  Dataset data;
  data.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    RandomSource child = rng.substream(static_cast<uint64_t>(i));
    RandomSource geom_rng = child.substream("geometry");

    DatasetRecord record;
    record.encounter_id = static_cast<uint64_t>(i);
    record.fidelity = fidelity.has_instrument ? Fidelity::high : Fidelity::low;
    record.seed = child.seed();
    const EncounterGeometry geometry = sample_geometry(config, split, geom_rng);
    record.sample = simulate_encounter(geometry, weights, fidelity, params,
                                       child.substream("sim"));
    data.push_back(record);
  }
  return data;
}

}  // namespace selfsep
