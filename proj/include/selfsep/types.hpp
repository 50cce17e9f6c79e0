#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <vector>

namespace selfsep {

// Planar aircraft state: position in feet, velocity in feet per second.
struct AircraftState {
  double x = 0.0;
  double y = 0.0;
  double vx = 0.0;
  double vy = 0.0;

  double speed() const { return std::hypot(vx, vy); }
  double heading() const { return std::atan2(vy, vx); }
};

inline double distance(const AircraftState& a, const AircraftState& b) {
  return std::hypot(a.x - b.x, a.y - b.y);
}

// Heading change in radians, applied instantaneously at decision time.
using HeadingChange = double;

enum class Fidelity { low, high };

inline const char* to_string(Fidelity f) {
  return f == Fidelity::low ? "low" : "high";
}

// Additive Gaussian observation noise, expressed as standard deviations.
struct ObservationNoiseModel {
  double position_sd = 0.0;
  double velocity_sd = 0.0;
};

// A fidelity level is defined by which sensor channels are present.  Out-the-
// window observation is always available; the instrument channel exists only
// at high fidelity, where the two are fused per state axis by inverse
// variance.
struct FidelityModel {
  ObservationNoiseModel out_the_window{900.0, 318.0};
  ObservationNoiseModel instrument{600.0, 318.0};
  bool has_instrument = false;

  static FidelityModel low() { return FidelityModel{}; }
  static FidelityModel high() {
    FidelityModel m;
    m.has_instrument = true;
    return m;
  }
  static FidelityModel for_fidelity(Fidelity f) {
    return f == Fidelity::high ? high() : low();
  }
};

// Level-1 decision parameters shared by both pilots.
struct DecisionParams {
  int observation_samples = 10;  // m': fused observation draws per decision
  int candidate_actions = 100;   // m: candidate heading changes per decision
  double action_bound = 1.0;     // candidates drawn uniformly on [-b, b]
  double duration = 5.0;         // seconds of straight flight after the turn
  double reward_scale = 1e4;     // kappa: feet-to-reward conversion
};

// Separation-preference weights, one per pilot.
struct UtilityWeights {
  double w1 = 0.0;
  double w2 = 0.0;
};

// Relative initial geometry of one encounter: intruder position and the
// heading noise applied on top of the exact collision heading.
struct EncounterGeometry {
  AircraftState ownship;
  AircraftState intruder;
};

// One simulated encounter outcome: the geometry both pilots saw and the
// heading change each selected.
struct JointAction {
  EncounterGeometry geometry;
  HeadingChange a1 = 0.0;
  HeadingChange a2 = 0.0;
};

struct DatasetRecord {
  uint64_t encounter_id = 0;
  Fidelity fidelity = Fidelity::low;
  JointAction sample;
  uint64_t seed = 0;
};

using Dataset = std::vector<DatasetRecord>;

}  // namespace selfsep
