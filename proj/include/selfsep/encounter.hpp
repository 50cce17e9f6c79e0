#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "selfsep/rng.hpp"
#include "selfsep/types.hpp"

namespace selfsep {

// Rotates the velocity by the heading change (speed preserved), then flies
// straight for the given duration.
AircraftState apply_action(const AircraftState& state, HeadingChange action,
                           double duration);

// Draws one noisy observation of the true state from a single sensor channel.
AircraftState sample_observation(const AircraftState& truth,
                                 const ObservationNoiseModel& noise,
                                 RandomSource& rng);

// Draws one fused observation.  At low fidelity this is the out-the-window
// sample alone.  At high fidelity the two channel samples are combined per
// axis with inverse-variance weights, equivalent to sampling the normalized
// product of the two channel Gaussians.
AircraftState fused_observation_sample(const AircraftState& truth,
                                       const FidelityModel& fidelity,
                                       RandomSource& rng);

// m candidate heading changes, uniform on [-action_bound, action_bound].
std::vector<HeadingChange> sample_candidate_actions(const DecisionParams& params,
                                                    RandomSource& rng);

// Expected state after the intruder applies a uniformly random heading change
// on [-b, b] and flies for the duration.  The rotation averages to a radial
// shrinkage of the velocity by sin(b)/b.
AircraftState expected_final_state_random_heading(const AircraftState& state,
                                                  double duration,
                                                  double action_bound = 1.0);

// Level-1 utility of one candidate action: mean over the intruder samples of
// w * separation / kappa - (1 - w) * |action|.
double utility(const AircraftState& own_final,
               std::span<const AircraftState> intruder_finals,
               HeadingChange action, double w, const DecisionParams& params);

// Index of the maximum value; ties resolve to the lowest index.
std::size_t argmax_lowest_index(std::span<const double> values);

// One pilot's level-1 action choice.  Draw order: m' fused observations of
// the intruder, then m candidate actions, then the deterministic argmax.
HeadingChange choose_action_level1(const AircraftState& own,
                                   const AircraftState& intruder, double w,
                                   const FidelityModel& fidelity,
                                   const DecisionParams& params,
                                   RandomSource& rng);

// Simulates one encounter: both pilots choose simultaneously from the same
// initial geometry, each with their own random source.
JointAction simulate_encounter(const EncounterGeometry& geometry,
                               const UtilityWeights& weights,
                               const FidelityModel& fidelity,
                               const DecisionParams& params,
                               RandomSource& rng_p1, RandomSource& rng_p2);

// Convenience overload deriving per-pilot sources as substreams "p1"/"p2".
JointAction simulate_encounter(const EncounterGeometry& geometry,
                               const UtilityWeights& weights,
                               const FidelityModel& fidelity,
                               const DecisionParams& params,
                               const RandomSource& rng);

}  // namespace selfsep
