#include "selfsep/encounter.hpp"

#include <cmath>

#include "selfsep/error.hpp"

namespace selfsep {

AircraftState apply_action(const AircraftState& state, HeadingChange action,
                           double duration) {
  const double c = std::cos(action);
  const double s = std::sin(action);
  AircraftState out;
  out.vx = c * state.vx - s * state.vy;
  out.vy = s * state.vx + c * state.vy;
  out.x = state.x + duration * out.vx;
  out.y = state.y + duration * out.vy;
  return out;
}

AircraftState sample_observation(const AircraftState& truth,
                                 const ObservationNoiseModel& noise,
                                 RandomSource& rng) {
  AircraftState obs;
  obs.x = rng.next_normal(truth.x, noise.position_sd);
  obs.y = rng.next_normal(truth.y, noise.position_sd);
  obs.vx = rng.next_normal(truth.vx, noise.velocity_sd);
  obs.vy = rng.next_normal(truth.vy, noise.velocity_sd);
  return obs;
}

namespace {

// Fused standard deviation of two independent Gaussian channels: the product
// density is a Gaussian with precision equal to the sum of the precisions.
double fused_sd(double sd_a, double sd_b) {
  return 1.0 / std::sqrt(1.0 / (sd_a * sd_a) + 1.0 / (sd_b * sd_b));
}

}  // namespace

AircraftState fused_observation_sample(const AircraftState& truth,
                                       const FidelityModel& fidelity,
                                       RandomSource& rng) {
  if (!fidelity.has_instrument) {
    return sample_observation(truth, fidelity.out_the_window, rng);
  }
  ObservationNoiseModel fused;
  fused.position_sd = fused_sd(fidelity.out_the_window.position_sd,
                               fidelity.instrument.position_sd);
  fused.velocity_sd = fused_sd(fidelity.out_the_window.velocity_sd,
                               fidelity.instrument.velocity_sd);
  return sample_observation(truth, fused, rng);
}

std::vector<HeadingChange> sample_candidate_actions(const DecisionParams& params,
                                                    RandomSource& rng) {
  require(params.candidate_actions > 0, ErrorCode::invalid_argument,
          "candidate_actions must be positive");
  require(params.action_bound > 0.0, ErrorCode::invalid_argument,
          "action_bound must be positive");
  std::vector<HeadingChange> actions(
      static_cast<std::size_t>(params.candidate_actions));
  for (auto& a : actions) {
    a = rng.next_uniform(-params.action_bound, params.action_bound);
  }
  return actions;
}

AircraftState expected_final_state_random_heading(const AircraftState& state,
                                                  double duration,
                                                  double action_bound) {
  require(action_bound > 0.0, ErrorCode::invalid_argument,
          "action_bound must be positive");
  // E[R(a)] v for a ~ U(-b, b) is (sin b / b) v: the off-diagonal sin terms
  // integrate to zero and the diagonal cos terms average to sin(b)/b.
  const double shrink = std::sin(action_bound) / action_bound;
  AircraftState out;
  out.vx = shrink * state.vx;
  out.vy = shrink * state.vy;
  out.x = state.x + duration * out.vx;
  out.y = state.y + duration * out.vy;
  return out;
}

double utility(const AircraftState& own_final,
               std::span<const AircraftState> intruder_finals,
               HeadingChange action, double w, const DecisionParams& params) {
  require(!intruder_finals.empty(), ErrorCode::invalid_argument,
          "utility needs at least one intruder sample");
  double total = 0.0;
  for (const auto& other : intruder_finals) {
    total += w * distance(own_final, other) / params.reward_scale -
             (1.0 - w) * std::abs(action);
  }
  return total / static_cast<double>(intruder_finals.size());
}

std::size_t argmax_lowest_index(std::span<const double> values) {
  require(!values.empty(), ErrorCode::invalid_argument,
          "argmax of empty range");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i) {
    if (values[i] > values[best]) best = i;
  }
  return best;
}

HeadingChange choose_action_level1(const AircraftState& own,
                                   const AircraftState& intruder, double w,
                                   const FidelityModel& fidelity,
                                   const DecisionParams& params,
                                   RandomSource& rng) {
  require(params.observation_samples > 0, ErrorCode::invalid_argument,
          "observation_samples must be positive");

  // The level-1 pilot models the intruder as level 0: a uniformly random
  // heading change.  Each noisy observation of the intruder is projected to
  // its expected final state under that model.
  std::vector<AircraftState> intruder_finals;
  intruder_finals.reserve(static_cast<std::size_t>(params.observation_samples));
  for (int j = 0; j < params.observation_samples; ++j) {
    const AircraftState obs = fused_observation_sample(intruder, fidelity, rng);
    intruder_finals.push_back(expected_final_state_random_heading(
        obs, params.duration, params.action_bound));
  }

  const std::vector<HeadingChange> candidates =
      sample_candidate_actions(params, rng);

  std::vector<double> scores;
  scores.reserve(candidates.size());
  for (const HeadingChange a : candidates) {
    const AircraftState own_final = apply_action(own, a, params.duration);
    scores.push_back(utility(own_final, intruder_finals, a, w, params));
  }
  return candidates[argmax_lowest_index(scores)];
}

JointAction simulate_encounter(const EncounterGeometry& geometry,
                               const UtilityWeights& weights,
                               const FidelityModel& fidelity,
                               const DecisionParams& params,
                               RandomSource& rng_p1, RandomSource& rng_p2) {
  JointAction result;
  result.geometry = geometry;
  result.a1 = choose_action_level1(geometry.ownship, geometry.intruder,
                                   weights.w1, fidelity, params, rng_p1);
  result.a2 = choose_action_level1(geometry.intruder, geometry.ownship,
                                   weights.w2, fidelity, params, rng_p2);
  return result;
}

JointAction simulate_encounter(const EncounterGeometry& geometry,
                               const UtilityWeights& weights,
                               const FidelityModel& fidelity,
                               const DecisionParams& params,
                               const RandomSource& rng) {
  RandomSource rng_p1 = rng.substream("p1");
  RandomSource rng_p2 = rng.substream("p2");
  return simulate_encounter(geometry, weights, fidelity, params, rng_p1,
                            rng_p2);
}

}  // namespace selfsep
