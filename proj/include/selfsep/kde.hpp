#pragma once

#include <optional>
#include <span>
#include <vector>

#include "selfsep/types.hpp"

namespace selfsep {

// Bandwidths below this are clamped; keeps zero-variance sample sets (all
// points identical in a dimension) from collapsing the kernel to a delta.
inline constexpr double kBandwidthFloor = 1e-6;

// Densities are floored at this value before logs so sparse tails never
// produce -inf log-likelihood terms.
inline constexpr double kDensityFloor = 1e-300;

// Diffusion plug-in bandwidth (Botev et al.): bins the data on a 2^14-point
// mesh over the data range extended by half on each side, takes a DCT-II of
// the bin probabilities, and solves the l=7 fixed point for the optimal
// squared diffusion time t*, expanding the root bracket from a sample-size-
// dependent initial width up to 0.1.  Returns the bandwidth sqrt(t*) * R, or
// nullopt when no root exists in (0, 0.1] (caller falls back to Silverman).
std::optional<double> isj_bandwidth(std::span<const double> data);

// Silverman's rule: 1.06 * sd * n^(-1/5), population sd.
double silverman_bandwidth(std::span<const double> data);

// 2-D Gaussian product-kernel density over joint-action space.
class Kde2D {
 public:
  Kde2D(std::vector<JointAction> samples, double bandwidth1,
        double bandwidth2);

  // Mean over samples of N(a1; s.a1, h1^2) * N(a2; s.a2, h2^2).
  double eval(const JointAction& point) const;

  double bandwidth1() const { return h1_; }
  double bandwidth2() const { return h2_; }
  std::span<const JointAction> samples() const { return samples_; }

 private:
  std::vector<JointAction> samples_;
  double h1_;
  double h2_;
};

// Fits per-dimension diffusion bandwidths (Silverman fallback, floored) and
// returns the resulting density.  Requires at least two samples.
Kde2D kde_fit(std::vector<JointAction> samples);

}  // namespace selfsep
