#include "selfsep/kde.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "selfsep/error.hpp"

namespace selfsep {

namespace {

constexpr int kMeshSize = 1 << 14;
constexpr double kMaxDiffusionTime = 0.1;

// FFTW plan creation and destruction mutate global planner state and are not
// thread-safe; execution of a private plan is.
std::mutex& fftw_plan_mutex() {
  static std::mutex m;
  return m;
}

// DCT-II of the binned probabilities.  FFTW's REDFT10 yields
// 2 * sum_j x_j cos(pi k (2j+1) / (2n)), which for k >= 1 is exactly the
// coefficient the fixed-point functional needs.
std::vector<double> dct2(std::vector<double> bins) {
  std::vector<double> out(bins.size());
  fftw_plan plan;
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    plan = fftw_plan_r2r_1d(static_cast<int>(bins.size()), bins.data(),
                            out.data(), FFTW_REDFT10, FFTW_ESTIMATE);
  }
  require(plan != nullptr, ErrorCode::internal, "FFTW plan creation failed");
  fftw_execute(plan);
  {
    std::lock_guard<std::mutex> lock(fftw_plan_mutex());
    fftw_destroy_plan(plan);
  }
  return out;
}

// sum_k k^(2s) a2_k exp(-k^2 pi^2 t), terms evaluated in log space and the
// tail cut once the exponent guarantees underflow for all remaining k.
double coefficient_sum(std::span<const double> a2, std::span<const double> log_i,
                       int s, double t) {
  const double pi_sq = std::numbers::pi * std::numbers::pi;
  double sum = 0.0;
  for (std::size_t k = 1; k < a2.size() + 1; ++k) {
    const double i = static_cast<double>(k) * static_cast<double>(k);
    const double exponent = static_cast<double>(s) * log_i[k - 1] - i * pi_sq * t;
    if (exponent < -750.0 && i * pi_sq * t > static_cast<double>(s) * log_i[k - 1]) {
      break;
    }
    sum += a2[k - 1] * std::exp(exponent);
  }
  return sum;
}

struct FixedPointContext {
  std::vector<double> a2;     // (a_k / 2)^2 for k = 1 .. n-1
  std::vector<double> log_i;  // ln(k^2)
  double n_unique = 0.0;
};

// The l = 7 plug-in functional: returns t - xi * gamma^[l](t), whose root is
// the optimal squared diffusion time.
double fixed_point_residual(double t, const FixedPointContext& ctx) {
  constexpr int l = 7;
  const double pi = std::numbers::pi;
  double f = 2.0 * std::pow(pi, 2.0 * l) * coefficient_sum(ctx.a2, ctx.log_i, l, t);
  for (int s = l - 1; s >= 2; --s) {
    double odd_factorial = 1.0;
    for (int j = 3; j <= 2 * s - 1; j += 2) odd_factorial *= j;
    const double k0 = odd_factorial / std::sqrt(2.0 * pi);
    const double c = (1.0 + std::pow(0.5, s + 0.5)) / 3.0;
    const double time =
        std::pow(2.0 * c * k0 / (ctx.n_unique * f), 2.0 / (3.0 + 2.0 * s));
    f = 2.0 * std::pow(pi, 2.0 * s) * coefficient_sum(ctx.a2, ctx.log_i, s, time);
  }
  return t - std::pow(2.0 * ctx.n_unique * std::sqrt(pi) * f, -0.4);
}

}  // namespace

std::optional<double> isj_bandwidth(std::span<const double> data) {
  require(data.size() >= 2, ErrorCode::invalid_argument,
          "bandwidth selection needs at least two samples");
  const auto [min_it, max_it] = std::minmax_element(data.begin(), data.end());
  const double spread = *max_it - *min_it;
  if (spread <= 0.0) return std::nullopt;

  const double lo = *min_it - spread / 2.0;
  const double range = 2.0 * spread;
  const double dx = range / static_cast<double>(kMeshSize - 1);

  std::vector<double> bins(kMeshSize, 0.0);
  for (double x : data) {
    auto idx = static_cast<std::size_t>((x - lo) / dx);
    bins[std::min(idx, bins.size() - 1)] += 1.0;
  }
  for (auto& b : bins) b /= static_cast<double>(data.size());

  const std::vector<double> dct = dct2(std::move(bins));

  FixedPointContext ctx;
  ctx.a2.resize(kMeshSize - 1);
  ctx.log_i.resize(kMeshSize - 1);
  for (std::size_t k = 1; k < static_cast<std::size_t>(kMeshSize); ++k) {
    const double half = dct[k] / 2.0;
    ctx.a2[k - 1] = half * half;
    ctx.log_i[k - 1] = 2.0 * std::log(static_cast<double>(k));
  }

  std::vector<double> sorted(data.begin(), data.end());
  std::sort(sorted.begin(), sorted.end());
  ctx.n_unique = static_cast<double>(
      std::unique(sorted.begin(), sorted.end()) - sorted.begin());

  // Initial bracket width grows with sample size, then doubles until the
  // residual changes sign; no sign change by t = 0.1 means no usable root.
  const double n_clamped = std::clamp(ctx.n_unique, 50.0, 1050.0);
  double hi = 1e-12 + 0.01 * (n_clamped - 50.0) / 1000.0;
  const double f_lo = fixed_point_residual(0.0, ctx);
  if (!std::isfinite(f_lo)) return std::nullopt;
  double f_hi = fixed_point_residual(hi, ctx);
  while (!(std::isfinite(f_hi) && f_lo * f_hi < 0.0)) {
    if (hi >= kMaxDiffusionTime) return std::nullopt;
    hi = std::min(hi * 2.0, kMaxDiffusionTime);
    f_hi = fixed_point_residual(hi, ctx);
  }

  double a = 0.0;
  double fa = f_lo;
  double b = hi;
  for (int iter = 0; iter < 80 && b - a > 1e-16; ++iter) {
    const double mid = 0.5 * (a + b);
    const double fm = fixed_point_residual(mid, ctx);
    if (!std::isfinite(fm)) return std::nullopt;
    if (fa * fm <= 0.0) {
      b = mid;
    } else {
      a = mid;
      fa = fm;
    }
  }
  const double t_star = 0.5 * (a + b);
  if (!(t_star > 0.0)) return std::nullopt;
  return std::sqrt(t_star) * range;
}

double silverman_bandwidth(std::span<const double> data) {
  require(!data.empty(), ErrorCode::invalid_argument,
          "bandwidth selection needs data");
  const double n = static_cast<double>(data.size());
  double mean = 0.0;
  for (double x : data) mean += x;
  mean /= n;
  double var = 0.0;
  for (double x : data) var += (x - mean) * (x - mean);
  const double sd = std::sqrt(var / n);
  return 1.06 * sd * std::pow(n, -0.2);
}

Kde2D::Kde2D(std::vector<JointAction> samples, double bandwidth1,
             double bandwidth2)
    : samples_(std::move(samples)), h1_(bandwidth1), h2_(bandwidth2) {
  require(!samples_.empty(), ErrorCode::invalid_argument,
          "density needs at least one sample");
  require(h1_ > 0.0 && h2_ > 0.0, ErrorCode::invalid_argument,
          "bandwidths must be positive");
}

double Kde2D::eval(const JointAction& point) const {
  const double norm =
      1.0 / (2.0 * std::numbers::pi * h1_ * h2_ *
             static_cast<double>(samples_.size()));
  double sum = 0.0;
  for (const auto& s : samples_) {
    const double d1 = (point.a1 - s.a1) / h1_;
    const double d2 = (point.a2 - s.a2) / h2_;
    sum += std::exp(-0.5 * (d1 * d1 + d2 * d2));
  }
  return norm * sum;
}

Kde2D kde_fit(std::vector<JointAction> samples) {
  require(samples.size() >= 2, ErrorCode::invalid_argument,
          "density fitting needs at least two samples");
  std::vector<double> dim1(samples.size());
  std::vector<double> dim2(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    dim1[i] = samples[i].a1;
    dim2[i] = samples[i].a2;
  }
  const auto pick = [](std::span<const double> data) {
    const std::optional<double> h = isj_bandwidth(data);
    return std::max(h ? *h : silverman_bandwidth(data), kBandwidthFloor);
  };
  const double h1 = pick(dim1);
  const double h2 = pick(dim2);
  return Kde2D(std::move(samples), h1, h2);
}

}  // namespace selfsep
