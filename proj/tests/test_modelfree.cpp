#include <algorithm>
#include <cmath>
#include <vector>

#include <doctest.h>

#include "selfsep/error.hpp"
#include "selfsep/modelfree.hpp"
#include "selfsep/rng.hpp"

using namespace selfsep;

namespace {

// Independent restatement of the regressor in long double, without the
// min-distance stabilization (valid while distances stay small).
JointAction lw_oracle(const std::vector<std::vector<double>>& inputs,
                      const std::vector<JointAction>& outputs,
                      const std::vector<double>& query) {
  const std::size_t dims = query.size();
  const auto n = static_cast<long double>(inputs.size());
  std::vector<long double> mean(dims, 0.0L);
  std::vector<long double> sd(dims, 0.0L);
  for (const auto& f : inputs)
    for (std::size_t k = 0; k < dims; ++k) mean[k] += f[k];
  for (auto& m : mean) m /= n;
  for (const auto& f : inputs)
    for (std::size_t k = 0; k < dims; ++k) {
      const long double d = f[k] - mean[k];
      sd[k] += d * d;
    }
  for (auto& s : sd) {
    s = std::sqrt(s / n);
    if (s == 0.0L) s = 1.0L;
  }

  long double total = 0.0L;
  long double a1 = 0.0L;
  long double a2 = 0.0L;
  for (std::size_t j = 0; j < inputs.size(); ++j) {
    long double dist_sq = 0.0L;
    for (std::size_t k = 0; k < dims; ++k) {
      const long double d = (query[k] - inputs[j][k]) / sd[k];
      dist_sq += d * d;
    }
    const long double z = std::exp(-std::sqrt(dist_sq));
    total += z;
    a1 += z * outputs[j].a1;
    a2 += z * outputs[j].a2;
  }
  JointAction out;
  out.a1 = static_cast<double>(a1 / total);
  out.a2 = static_cast<double>(a2 / total);
  return out;
}

std::vector<double> random_features(std::size_t dims, RandomSource& rng) {
  std::vector<double> f(dims);
  for (auto& v : f) v = rng.next_uniform(-3.0, 3.0);
  return f;
}

JointAction random_action(RandomSource& rng) {
  JointAction a;
  a.a1 = rng.next_uniform(-1.0, 1.0);
  a.a2 = rng.next_uniform(-1.0, 1.0);
  return a;
}

EncounterGeometry random_geometry(RandomSource& rng) {
  EncounterGeometry g;
  g.ownship = {rng.next_uniform(-100.0, 100.0), rng.next_uniform(-100.0, 100.0),
               rng.next_uniform(-500.0, 500.0), rng.next_uniform(-500.0, 500.0)};
  g.intruder = {rng.next_uniform(-5000.0, 5000.0),
                rng.next_uniform(-5000.0, 5000.0),
                rng.next_uniform(-500.0, 500.0), rng.next_uniform(-500.0, 500.0)};
  return g;
}

DatasetRecord record_of(const EncounterGeometry& g, const JointAction& a,
                        Fidelity fidelity) {
  DatasetRecord r;
  r.fidelity = fidelity;
  r.sample.geometry = g;
  r.sample.a1 = a.a1;
  r.sample.a2 = a.a2;
  return r;
}

}  // namespace

TEST_CASE("geometry features are the eight state components in order") {
  EncounterGeometry g;
  g.ownship = {1.0, 2.0, 3.0, 4.0};
  g.intruder = {5.0, 6.0, 7.0, 8.0};
  CHECK(geometry_features(g) ==
        std::vector<double>{1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0});
}

TEST_CASE("feature stats use the population deviation and guard constants") {
  const std::vector<std::vector<double>> features{{0.0, 10.0},
                                                  {2.0, 10.0},
                                                  {4.0, 10.0}};
  const FeatureStats stats = FeatureStats::fit(features);
  REQUIRE(stats.mean.size() == 2);
  CHECK(stats.mean[0] == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(stats.mean[1] == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(stats.sd[0] == doctest::Approx(std::sqrt(8.0 / 3.0)).epsilon(1e-15));
  // A constant dimension gets sd 1 so it never perturbs a distance.
  CHECK(stats.sd[1] == 1.0);

  CHECK_THROWS_AS(FeatureStats::fit({}), Error);
}

TEST_CASE("standardized distance divides per dimension before the norm") {
  FeatureStats stats;
  stats.mean = {0.0, 0.0};
  stats.sd = {1.0, 2.0};
  const std::vector<double> a{0.0, 0.0};
  const std::vector<double> b{2.0, 2.0};
  CHECK(standardized_distance(a, b, stats) ==
        doctest::Approx(std::sqrt(5.0)).epsilon(1e-15));

  stats.sd = {1.0, 1.0};
  CHECK(standardized_distance(a, b, stats) ==
        doctest::Approx(std::sqrt(8.0)).epsilon(1e-15));

  const std::vector<double> short_vec{1.0};
  CHECK_THROWS_AS(standardized_distance(a, short_vec, stats), Error);
}

TEST_CASE("kernel weights form a softmin distribution") {
  const std::vector<double> distances{0.3, 1.2, 0.05, 2.0, 0.9};
  const std::vector<double> z = kernel_weights(distances);
  REQUIRE(z.size() == distances.size());

  double sum = 0.0;
  for (const double w : z) {
    CHECK(w > 0.0);
    sum += w;
  }
  CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));

  // Direct, unstabilized evaluation as the oracle.
  double total = 0.0;
  for (const double d : distances) total += std::exp(-d);
  for (std::size_t j = 0; j < z.size(); ++j) {
    CHECK(z[j] == doctest::Approx(std::exp(-distances[j]) / total).epsilon(1e-14));
  }

  // Closer points weigh more.
  CHECK(z[2] > z[0]);
  CHECK(z[0] > z[4]);
  CHECK(z[4] > z[1]);
  CHECK(z[1] > z[3]);
}

TEST_CASE("kernel weights survive distances that would underflow") {
  const std::vector<double> z = kernel_weights(std::vector<double>{1000.0, 1001.0});
  CHECK(z[0] == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
  CHECK(z[1] == doctest::Approx(std::exp(-1.0) / (1.0 + std::exp(-1.0)))
                    .epsilon(1e-14));

  // A uniform shift of every distance leaves the weights unchanged.
  const std::vector<double> base{0.1, 0.7, 0.4};
  std::vector<double> shifted = base;
  for (auto& d : shifted) d += 500.0;
  const std::vector<double> zb = kernel_weights(base);
  const std::vector<double> zs = kernel_weights(shifted);
  for (std::size_t j = 0; j < zb.size(); ++j) {
    CHECK(zs[j] == doctest::Approx(zb[j]).epsilon(1e-12));
  }

  CHECK(kernel_weights(std::vector<double>{42.0}) == std::vector<double>{1.0});
  CHECK_THROWS_AS(kernel_weights(std::vector<double>{}), Error);
}

TEST_CASE("a single-point regressor always returns its one action") {
  std::vector<std::vector<double>> inputs{{1.0, 2.0, 3.0}};
  std::vector<JointAction> outputs(1);
  outputs[0].a1 = 0.25;
  outputs[0].a2 = -0.5;
  const LwPredictor model(std::move(inputs), std::move(outputs));
  CHECK(model.size() == 1);
  CHECK(model.dimensions() == 3);

  const JointAction far = model.predict(std::vector<double>{50.0, -9.0, 0.0});
  CHECK(far.a1 == 0.25);
  CHECK(far.a2 == -0.5);
}

TEST_CASE("an equidistant query averages the two actions") {
  std::vector<std::vector<double>> inputs{{-1.0, 0.0}, {1.0, 0.0}};
  std::vector<JointAction> outputs(2);
  outputs[0].a1 = 0.2;
  outputs[0].a2 = -0.6;
  outputs[1].a1 = 0.4;
  outputs[1].a2 = 0.8;
  const LwPredictor model(std::move(inputs), std::move(outputs));

  const JointAction mid = model.predict(std::vector<double>{0.0, 0.0});
  CHECK(mid.a1 == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(mid.a2 == doctest::Approx(0.1).epsilon(1e-14));

  // At a training point the nearer action dominates.
  const JointAction at_first = model.predict(std::vector<double>{-1.0, 0.0});
  CHECK(std::abs(at_first.a1 - 0.2) < std::abs(at_first.a1 - 0.4));
}

TEST_CASE("predictions match the long-double oracle on random sets") {
  RandomSource rng(4242);
  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  for (int j = 0; j < 12; ++j) {
    inputs.push_back(random_features(5, rng));
    outputs.push_back(random_action(rng));
  }
  const LwPredictor model{std::vector(inputs), std::vector(outputs)};

  for (int q = 0; q < 6; ++q) {
    const std::vector<double> query = random_features(5, rng);
    const JointAction expected = lw_oracle(inputs, outputs, query);
    const JointAction got = model.predict(query);
    CHECK(got.a1 == doctest::Approx(expected.a1).epsilon(1e-12));
    CHECK(got.a2 == doctest::Approx(expected.a2).epsilon(1e-12));
  }
}

TEST_CASE("predictions are convex combinations of training actions") {
  RandomSource rng(86);
  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  double lo1 = 1e9, hi1 = -1e9, lo2 = 1e9, hi2 = -1e9;
  for (int j = 0; j < 20; ++j) {
    inputs.push_back(random_features(4, rng));
    outputs.push_back(random_action(rng));
    lo1 = std::min(lo1, outputs.back().a1);
    hi1 = std::max(hi1, outputs.back().a1);
    lo2 = std::min(lo2, outputs.back().a2);
    hi2 = std::max(hi2, outputs.back().a2);
  }
  const LwPredictor model(std::move(inputs), std::move(outputs));
  for (int q = 0; q < 50; ++q) {
    const JointAction p = model.predict(random_features(4, rng));
    CHECK(p.a1 >= lo1);
    CHECK(p.a1 <= hi1);
    CHECK(p.a2 >= lo2);
    CHECK(p.a2 <= hi2);
  }
}

TEST_CASE("training order does not change predictions") {
  RandomSource rng(9001);
  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  for (int j = 0; j < 10; ++j) {
    inputs.push_back(random_features(3, rng));
    outputs.push_back(random_action(rng));
  }
  const LwPredictor forward{std::vector(inputs), std::vector(outputs)};

  std::vector<std::size_t> order(inputs.size());
  for (std::size_t j = 0; j < order.size(); ++j) order[j] = order.size() - 1 - j;
  std::vector<std::vector<double>> rev_inputs;
  std::vector<JointAction> rev_outputs;
  for (const std::size_t j : order) {
    rev_inputs.push_back(inputs[j]);
    rev_outputs.push_back(outputs[j]);
  }
  const LwPredictor reversed(std::move(rev_inputs), std::move(rev_outputs));

  for (int q = 0; q < 5; ++q) {
    const std::vector<double> query = random_features(3, rng);
    const JointAction a = forward.predict(query);
    const JointAction b = reversed.predict(query);
    CHECK(a.a1 == doctest::Approx(b.a1).epsilon(1e-12));
    CHECK(a.a2 == doctest::Approx(b.a2).epsilon(1e-12));
  }
}

TEST_CASE("the high-fidelity fit regresses over geometry features") {
  RandomSource rng(1123);
  Dataset train;
  std::vector<std::vector<double>> inputs;
  std::vector<JointAction> outputs;
  for (int j = 0; j < 15; ++j) {
    const EncounterGeometry g = random_geometry(rng);
    const JointAction a = random_action(rng);
    train.push_back(record_of(g, a, Fidelity::high));
    inputs.push_back(geometry_features(g));
    outputs.push_back(a);
  }
  const LwPredictor model = fit_lw_hf(train);
  CHECK(model.dimensions() == 8);
  CHECK(model.size() == train.size());

  const EncounterGeometry query = random_geometry(rng);
  const JointAction expected = lw_oracle(inputs, outputs, geometry_features(query));
  const JointAction got = model.predict(geometry_features(query));
  CHECK(got.a1 == doctest::Approx(expected.a1).epsilon(1e-12));
  CHECK(got.a2 == doctest::Approx(expected.a2).epsilon(1e-12));

  CHECK_THROWS_AS(fit_lw_hf(Dataset{}), Error);
}

TEST_CASE("a single low-fidelity record reduces the fusion to high-only") {
  // One low record makes the low regressor a constant, so the two appended
  // feature dimensions are constant across the augmented training set, get
  // sd 1, and drop out of every distance: the fused predictor must agree
  // with the high-only predictor bit for bit.
  RandomSource rng(77);
  Dataset train_l;
  train_l.push_back(
      record_of(random_geometry(rng), random_action(rng), Fidelity::low));
  Dataset train_h;
  for (int j = 0; j < 9; ++j) {
    train_h.push_back(
        record_of(random_geometry(rng), random_action(rng), Fidelity::high));
  }

  const LwMfPredictor fused = fit_lw_mf(train_l, train_h);
  const LwPredictor high_only = fit_lw_hf(train_h);
  for (int q = 0; q < 8; ++q) {
    const EncounterGeometry query = random_geometry(rng);
    const JointAction a = fused.predict(query);
    const JointAction b = high_only.predict(geometry_features(query));
    CHECK(a.a1 == b.a1);
    CHECK(a.a2 == b.a2);
  }
}

TEST_CASE("the fused fit composes the low regressor into ten dimensions") {
  RandomSource rng(2025);
  Dataset train_l;
  for (int j = 0; j < 14; ++j) {
    train_l.push_back(
        record_of(random_geometry(rng), random_action(rng), Fidelity::low));
  }
  Dataset train_h;
  for (int j = 0; j < 6; ++j) {
    train_h.push_back(
        record_of(random_geometry(rng), random_action(rng), Fidelity::high));
  }

  const LwMfPredictor fused = fit_lw_mf(train_l, train_h);
  CHECK(fused.low_fidelity().dimensions() == 8);
  CHECK(fused.low_fidelity().size() == train_l.size());

  // Rebuild the composition explicitly: the low regressor's prediction is
  // appended to the geometry features, and a fresh regressor is fit on the
  // result.  fit_lw_mf must produce exactly this.
  const LwPredictor low = fit_lw_hf(train_l);
  std::vector<std::vector<double>> aug_inputs;
  std::vector<JointAction> aug_outputs;
  for (const auto& r : train_h) {
    std::vector<double> f = geometry_features(r.sample.geometry);
    const JointAction pred = low.predict(f);
    f.push_back(pred.a1);
    f.push_back(pred.a2);
    aug_inputs.push_back(std::move(f));
    JointAction a;
    a.a1 = r.sample.a1;
    a.a2 = r.sample.a2;
    aug_outputs.push_back(a);
  }
  const LwPredictor augmented(std::move(aug_inputs), std::move(aug_outputs));

  for (int q = 0; q < 8; ++q) {
    const EncounterGeometry query = random_geometry(rng);
    std::vector<double> f = geometry_features(query);
    const JointAction pred = low.predict(f);
    f.push_back(pred.a1);
    f.push_back(pred.a2);
    const JointAction expected = augmented.predict(f);
    const JointAction got = fused.predict(query);
    CHECK(got.a1 == expected.a1);
    CHECK(got.a2 == expected.a2);
  }

  CHECK_THROWS_AS(fit_lw_mf(Dataset{}, train_h), Error);
  CHECK_THROWS_AS(fit_lw_mf(train_l, Dataset{}), Error);
}
