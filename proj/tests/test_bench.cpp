#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <doctest.h>

#include "selfsep/bench.hpp"
#include "selfsep/error.hpp"
#include "test_util.hpp"

using namespace selfsep;

namespace {

JointAction action_at(double a1, double a2) {
  JointAction a;
  a.a1 = a1;
  a.a2 = a2;
  return a;
}

// Small enough that every cell runs in milliseconds.
ExperimentConfig tiny_config() {
  ExperimentConfig c;
  config_set(c, "methods", "lw-hf, map-hf");
  config_set(c, "n_high_sweep", "3, 5");
  config_set(c, "trials", "2");
  config_set(c, "n_test", "4");
  config_set(c, "n_low", "5");
  config_set(c, "n_ensemble", "10");
  config_set(c, "grid.values", "0.85, 0.95");
  config_set(c, "decision.observation_samples", "2");
  config_set(c, "decision.candidate_actions", "6");
  config_set(c, "n_prediction_samples", "2");
  config_set(c, "base_seed", "42");
  return c;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

TrialResult make_result(const char* scenario, Method method, int n_high,
                        int trial, std::optional<double> efficiency) {
  TrialResult r;
  r.scenario = scenario;
  r.method = method;
  r.n_high = n_high;
  r.n_low = 100;
  r.trial = trial;
  r.seed = 7;
  r.error = efficiency ? 1.0 : 0.0;
  r.lower_bound = efficiency ? *efficiency : 0.5;
  r.efficiency = efficiency;
  return r;
}

}  // namespace

TEST_CASE("test-set error sums per-encounter Euclidean distances") {
  const std::vector<JointAction> predicted{action_at(0.0, 0.0),
                                           action_at(1.0, 1.0),
                                           action_at(0.0, 0.0)};
  const std::vector<JointAction> actual{action_at(3.0, 4.0),
                                        action_at(1.0, 1.0),
                                        action_at(5.0, 12.0)};
  CHECK(test_set_error(predicted, actual) == doctest::Approx(18.0).epsilon(1e-12));

  CHECK_THROWS_AS(test_set_error(predicted, std::vector<JointAction>(2)), Error);
  CHECK_THROWS_AS(test_set_error({}, {}), Error);
}

TEST_CASE("predictive efficiency uses the exact sentinel below threshold") {
  const std::optional<double> normal = predictive_efficiency(4.0, 2.0);
  REQUIRE(normal.has_value());
  CHECK(*normal == doctest::Approx(0.5).epsilon(1e-15));

  CHECK(!predictive_efficiency(1e-10, 2.0).has_value());
  CHECK(!predictive_efficiency(0.0, 0.0).has_value());
  // Exactly at the threshold still divides.
  CHECK(predictive_efficiency(kExactThreshold, 2.0).has_value());

  CHECK_THROWS_AS(predictive_efficiency(-1.0, 2.0), Error);
  CHECK_THROWS_AS(predictive_efficiency(1.0, -2.0), Error);
}

TEST_CASE("cell and shared seeds chain the documented components") {
  const uint64_t base = 99;
  const uint64_t expected_cell = mix64(
      mix64(mix64(mix64(base, hash_label("cell")), method_id(Method::map_mf)),
            17),
      3);
  CHECK(cell_seed(base, Method::map_mf, 17, 3) == expected_cell);

  const uint64_t expected_shared =
      mix64(mix64(mix64(base, hash_label("test_set")), 17), 3);
  CHECK(shared_seed(base, "test_set", 17, 3) == expected_shared);

  // Different methods change the cell seed but never the shared seeds.
  CHECK(cell_seed(base, Method::lw_hf, 17, 3) !=
        cell_seed(base, Method::lw_mf, 17, 3));
  CHECK(cell_seed(base, Method::lw_hf, 17, 3) !=
        cell_seed(base, Method::lw_hf, 18, 3));
  CHECK(cell_seed(base, Method::lw_hf, 17, 3) !=
        cell_seed(base, Method::lw_hf, 17, 4));
  CHECK(shared_seed(base, "test_set", 17, 3) !=
        shared_seed(base, "lower_bound", 17, 3));
}

TEST_CASE("the lower bound replays ground-truth predictions per encounter") {
  ExperimentConfig c = tiny_config();
  const Dataset test = generate_dataset(
      4, Split::test, FidelityModel::high(), c.scenario, c.scenario_config,
      c.decision, RandomSource(1234));
  const RandomSource rng(5678);
  const double bound =
      lower_bound_error(test, c.scenario, c.decision, 2, rng);

  std::vector<JointAction> predicted;
  for (std::size_t i = 0; i < test.size(); ++i) {
    predicted.push_back(predict_map(test[i].sample.geometry,
                                    c.scenario.w_high, FidelityModel::high(),
                                    c.decision, 2, rng.substream(i)));
  }
  CHECK(bound == test_set_error(predicted, dataset_actions(test)));
  CHECK_THROWS_AS(
      lower_bound_error(Dataset{}, c.scenario, c.decision, 2, rng), Error);
}

TEST_CASE("run_condition is deterministic and shares data across methods") {
  const ExperimentConfig c = tiny_config();

  const TrialResult a = run_condition(c, Method::lw_hf, 3, 1);
  const TrialResult b = run_condition(c, Method::lw_hf, 3, 1);
  CHECK(a.seed == b.seed);
  CHECK(a.error == b.error);
  CHECK(a.lower_bound == b.lower_bound);
  CHECK(a.efficiency == b.efficiency);
  CHECK(a.scenario == "identical");
  CHECK(a.n_high == 3);
  CHECK(a.n_low == c.n_low);
  CHECK(a.trial == 1);
  CHECK(a.seed == cell_seed(c.base_seed, Method::lw_hf, 3, 1));

  // Same cell, different method: the lower bound comes from the shared
  // stream, so it must match exactly even though the training data differ.
  const TrialResult m = run_condition(c, Method::map_hf, 3, 1);
  CHECK(m.lower_bound == a.lower_bound);
  CHECK(m.seed != a.seed);
}

TEST_CASE("high-only methods ignore the low-fidelity budget") {
  ExperimentConfig small = tiny_config();
  ExperimentConfig large = tiny_config();
  config_set(small, "n_low", "5");
  config_set(large, "n_low", "50");

  const TrialResult a = run_condition(small, Method::lw_hf, 4, 0);
  const TrialResult b = run_condition(large, Method::lw_hf, 4, 0);
  CHECK(a.error == b.error);
  CHECK(a.lower_bound == b.lower_bound);
  CHECK(a.n_low == 5);
  CHECK(b.n_low == 50);
}

TEST_CASE("curve aggregation means the numeric efficiencies only") {
  std::vector<TrialResult> raw;
  raw.push_back(make_result("identical", Method::lw_hf, 10, 0, 0.5));
  raw.push_back(make_result("identical", Method::lw_hf, 10, 1, 0.7));
  raw.push_back(make_result("identical", Method::lw_hf, 10, 2, std::nullopt));
  raw.push_back(make_result("identical", Method::lw_hf, 10, 3, 0.6));
  raw.push_back(make_result("identical", Method::map_hf, 10, 0, 0.9));
  raw.push_back(make_result("identical", Method::lw_hf, 20, 0, std::nullopt));
  raw.push_back(make_result("large-diff", Method::lw_hf, 10, 0, 0.4));

  const std::vector<CurvePoint> curves = aggregate_curves(raw);
  REQUIRE(curves.size() == 4);

  // First-appearance order.
  CHECK(curves[0].method == Method::lw_hf);
  CHECK(curves[0].n_high == 10);
  CHECK(curves[0].scenario == "identical");
  CHECK(curves[1].method == Method::map_hf);
  CHECK(curves[2].n_high == 20);
  CHECK(curves[3].scenario == "large-diff");

  REQUIRE(curves[0].mean_efficiency.has_value());
  CHECK(*curves[0].mean_efficiency == doctest::Approx(0.6).epsilon(1e-12));
  CHECK(curves[0].trials == 3);
  // Sample sd of {0.5, 0.7, 0.6} is 0.1.
  CHECK(curves[0].std_error ==
        doctest::Approx(0.1 / std::sqrt(3.0)).epsilon(1e-12));

  // A single numeric trial has zero standard error.
  CHECK(curves[1].trials == 1);
  CHECK(curves[1].std_error == 0.0);

  // An all-sentinel cell stays `exact`.
  CHECK(!curves[2].mean_efficiency.has_value());
  CHECK(curves[2].trials == 0);
}

TEST_CASE("raw results round-trip through CSV with the exact sentinel") {
  std::vector<TrialResult> raw;
  raw.push_back(make_result("identical", Method::bayes_mf, 50, 2, 0.8751234));
  raw.push_back(make_result("small-diff", Method::lw_mf, 5, 0, std::nullopt));
  raw[0].seed = 18446744073709551615ull;  // largest u64 survives
  raw[0].error = 0.1 + 0.2;               // non-terminating binary fraction

  const std::string text = raw_results_to_csv(raw);
  CHECK(text.substr(0, text.find('\n')) == kRawResultsHeader);
  CHECK(text.find(",exact\n") != std::string::npos);

  std::istringstream in(text);
  const std::vector<TrialResult> loaded = raw_results_from_csv(in);
  REQUIRE(loaded.size() == raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CHECK(loaded[i].scenario == raw[i].scenario);
    CHECK(loaded[i].method == raw[i].method);
    CHECK(loaded[i].n_high == raw[i].n_high);
    CHECK(loaded[i].n_low == raw[i].n_low);
    CHECK(loaded[i].trial == raw[i].trial);
    CHECK(loaded[i].seed == raw[i].seed);
    CHECK(loaded[i].error == raw[i].error);
    CHECK(loaded[i].lower_bound == raw[i].lower_bound);
    CHECK(loaded[i].efficiency == raw[i].efficiency);
  }

  std::istringstream bad_header("nope\n");
  CHECK_THROWS_AS(raw_results_from_csv(bad_header), Error);
  std::istringstream short_row(std::string(kRawResultsHeader) +
                               "\nidentical,lw-hf,1\n");
  CHECK_THROWS_AS(raw_results_from_csv(short_row), Error);
}

TEST_CASE("curves CSV renders all-sentinel cells as exact") {
  std::vector<CurvePoint> curves(2);
  curves[0].scenario = "identical";
  curves[0].method = Method::lw_hf;
  curves[0].n_high = 10;
  curves[0].mean_efficiency = 0.625;
  curves[0].std_error = 0.03;
  curves[0].trials = 4;
  curves[1].scenario = "identical";
  curves[1].method = Method::map_mf;
  curves[1].n_high = 10;

  const std::string text = curves_to_csv(curves);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == kCurvesHeader);
  std::getline(in, line);
  CHECK(line == "identical,lw-hf,10,0.625,0.03,4");
  std::getline(in, line);
  CHECK(line == "identical,map-mf,10,exact,exact,0");
}

TEST_CASE("sweeps write stable artifacts and rerun byte-identically") {
  const ExperimentConfig c = tiny_config();
  const testing::TempDir dir;
  const auto first_dir = dir.path() / "first";
  const auto second_dir = dir.path() / "second";

  const SweepResult first = run_sweep(c, first_dir, true);
  REQUIRE(first.raw.size() == 8);  // 2 methods x 2 sweep points x 2 trials
  CHECK(first.curves.size() == 4);

  // Canonical cell order: methods, then n_high, then trial.
  CHECK(first.raw[0].method == Method::lw_hf);
  CHECK(first.raw[0].n_high == 3);
  CHECK(first.raw[0].trial == 0);
  CHECK(first.raw[1].trial == 1);
  CHECK(first.raw[2].n_high == 5);
  CHECK(first.raw[4].method == Method::map_hf);

  CHECK(std::filesystem::exists(first_dir / "raw.csv"));
  CHECK(std::filesystem::exists(first_dir / "curves.csv"));
  CHECK(std::filesystem::exists(first_dir / "meta.json"));
  CHECK(std::filesystem::exists(first_dir / "curves.svg"));
  CHECK(!std::filesystem::exists(first_dir / "raw.partial.csv"));

  const std::string meta = slurp(first_dir / "meta.json");
  CHECK(meta.find("\"config\"") != std::string::npos);
  CHECK(meta.find("\"base_seed\": \"42\"") != std::string::npos);
  CHECK(slurp(first_dir / "curves.svg").find("<svg") != std::string::npos);

  run_sweep(c, second_dir, true);
  CHECK(slurp(first_dir / "raw.csv") == slurp(second_dir / "raw.csv"));
  CHECK(slurp(first_dir / "curves.csv") == slurp(second_dir / "curves.csv"));
  CHECK(slurp(first_dir / "curves.svg") == slurp(second_dir / "curves.svg"));
}

TEST_CASE("parallel sweeps match serial sweeps byte for byte") {
  ExperimentConfig serial = tiny_config();
  ExperimentConfig parallel = tiny_config();
  config_set(parallel, "threads", "3");

  const testing::TempDir dir;
  const auto serial_dir = dir.path() / "serial";
  const auto parallel_dir = dir.path() / "parallel";
  run_sweep(serial, serial_dir, false);
  run_sweep(parallel, parallel_dir, false);

  CHECK(slurp(serial_dir / "raw.csv") == slurp(parallel_dir / "raw.csv"));
  CHECK(slurp(serial_dir / "curves.csv") == slurp(parallel_dir / "curves.csv"));
}

TEST_CASE("run_sweep returns results without an output directory") {
  ExperimentConfig c = tiny_config();
  config_set(c, "methods", "lw-hf");
  config_set(c, "n_high_sweep", "3");
  config_set(c, "trials", "1");
  const SweepResult result = run_sweep(c, std::nullopt, false);
  REQUIRE(result.raw.size() == 1);
  CHECK(result.curves.size() == 1);
  CHECK(result.raw[0].seed == cell_seed(42, Method::lw_hf, 3, 0));
}
