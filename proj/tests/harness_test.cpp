#include <gtest/gtest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>
#include <string>

#include "o2nc/harness.hpp"

namespace o2nc {
namespace {

using nlohmann::json;
namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("o2nc_harness_test_" + name);
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

json wave_doc() {
  return json::parse(R"({
    "problem": {"name": "BOUNDED_WAVE",
                "params": {"d": 2, "G": [1.0, 2.0], "sigma": 0.5, "x0": 1.0}},
    "learner": {"mode": "BETA_FTRL", "sizing": "auto"},
    "epsilon": 1.0,
    "lambda": 1.0,
    "C": "auto",
    "seeds": [3, 1, 2],
    "T_override": 300,
    "flavor": "L2",
    "output_dir": "unused"
  })");
}

TEST(Config, ParsesAndRoundTrips) {
  const ExperimentConfig c = parse_config(wave_doc());
  EXPECT_EQ(c.problem.name, "BOUNDED_WAVE");
  EXPECT_EQ(c.problem.params.at("G"), std::vector<double>({1.0, 2.0}));
  EXPECT_EQ(c.learner.mode, LearnerMode::kBetaFtrl);
  EXPECT_TRUE(c.learner.auto_sizing);
  EXPECT_FALSE(c.C.has_value());
  EXPECT_EQ(c.seeds, std::vector<std::uint64_t>({3, 1, 2}));
  EXPECT_EQ(c.T_override, 300u);

  const ExperimentConfig again = parse_config(to_json(c));
  EXPECT_EQ(again, c);
  EXPECT_EQ(to_json(again), to_json(c));
}

TEST(Config, RoundTripProperty) {
  RandomStream rng(8);
  for (int trial = 0; trial < 100; ++trial) {
    json doc = wave_doc();
    doc["epsilon"] = 0.01 + rng.next_uniform();
    doc["lambda"] = 0.1 + 5.0 * rng.next_uniform();
    if (trial % 2) doc["C"] = 0.5 + rng.next_uniform();
    if (trial % 3 == 0) {
      doc["learner"] = {{"sizing", "manual"},
                        {"D", rng.next_uniform() + 0.01},
                        {"beta", 0.5},
                        {"mode", "DISCOUNTED_OGD"},
                        {"eta", 0.3}};
    }
    if (trial % 5 == 0) doc["modes"] = {"CLIPPED_ADAM", "BETA_FTRL"};
    if (trial % 7 == 0) doc["threshold"] = 2.5;
    doc["flavor"] = trial % 2 ? "L1" : "L2";
    const ExperimentConfig c = parse_config(doc);
    ASSERT_EQ(parse_config(to_json(c)), c);
  }
}

TEST(Config, StrictErrors) {
  auto expect_error = [](json doc) {
    EXPECT_THROW(parse_config(doc), ConfigError) << doc.dump();
  };
  json typo = wave_doc();
  typo["lamda"] = 1.0;
  expect_error(typo);
  json nested = wave_doc();
  nested["learner"]["Beta"] = 0.9;
  expect_error(nested);
  json problem = wave_doc();
  problem["problem"]["extra"] = 1;
  expect_error(problem);
  json name = wave_doc();
  name["problem"]["name"] = "NOPE";
  expect_error(name);
  json dup = wave_doc();
  dup["seeds"] = {1, 1};
  expect_error(dup);
  json empty = wave_doc();
  empty["seeds"] = json::array();
  expect_error(empty);
  json neg = wave_doc();
  neg["seeds"] = {-1};
  expect_error(neg);
  json manual = wave_doc();
  manual["learner"] = {{"sizing", "manual"}, {"D", 0.1}};
  expect_error(manual);
  json no_eps = wave_doc();
  no_eps.erase("epsilon");
  expect_error(no_eps);
  json mode = wave_doc();
  mode["learner"]["mode"] = "SGD";
  expect_error(mode);
  json flavor = wave_doc();
  flavor["flavor"] = "L3";
  expect_error(flavor);
  json type = wave_doc();
  type["epsilon"] = "one";
  expect_error(type);
}

TEST(Config, LoadFromFile) {
  const fs::path dir = scratch("load");
  fs::create_directories(dir);
  std::ofstream(dir / "c.json") << wave_doc().dump();
  EXPECT_EQ(load_config(dir / "c.json"), parse_config(wave_doc()));
  std::ofstream(dir / "bad.json") << "{not json";
  EXPECT_THROW(load_config(dir / "bad.json"), ConfigError);
  EXPECT_THROW(load_config(dir / "missing.json"), ConfigError);
}

TEST(ShippedConfigs, Parse) {
  for (const auto& entry :
       fs::directory_iterator(fs::path(O2NC_SOURCE_DIR) / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const ExperimentConfig c = load_config(entry.path());
    const auto modes =
        c.modes.empty() ? std::vector<LearnerMode>{c.learner.mode.value_or(
                              LearnerMode::kBetaFtrl)}
                        : c.modes;
    for (auto m : modes) EXPECT_NO_THROW(plan_run(c, m)) << entry.path();
  }
}

TEST(Plan, AutoSizing) {
  json doc = wave_doc();
  doc.erase("T_override");
  doc["C"] = 1.0;
  ExperimentConfig c = parse_config(doc);
  const RunPlan p = plan_run(c, LearnerMode::kBetaFtrl);
  const TheoremParams t = theorem1_params(1.0, 1.0, 1.0, p.problem.delta_bound);
  EXPECT_EQ(p.beta, t.beta);
  EXPECT_EQ(p.learner.radius, t.radius);
  EXPECT_EQ(p.learner.beta, t.beta);
  EXPECT_EQ(p.T, t.T);

  const RunPlan adam = plan_run(c, LearnerMode::kClippedAdam);
  const TheoremParams t2 =
      theorem2_params(1.0, 1.0, 1.0, adam.problem.delta_bound, 2);
  EXPECT_EQ(adam.learner.radius, t2.radius);

  const RunPlan sf = plan_run(c, LearnerMode::kScaleFreeFtrl);
  EXPECT_EQ(sf.learner.beta, 1.0);
  EXPECT_EQ(sf.beta, t.beta);

  c.flavor = Flavor::kL1;
  const RunPlan reduced = plan_run(c, LearnerMode::kBetaFtrl);
  const auto [lam, eps] = l1_l2_reduction(1.0, 1.0, 2);
  EXPECT_EQ(reduced.learner.radius,
            theorem1_params(eps, lam, 1.0, reduced.problem.delta_bound).radius);
}

TEST(Plan, DefaultC) {
  ExperimentConfig c = parse_config(wave_doc());
  const RunPlan p = plan_run(c, LearnerMode::kBetaFtrl);
  EXPECT_NEAR(p.C, std::sqrt(5.0) + std::sqrt(0.5), 1e-15);
  c.flavor = Flavor::kL1;
  EXPECT_NEAR(plan_run(c, LearnerMode::kBetaFtrl).C, 4.0, 1e-15);
}

TEST(Plan, BetaOutOfRangeIsConfigError) {
  json doc = wave_doc();
  doc["C"] = 0.01;
  EXPECT_THROW(plan_run(parse_config(doc), LearnerMode::kBetaFtrl),
               ConfigError);
}

TEST(Plan, DeskCaps) {
  json doc = wave_doc();
  doc["T_override"] = 200001;
  const RunPlan p = plan_run(parse_config(doc), LearnerMode::kBetaFtrl);
  EXPECT_THROW(enforce_caps(p, 1, false), ConfigError);
  EXPECT_NO_THROW(enforce_caps(p, 1, true));
  doc["T_override"] = 10;
  const RunPlan q = plan_run(parse_config(doc), LearnerMode::kBetaFtrl);
  EXPECT_THROW(enforce_caps(q, 33, false), ConfigError);
  EXPECT_NO_THROW(enforce_caps(q, 32, false));
  doc["problem"]["params"] = {{"d", 65}};
  const RunPlan wide = plan_run(parse_config(doc), LearnerMode::kBetaFtrl);
  EXPECT_THROW(enforce_caps(wide, 1, false), ConfigError);
}

TEST(Format, Doubles) {
  EXPECT_EQ(format_shortest(0.99), "0.99");
  EXPECT_EQ(format_shortest(0.0025), "0.0025");
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(0.0), "0");
  RandomStream rng(1);
  for (int k = 0; k < 1000; ++k) {
    const double v = std::ldexp(rng.next_uniform(), int(rng.next_u64() % 200) - 100);
    EXPECT_EQ(std::strtod(format_double(v).c_str(), nullptr), v);
    EXPECT_EQ(std::strtod(format_shortest(v).c_str(), nullptr), v);
  }
}

TEST(Run, CsvShapeAndSummary) {
  const fs::path out = scratch("run");
  ExperimentConfig c = parse_config(wave_doc());
  c.output_dir = out.string();
  const ExperimentResult r = run_experiment(c, RunOptions{});
  ASSERT_EQ(r.seeds.size(), 3u);
  for (std::uint64_t seed : c.seeds) {
    std::ifstream csv(out / "runs" / (std::to_string(seed) + ".csv"));
    std::string line;
    std::getline(csv, line);
    EXPECT_EQ(line, "# o2nc-lab v1");
    std::getline(csv, line);
    EXPECT_EQ(line,
              "t,alpha_t,z_norm,grad_norm_exact,regret,regret_bound,"
              "stationarity_value,ema_drift");
    std::uint64_t rows = 0;
    while (std::getline(csv, line)) {
      ++rows;
      EXPECT_EQ(line.substr(0, line.find(',')), std::to_string(rows));
    }
    EXPECT_EQ(rows, 300u);
  }
  const json summary = json::parse(slurp(out / "summary.json"));
  EXPECT_EQ(summary["version"], "o2nc-lab v1");
  EXPECT_EQ(summary["status"], "OK");
  EXPECT_EQ(parse_config(summary["config"]), c);
  std::multiset<std::uint64_t> seen;
  for (const auto& run : summary["runs"]) seen.insert(run["seed"].get<std::uint64_t>());
  EXPECT_EQ(seen, std::multiset<std::uint64_t>({1, 2, 3}));
  EXPECT_FALSE(r.bound_violation);
  EXPECT_GT(r.min_variance_margin, 0.0);
  EXPECT_LE(r.max_regret_ratio, 1.0);
}

TEST(Run, ByteIdenticalReplay) {
  const fs::path a = scratch("replay_a");
  const fs::path b = scratch("replay_b");
  ExperimentConfig c = parse_config(wave_doc());
  c.learner.mode = LearnerMode::kClippedAdam;
  c.output_dir = a.string();
  run_experiment(c, RunOptions{});
  c.output_dir = b.string();
  run_experiment(c, RunOptions{});
  for (std::uint64_t seed : c.seeds) {
    const std::string name = std::to_string(seed) + ".csv";
    EXPECT_EQ(slurp(a / "runs" / name), slurp(b / "runs" / name));
  }
}

TEST(Run, NoiselessHuberFromOriginStaysPut) {
  json doc = wave_doc();
  doc["problem"] = {{"name", "HUBER_VALLEY"},
                    {"params", {{"d", 3}, {"x0", 0.0}, {"sigma", 0.0}}}};
  doc["T_override"] = 200;
  ExperimentConfig c = parse_config(doc);
  const RunPlan plan = plan_run(c, LearnerMode::kBetaFtrl);
  EXPECT_EQ(plan.problem.delta_bound, 0.0);
  std::ostringstream csv;
  const SeedResult r = run_seed(plan, 5, &csv);
  EXPECT_EQ(r.summary.t_avg_stationarity, 0.0);
  EXPECT_EQ(r.summary.final_report.value, 0.0);
  EXPECT_FALSE(r.summary.bound_violation());
  std::istringstream in(csv.str());
  std::string line;
  std::getline(in, line);
  std::getline(in, line);
  while (std::getline(in, line)) {
    // z_norm, grad_norm_exact, stationarity_value and ema_drift all vanish.
    std::vector<std::string> cols;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cols.push_back(cell);
    ASSERT_EQ(cols.size(), 8u);
    EXPECT_EQ(cols[2], "0");
    EXPECT_EQ(cols[3], "0");
    EXPECT_EQ(cols[6], "0");
    EXPECT_EQ(cols[7], "0");
  }
}

TEST(Run, OgdIsNotRegretChecked) {
  json doc = wave_doc();
  doc["learner"] = {{"mode", "DISCOUNTED_OGD"}, {"sizing", "auto"}, {"eta", 5.0}};
  ExperimentConfig c = parse_config(doc);
  const SeedResult r = run_seed(plan_run(c, LearnerMode::kDiscountedOgd), 1, nullptr);
  EXPECT_FALSE(r.summary.regret_checked);
  EXPECT_TRUE(r.summary.increments_bounded);
  EXPECT_TRUE(r.summary.variance.holds);
}

TEST(Compare, IdenticalModesGiveIdenticalMedians) {
  json doc = wave_doc();
  doc["modes"] = {"BETA_FTRL", "BETA_FTRL"};
  doc["threshold"] = 1.0;
  ExperimentConfig c = parse_config(doc);
  RunOptions opts;
  opts.write_files = false;
  const CompareResult r = compare_experiment(c, opts);
  ASSERT_EQ(r.modes.size(), 2u);
  EXPECT_EQ(r.modes[0].iterations, r.modes[1].iterations);
  EXPECT_EQ(r.modes[0].median_iterations, r.modes[1].median_iterations);
}

TEST(Compare, OneDimensionalLearnersCoincide) {
  json doc = wave_doc();
  doc["problem"]["params"] = {{"d", 1}, {"G", 1.0}, {"sigma", 0.5}};
  doc["modes"] = {"CLIPPED_ADAM", "BETA_FTRL"};
  doc["flavor"] = "L1";
  ExperimentConfig c = parse_config(doc);
  RunOptions opts;
  opts.write_files = false;
  const CompareResult r = compare_experiment(c, opts);
  EXPECT_EQ(r.modes[0].plan.learner.radius, r.modes[1].plan.learner.radius);
  EXPECT_EQ(r.modes[0].iterations, r.modes[1].iterations);
}

TEST(Compare, NeedsTwoModes) {
  json doc = wave_doc();
  doc["modes"] = {"BETA_FTRL"};
  EXPECT_THROW(compare_experiment(parse_config(doc), RunOptions{}), ConfigError);
}

TEST(Median, Values) {
  EXPECT_EQ(median({3.0, 1.0, 2.0}), 2.0);
  EXPECT_EQ(median({4.0, 1.0, 2.0, 3.0}), 2.5);
  EXPECT_THROW(median({}), std::invalid_argument);
}

TEST(RegretCheck, SmallGridPasses) {
  RegretGrid grid;
  grid.dims = {1, 3};
  grid.horizons = {10, 60};
  grid.betas = {0.5, 1.0};
  grid.trials = 1;
  const RegretCheckResult r = regret_check(grid);
  EXPECT_TRUE(r.passed());
  EXPECT_EQ(r.cells.size(), 8u);
  EXPECT_EQ(r.sequences, 8u * all_sequence_kinds().size());
  EXPECT_LE(r.max_ratio, 1.0);
  EXPECT_GT(r.max_ratio, 0.0);
}

TEST(RegretCheck, ZeroSequenceHasZeroRegret) {
  LearnerConfig cfg;
  cfg.beta = 0.9;
  const SequenceOutcome o =
      play_sequence(cfg, 3, 50, SequenceKind::kZero, RandomStream(1));
  EXPECT_EQ(o.max_ratio, 0.0);
  EXPECT_FALSE(o.violation.has_value());
}

TEST(RegretCheck, ViolationSerializes) {
  RegretViolation v;
  v.learner.mode = LearnerMode::kClippedAdam;
  v.kind = SequenceKind::kSignFlip;
  v.step = 4;
  v.gradients = {{1.0, -1.0}, {2.0, 0.5}};
  const json j = to_json(v);
  EXPECT_EQ(j["mode"], "CLIPPED_ADAM");
  EXPECT_EQ(j["sequence"], "sign_flip");
  EXPECT_EQ(j["gradients"][1][0], 2.0);
}

TEST(Params, Report) {
  ParamsRequest req;
  const json j = params_report(req);
  EXPECT_EQ(j["beta"], 0.99);
  EXPECT_EQ(j["D"], 0.0025);
  EXPECT_EQ(j["T"], 1200);
  EXPECT_EQ(j["complexity"]["l2"], 1.0);
  req.flavor = Flavor::kL1;
  req.dim = 4;
  req.lipschitz_vec = ParamVector({1.0, 0.0, 0.0, 0.0});
  req.noise_vec = ParamVector::zeros(4);
  const json k = params_report(req);
  EXPECT_EQ(k["D"], 0.00125);
  EXPECT_EQ(k["T"], 1200);
  EXPECT_DOUBLE_EQ(k["complexity"]["coordinate_over_global"].get<double>(), 0.25);
  req.epsilon = 10.0;
  EXPECT_THROW(params_report(req), std::domain_error);
}

}  // namespace
}  // namespace o2nc
