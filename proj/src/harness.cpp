#include "o2nc/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <set>
#include <sstream>
#include <thread>

namespace o2nc {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

namespace {

void reject_unknown(const json& obj, const std::set<std::string>& allowed,
                    const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be an object");
  for (const auto& [key, _] : obj.items()) {
    if (!allowed.contains(key)) {
      throw ConfigError("unknown key '" + key + "' in " + where);
    }
  }
}

double number_at(const json& obj, const std::string& key,
                 const std::string& where) {
  const json& v = obj.at(key);
  if (!v.is_number()) throw ConfigError(where + "." + key + " must be a number");
  return v.get<double>();
}

std::optional<double> optional_number(const json& obj, const std::string& key,
                                      const std::string& where) {
  if (!obj.contains(key) || obj.at(key).is_null()) return std::nullopt;
  return number_at(obj, key, where);
}

std::uint64_t unsigned_at(const json& v, const std::string& what) {
  if (!v.is_number_integer() || (v.is_number_integer() && v.get<double>() < 0)) {
    throw ConfigError(what + " must be a nonnegative integer");
  }
  return v.get<std::uint64_t>();
}

ProblemConfig parse_problem(const json& obj) {
  reject_unknown(obj, {"name", "params"}, "problem");
  if (!obj.contains("name") || !obj.at("name").is_string()) {
    throw ConfigError("problem.name must be a string");
  }
  ProblemConfig p;
  p.name = obj.at("name").get<std::string>();
  try {
    parse_problem_kind(p.name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (obj.contains("params")) {
    const json& params = obj.at("params");
    if (!params.is_object()) throw ConfigError("problem.params must be an object");
    for (const auto& [key, value] : params.items()) {
      if (value.is_number()) {
        p.params[key] = {value.get<double>()};
      } else if (value.is_array()) {
        std::vector<double> vals;
        for (const auto& item : value) {
          if (!item.is_number()) {
            throw ConfigError("problem.params." + key + " must hold numbers");
          }
          vals.push_back(item.get<double>());
        }
        if (vals.empty()) throw ConfigError("problem.params." + key + " is empty");
        p.params[key] = std::move(vals);
      } else {
        throw ConfigError("problem.params." + key + " must be a number or list");
      }
    }
  }
  return p;
}

LearnerMode mode_from(const json& v, const std::string& where) {
  if (!v.is_string()) throw ConfigError(where + " must be a string");
  try {
    return parse_learner_mode(v.get<std::string>());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

LearnerSection parse_learner(const json& obj) {
  reject_unknown(obj, {"mode", "sizing", "D", "beta", "eta"}, "learner");
  LearnerSection l;
  if (obj.contains("mode")) l.mode = mode_from(obj.at("mode"), "learner.mode");
  if (obj.contains("sizing")) {
    const json& s = obj.at("sizing");
    if (s == "auto") {
      l.auto_sizing = true;
    } else if (s == "manual") {
      l.auto_sizing = false;
    } else {
      throw ConfigError("learner.sizing must be \"auto\" or \"manual\"");
    }
  }
  l.radius = optional_number(obj, "D", "learner");
  l.beta = optional_number(obj, "beta", "learner");
  l.eta = optional_number(obj, "eta", "learner");
  return l;
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
  reject_unknown(doc,
                 {"problem", "learner", "modes", "epsilon", "lambda", "C",
                  "seeds", "T_override", "output_dir", "flavor", "threshold"},
                 "config");
  ExperimentConfig c;
  if (!doc.contains("problem")) throw ConfigError("config.problem is required");
  c.problem = parse_problem(doc.at("problem"));
  if (doc.contains("learner")) c.learner = parse_learner(doc.at("learner"));
  if (doc.contains("modes")) {
    if (!doc.at("modes").is_array()) throw ConfigError("modes must be a list");
    for (const auto& m : doc.at("modes")) c.modes.push_back(mode_from(m, "modes"));
  }
  c.epsilon = optional_number(doc, "epsilon", "config");
  c.lambda = optional_number(doc, "lambda", "config");
  if (doc.contains("C") && !(doc.at("C").is_string() && doc.at("C") == "auto")) {
    c.C = optional_number(doc, "C", "config");
  }
  if (!doc.contains("seeds") || !doc.at("seeds").is_array()) {
    throw ConfigError("config.seeds must be a list of integers");
  }
  for (const auto& s : doc.at("seeds")) c.seeds.push_back(unsigned_at(s, "seed"));
  if (doc.contains("T_override") && !doc.at("T_override").is_null()) {
    c.T_override = unsigned_at(doc.at("T_override"), "T_override");
    if (*c.T_override == 0) throw ConfigError("T_override must be >= 1");
  }
  if (doc.contains("output_dir")) {
    if (!doc.at("output_dir").is_string()) {
      throw ConfigError("output_dir must be a string");
    }
    c.output_dir = doc.at("output_dir").get<std::string>();
  }
  if (doc.contains("flavor")) {
    if (!doc.at("flavor").is_string()) throw ConfigError("flavor must be a string");
    try {
      c.flavor = parse_flavor(doc.at("flavor").get<std::string>());
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  }
  c.threshold = optional_number(doc, "threshold", "config");

  if (c.seeds.empty()) throw ConfigError("seeds must be nonempty");
  std::set<std::uint64_t> unique(c.seeds.begin(), c.seeds.end());
  if (unique.size() != c.seeds.size()) throw ConfigError("seeds must be distinct");
  if (!c.lambda) throw ConfigError("lambda is required");
  if (c.learner.auto_sizing) {
    if (!c.epsilon) throw ConfigError("automatic sizing requires epsilon");
  } else {
    if (!c.learner.radius || !c.learner.beta) {
      throw ConfigError("manual sizing requires learner.D and learner.beta");
    }
    if (!c.T_override) throw ConfigError("manual sizing requires T_override");
  }
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  return parse_config(doc);
}

json to_json(const ExperimentConfig& c) {
  json doc;
  json params = json::object();
  for (const auto& [key, vals] : c.problem.params) {
    params[key] = vals.size() == 1 ? json(vals[0]) : json(vals);
  }
  doc["problem"] = {{"name", c.problem.name}, {"params", params}};
  json learner = json::object();
  if (c.learner.mode) learner["mode"] = to_string(*c.learner.mode);
  learner["sizing"] = c.learner.auto_sizing ? "auto" : "manual";
  if (c.learner.radius) learner["D"] = *c.learner.radius;
  if (c.learner.beta) learner["beta"] = *c.learner.beta;
  if (c.learner.eta) learner["eta"] = *c.learner.eta;
  doc["learner"] = learner;
  if (!c.modes.empty()) {
    json modes = json::array();
    for (auto m : c.modes) modes.push_back(to_string(m));
    doc["modes"] = modes;
  }
  if (c.epsilon) doc["epsilon"] = *c.epsilon;
  if (c.lambda) doc["lambda"] = *c.lambda;
  doc["C"] = c.C ? json(*c.C) : json("auto");
  doc["seeds"] = c.seeds;
  if (c.T_override) doc["T_override"] = *c.T_override;
  doc["output_dir"] = c.output_dir;
  doc["flavor"] = to_string(c.flavor);
  if (c.threshold) doc["threshold"] = *c.threshold;
  return doc;
}

// ---------------------------------------------------------------------------
// Planning

double default_C(const ProblemSpec& problem, Flavor flavor) {
  if (flavor == Flavor::kL1) return l1_norm(add(problem.lipschitz, problem.noise));
  return problem.global_lipschitz() + problem.global_noise();
}

RunPlan plan_run(const ExperimentConfig& config, LearnerMode mode) {
  RunPlan plan;
  try {
    plan.problem = make_problem(config.problem.name, config.problem.params);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  plan.flavor = config.flavor;
  plan.lambda = *config.lambda;
  plan.C = config.C ? *config.C : default_C(plan.problem, config.flavor);
  plan.learner.mode = mode;
  if (config.learner.eta) plan.learner.eta = *config.learner.eta;

  if (config.learner.auto_sizing) {
    const double eps = *config.epsilon;
    try {
      if (is_coordinate_wise(mode)) {
        plan.theorem = theorem2_params(eps, plan.lambda, plan.C,
                                       plan.problem.delta_bound,
                                       plan.problem.dim);
      } else if (config.flavor == Flavor::kL1) {
        const auto [lam, e] = l1_l2_reduction(plan.lambda, eps, plan.problem.dim);
        plan.theorem = theorem1_params(e, lam, plan.C, plan.problem.delta_bound);
      } else {
        plan.theorem = theorem1_params(eps, plan.lambda, plan.C,
                                       plan.problem.delta_bound);
      }
    } catch (const std::domain_error& e) {
      throw ConfigError(e.what());
    }
    plan.beta = plan.theorem->beta;
    plan.learner.radius = plan.theorem->radius;
    plan.T = plan.theorem->T;
  } else {
    plan.beta = *config.learner.beta;
    plan.learner.radius = *config.learner.radius;
  }
  if (config.T_override) plan.T = *config.T_override;
  plan.learner.beta = mode == LearnerMode::kScaleFreeFtrl ? 1.0 : plan.beta;

  if (!(plan.beta > 0.0 && plan.beta < 1.0)) {
    throw ConfigError("conversion beta must lie in (0, 1)");
  }
  try {
    plan.learner.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return plan;
}

void enforce_caps(const RunPlan& plan, std::size_t seed_count, bool large) {
  if (large) return;
  if (plan.problem.dim > kMaxDeskDim) {
    throw ConfigError("d = " + std::to_string(plan.problem.dim) +
                      " exceeds the desk cap of 64; pass --large");
  }
  if (plan.T > kMaxDeskHorizon) {
    throw ConfigError("T = " + std::to_string(plan.T) +
                      " exceeds the desk cap of 200000; pass --large");
  }
  if (seed_count > kMaxDeskSeeds) {
    throw ConfigError("more than 32 seeds; pass --large");
  }
}

// ---------------------------------------------------------------------------
// Runs

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string format_shortest(double v) {
  char buf[40];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void write_csv_header(std::ostream& out) {
  out << "# " << kVersion << "\n"
      << "t,alpha_t,z_norm,grad_norm_exact,regret,regret_bound,"
         "stationarity_value,ema_drift\n";
}

void write_csv_row(std::ostream& out, const RunRecord& r) {
  out << r.t << ',' << format_double(r.alpha_t) << ','
      << format_double(r.z_norm) << ',' << format_double(r.grad_norm_exact)
      << ',' << format_double(r.regret) << ',' << format_double(r.regret_bound)
      << ',' << format_double(r.stationarity_value) << ','
      << format_double(r.ema_drift) << '\n';
}

SeedResult run_seed(const RunPlan& plan, std::uint64_t seed, std::ostream* csv,
                    std::optional<double> threshold) {
  const auto start = std::chrono::steady_clock::now();
  RunMonitor monitor(plan.problem, plan.learner, plan.beta, plan.lambda,
                     plan.flavor, threshold);
  if (csv) write_csv_header(*csv);
  run_conversion(plan.problem.x0, plan.T, plan.learner, plan.problem,
                 plan.beta, RandomStream(seed), [&](const StepOutcome& step) {
                   const RunRecord rec = monitor.observe(step);
                   if (csv) write_csv_row(*csv, rec);
                 });
  SeedResult r;
  r.seed = seed;
  r.summary = monitor.finish();
  r.wall_time_s = std::chrono::duration<double>(
                      std::chrono::steady_clock::now() - start)
                      .count();
  return r;
}

namespace {

/// Runs `job(i)` for i in [0, n) on up to hardware_concurrency threads and
/// returns results in index order.
template <typename Job>
auto parallel_map(std::size_t n, Job job) {
  using R = decltype(job(std::size_t{0}));
  std::vector<R> out(n);
  const std::size_t width =
      std::max<std::size_t>(1, std::thread::hardware_concurrency());
  for (std::size_t begin = 0; begin < n; begin += width) {
    const std::size_t end = std::min(n, begin + width);
    if (end - begin == 1) {
      out[begin] = job(begin);
      continue;
    }
    std::vector<std::future<R>> futures;
    for (std::size_t i = begin; i < end; ++i) {
      futures.push_back(std::async(std::launch::async, job, i));
    }
    for (std::size_t i = begin; i < end; ++i) out[i] = futures[i - begin].get();
  }
  return out;
}

SeedResult run_one(const RunPlan& plan, std::uint64_t seed,
                   const std::filesystem::path& runs_dir, bool write_files,
                   std::optional<double> threshold) {
  if (!write_files) return run_seed(plan, seed, nullptr, threshold);
  const auto path = runs_dir / (std::to_string(seed) + ".csv");
  std::ofstream csv(path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot write " + path.string());
  SeedResult r = run_seed(plan, seed, &csv, threshold);
  r.csv_path = path.string();
  return r;
}

json plan_json(const RunPlan& plan) {
  json j = {{"mode", to_string(plan.learner.mode)},
            {"problem", plan.problem.name()},
            {"d", plan.problem.dim},
            {"beta", plan.beta},
            {"learner_beta", plan.learner.beta},
            {"D", plan.learner.radius},
            {"T", plan.T},
            {"lambda", plan.lambda},
            {"C", plan.C},
            {"flavor", to_string(plan.flavor)},
            {"delta_bound", plan.problem.delta_bound},
            {"G", plan.problem.global_lipschitz()},
            {"sigma", plan.problem.global_noise()}};
  if (plan.learner.mode == LearnerMode::kDiscountedOgd) j["eta"] = plan.learner.eta;
  if (plan.theorem) j["epsilon"] = plan.theorem->epsilon;
  return j;
}

json seed_json(const SeedResult& r) {
  const RunSummary& s = r.summary;
  json j = {{"seed", r.seed},
            {"T", s.T},
            {"t_avg_stationarity", s.t_avg_stationarity},
            {"final_stationarity", s.final_report.value},
            {"final_grad_norm", s.final_report.grad_norm},
            {"final_variance", s.final_report.variance},
            {"max_regret_ratio", s.max_regret_ratio},
            {"regret_checked", s.regret_checked},
            {"regret_holds", s.regret_holds},
            {"increments_bounded", s.increments_bounded},
            {"variance_lhs", s.variance.lhs},
            {"variance_rhs", s.variance.rhs},
            {"variance_margin", s.variance.margin},
            {"oracle_regret", s.oracle_regret},
            {"wall_time_s", r.wall_time_s}};
  if (!r.csv_path.empty()) j["csv"] = r.csv_path;
  return j;
}

std::filesystem::path prepare_output(const ExperimentConfig& config,
                                     bool write_files) {
  if (!write_files) return {};
  if (config.output_dir.empty()) throw ConfigError("output_dir is required");
  std::filesystem::path out(config.output_dir);
  std::filesystem::create_directories(out / "runs");
  return out;
}

void write_json(const std::filesystem::path& path, const json& doc) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options) {
  const LearnerMode mode = config.learner.mode.value_or(LearnerMode::kBetaFtrl);
  ExperimentResult result;
  result.plan = plan_run(config, mode);
  enforce_caps(result.plan, config.seeds.size(), options.large);
  const auto out_dir = prepare_output(config, options.write_files);

  const auto start = std::chrono::steady_clock::now();
  result.seeds = parallel_map(config.seeds.size(), [&](std::size_t i) {
    return run_one(result.plan, config.seeds[i], out_dir / "runs",
                   options.write_files, options.threshold);
  });
  result.wall_time_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start)
          .count();

  const double n = static_cast<double>(result.seeds.size());
  double sum = 0.0;
  double sum_final = 0.0;
  result.min_variance_margin = INFINITY;
  for (const auto& s : result.seeds) {
    sum += s.summary.t_avg_stationarity;
    sum_final += s.summary.final_report.value;
    result.max_regret_ratio =
        std::max(result.max_regret_ratio, s.summary.max_regret_ratio);
    result.min_variance_margin =
        std::min(result.min_variance_margin, s.summary.variance.margin);
    result.bound_violation =
        result.bound_violation || s.summary.bound_violation();
  }
  result.mean_t_avg_stationarity = sum / n;
  result.mean_final_stationarity = sum_final / n;
  double ss = 0.0;
  for (const auto& s : result.seeds) {
    const double dev = s.summary.t_avg_stationarity - result.mean_t_avg_stationarity;
    ss += dev * dev;
  }
  result.stderr_t_avg_stationarity =
      result.seeds.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;

  json runs = json::array();
  for (const auto& s : result.seeds) runs.push_back(seed_json(s));
  result.summary = {
      {"version", kVersion},
      {"config", to_json(config)},
      {"plan", plan_json(result.plan)},
      {"runs", runs},
      {"aggregate",
       {{"seeds", result.seeds.size()},
        {"t_avg_stationarity_mean", result.mean_t_avg_stationarity},
        {"t_avg_stationarity_stderr", result.stderr_t_avg_stationarity},
        {"final_stationarity_mean", result.mean_final_stationarity},
        {"max_regret_ratio", result.max_regret_ratio},
        {"min_variance_margin", result.min_variance_margin},
        {"wall_time_s", result.wall_time_s}}},
      {"status", result.bound_violation ? "BOUND_VIOLATION" : "OK"}};
  if (options.write_files) write_json(out_dir / "summary.json", result.summary);
  return result;
}

double median(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty list");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 == 1 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

CompareResult compare_experiment(const ExperimentConfig& config,
                                 const RunOptions& options) {
  if (config.modes.size() < 2) {
    throw ConfigError("compare needs at least two learner modes");
  }
  if (!config.epsilon && !config.threshold) {
    throw ConfigError("compare needs epsilon or an explicit threshold");
  }
  ExperimentConfig l1_config = config;
  l1_config.flavor = Flavor::kL1;

  CompareResult result;
  std::vector<RunPlan> plans;
  for (LearnerMode m : config.modes) {
    plans.push_back(plan_run(l1_config, m));
    enforce_caps(plans.back(), config.seeds.size(), options.large);
  }
  if (config.threshold) {
    result.threshold = *config.threshold;
  } else {
    // Guarantee of the coordinate-wise calculator: (1 + ||G+sigma||_1 / C) eps.
    const ProblemSpec& p = plans.front().problem;
    result.threshold =
        (1.0 + l1_norm(add(p.lipschitz, p.noise)) / plans.front().C) *
        *config.epsilon;
  }
  const auto out_dir = prepare_output(config, options.write_files);

  json modes = json::array();
  for (std::size_t k = 0; k < plans.size(); ++k) {
    ModeComparison mc;
    mc.mode = config.modes[k];
    mc.plan = plans[k];
    const auto runs_dir = out_dir / "runs" / to_string(mc.mode);
    if (options.write_files) std::filesystem::create_directories(runs_dir);
    const auto seeds = parallel_map(config.seeds.size(), [&](std::size_t i) {
      return run_one(mc.plan, config.seeds[i], runs_dir, options.write_files,
                     result.threshold);
    });
    std::vector<double> its;
    json per_seed = json::array();
    for (const auto& s : seeds) {
      const auto hit = s.summary.first_below_threshold;
      const std::uint64_t it = hit ? *hit : mc.plan.T + 1;
      mc.iterations.push_back(it);
      mc.reached.push_back(hit.has_value());
      its.push_back(static_cast<double>(it));
      mc.bound_violation = mc.bound_violation || s.summary.bound_violation();
      json j = seed_json(s);
      j["iterations_to_threshold"] = it;
      j["reached"] = hit.has_value();
      per_seed.push_back(j);
    }
    mc.median_iterations = median(its);
    result.bound_violation = result.bound_violation || mc.bound_violation;
    modes.push_back({{"mode", to_string(mc.mode)},
                     {"plan", plan_json(mc.plan)},
                     {"median_iterations", mc.median_iterations},
                     {"runs", per_seed}});
    result.modes.push_back(std::move(mc));
  }
  result.summary = {{"version", kVersion},
                    {"config", to_json(config)},
                    {"threshold", result.threshold},
                    {"modes", modes},
                    {"status", result.bound_violation ? "BOUND_VIOLATION" : "OK"}};
  if (options.write_files) write_json(out_dir / "compare.json", result.summary);
  return result;
}

// ---------------------------------------------------------------------------
// Regret check

std::string to_string(SequenceKind kind) {
  switch (kind) {
    case SequenceKind::kZero: return "zero";
    case SequenceKind::kConstant: return "constant";
    case SequenceKind::kGaussian: return "gaussian";
    case SequenceKind::kSignFlip: return "sign_flip";
    case SequenceKind::kScaleJumpUp: return "scale_jump_up";
    case SequenceKind::kScaleJumpDown: return "scale_jump_down";
    case SequenceKind::kAdversarial: return "adversarial";
  }
  return "unknown";
}

std::vector<SequenceKind> all_sequence_kinds() {
  return {SequenceKind::kZero,        SequenceKind::kConstant,
          SequenceKind::kGaussian,    SequenceKind::kSignFlip,
          SequenceKind::kScaleJumpUp, SequenceKind::kScaleJumpDown,
          SequenceKind::kAdversarial};
}

namespace {

std::vector<double> gaussian_vector(std::size_t dim, RandomStream& rng) {
  std::vector<double> v(dim);
  for (auto& x : v) x = sample_normal(rng);
  return v;
}

/// Next gradient of a generated sequence. `z` is the learner's current play,
/// which only the adversarial generator looks at.
ParamVector next_gradient(SequenceKind kind, std::uint64_t t,
                          std::uint64_t horizon, const ParamVector& z,
                          const std::vector<double>& base,
                          std::uint64_t flip_period, RandomStream& rng) {
  const std::size_t dim = z.dim();
  switch (kind) {
    case SequenceKind::kZero:
      return ParamVector::zeros(dim);
    case SequenceKind::kConstant:
      return ParamVector(base);
    case SequenceKind::kGaussian: {
      auto v = gaussian_vector(dim, rng);
      for (std::size_t i = 0; i < dim; ++i) v[i] += 0.3 * base[i];
      return ParamVector(std::move(v));
    }
    case SequenceKind::kSignFlip: {
      const double sign = ((t - 1) / flip_period) % 2 == 0 ? 1.0 : -1.0;
      const double mag = 0.5 + rng.next_uniform();
      return scale(sign * mag, ParamVector(base));
    }
    case SequenceKind::kScaleJumpUp:
    case SequenceKind::kScaleJumpDown: {
      const bool late = t > horizon / 2;
      const bool big = kind == SequenceKind::kScaleJumpUp ? late : !late;
      return scale(big ? 1e6 : 1.0, ParamVector(gaussian_vector(dim, rng)));
    }
    case SequenceKind::kAdversarial: {
      // Loss aligned with the current play, so every round costs the learner.
      if (z.is_zero()) return ParamVector(gaussian_vector(dim, rng));
      const double mag = std::exp(3.0 * sample_normal(rng));
      std::vector<double> v(dim);
      for (std::size_t i = 0; i < dim; ++i) {
        v[i] = z[i] == 0.0 ? 0.0 : mag * std::copysign(1.0, z[i]);
      }
      return ParamVector(std::move(v));
    }
  }
  throw std::logic_error("unhandled sequence kind");
}

}  // namespace

SequenceOutcome play_sequence(const LearnerConfig& learner, std::size_t dim,
                              std::uint64_t horizon, SequenceKind kind,
                              RandomStream stream) {
  OnlineLearner alg(learner, dim);
  RegretLedger ledger(learner.effective_beta(), learner.radius, dim);
  const bool coordinate_wise = is_coordinate_wise(learner.mode);
  const std::vector<double> base = gaussian_vector(dim, stream);
  const std::uint64_t flip_period = 1 + stream.next_u64() % 5;

  SequenceOutcome out;
  for (std::uint64_t t = 1; t <= horizon; ++t) {
    const ParamVector z = alg.increment();
    ParamVector g = next_gradient(kind, t, horizon, z, base, flip_period, stream);
    alg.observe(g);
    ledger.observe(g, z);
    out.gradients.push_back(std::move(g));
    const RegretCheck check = check_regret_bound(ledger, coordinate_wise);
    out.max_ratio = std::max(out.max_ratio, check.ratio);
    if (!check.holds && !out.violation) {
      RegretViolation v;
      v.learner = learner;
      v.kind = kind;
      v.step = t;
      v.regret = check.regret;
      v.bound = check.bound;
      out.violation = v;
    }
  }
  if (out.violation) out.violation->gradients = out.gradients;
  return out;
}

RegretCheckResult regret_check(const RegretGrid& grid) {
  RegretCheckResult result;
  RandomStream root(grid.seed);
  std::uint64_t sequence_id = 0;
  const double radii[] = {1.0, 0.01, 100.0};

  for (std::size_t dim : grid.dims) {
    for (std::uint64_t horizon : grid.horizons) {
      for (double beta : grid.betas) {
        RegretCell cell{dim, horizon, beta, 0, 0.0, true};
        std::vector<LearnerMode> modes = {LearnerMode::kBetaFtrl,
                                          LearnerMode::kClippedAdam};
        if (beta == 1.0) modes.push_back(LearnerMode::kScaleFreeFtrl);
        for (std::size_t trial = 0; trial < grid.trials; ++trial) {
          for (SequenceKind kind : all_sequence_kinds()) {
            const RandomStream stream = root.substream(sequence_id++);
            ++cell.sequences;
            for (LearnerMode mode : modes) {
              LearnerConfig cfg;
              cfg.mode = mode;
              cfg.beta = beta;
              cfg.radius = radii[trial % 3];
              const SequenceOutcome o =
                  play_sequence(cfg, dim, horizon, kind, stream);
              ++result.learner_runs;
              cell.max_ratio = std::max(cell.max_ratio, o.max_ratio);
              if (o.violation) {
                cell.holds = false;
                result.violations.push_back(*o.violation);
              }
            }
          }
        }
        result.sequences += cell.sequences;
        result.max_ratio = std::max(result.max_ratio, cell.max_ratio);
        result.cells.push_back(cell);
      }
    }
  }
  return result;
}

json to_json(const RegretViolation& v) {
  json grads = json::array();
  for (const auto& g : v.gradients) grads.push_back(g.vec());
  return {{"mode", to_string(v.learner.mode)},
          {"beta", v.learner.beta},
          {"D", v.learner.radius},
          {"sequence", to_string(v.kind)},
          {"step", v.step},
          {"regret", v.regret},
          {"bound", v.bound},
          {"gradients", grads}};
}

// ---------------------------------------------------------------------------
// Params

json params_report(const ParamsRequest& req) {
  const TheoremParams p =
      req.flavor == Flavor::kL1
          ? theorem2_params(req.epsilon, req.lambda, req.C, req.delta, req.dim)
          : theorem1_params(req.epsilon, req.lambda, req.C, req.delta);
  json doc = {{"version", kVersion},
              {"flavor", to_string(req.flavor)},
              {"inputs",
               {{"epsilon", req.epsilon},
                {"lambda", req.lambda},
                {"C", req.C},
                {"delta", req.delta},
                {"d", req.dim}}},
              {"beta", p.beta},
              {"D", p.radius},
              {"T", p.T}};

  if (req.lipschitz_vec && req.noise_vec) {
    const double g = l2_norm(*req.lipschitz_vec);
    const double s = l2_norm(*req.noise_vec);
    const ComplexityReport c =
        complexity_tables(g, s, req.delta, req.lambda, req.epsilon, req.dim,
                          *req.lipschitz_vec, *req.noise_vec);
    doc["complexity"] = {{"G", g},
                         {"sigma", s},
                         {"l2", c.l2_complexity},
                         {"l1", c.l1_complexity},
                         {"coordinate_rate", c.coordinate_rate},
                         {"global_rate", c.global_rate},
                         {"coordinate_over_global", c.ratio},
                         {"norm1_G_plus_sigma", c.sum_l1},
                         {"norm2_G_plus_sigma", c.sum_l2}};
  } else {
    // Without per-coordinate constants, report the global expression with
    // G + sigma taken as C.
    const ParamVector gv = ParamVector::filled(req.dim, req.C / double(req.dim));
    const ComplexityReport c =
        complexity_tables(req.C, 0.0, req.delta, req.lambda, req.epsilon,
                          req.dim, gv, ParamVector::zeros(req.dim));
    doc["complexity"] = {{"G_plus_sigma", req.C}, {"l2", c.l2_complexity}};
  }
  return doc;
}

}  // namespace o2nc
