#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "o2nc/analysis.hpp"
#include "o2nc/conversion.hpp"
#include "o2nc/learners.hpp"
#include "o2nc/problems.hpp"

namespace o2nc {

inline constexpr const char* kVersion = "o2nc-lab v1";

/// Desk-scale caps; exceeding any of them needs `large`.
inline constexpr std::size_t kMaxDeskDim = 64;
inline constexpr std::uint64_t kMaxDeskHorizon = 200000;
inline constexpr std::size_t kMaxDeskSeeds = 32;

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ProblemConfig {
  std::string name;
  ProblemParams params;
  friend bool operator==(const ProblemConfig&, const ProblemConfig&) = default;
};

struct LearnerSection {
  std::optional<LearnerMode> mode;
  bool auto_sizing = true;
  std::optional<double> radius;
  std::optional<double> beta;
  std::optional<double> eta;
  friend bool operator==(const LearnerSection&, const LearnerSection&) = default;
};

/// Parsed experiment file. See docs/config.md for the on-disk schema.
struct ExperimentConfig {
  ProblemConfig problem;
  LearnerSection learner;
  std::vector<LearnerMode> modes;  // compare only
  std::optional<double> epsilon;
  std::optional<double> lambda;
  std::optional<double> C;  // empty means derive from the problem constants
  std::vector<std::uint64_t> seeds;
  std::optional<std::uint64_t> T_override;
  std::string output_dir;
  Flavor flavor = Flavor::kL2;
  std::optional<double> threshold;  // compare only

  friend bool operator==(const ExperimentConfig&,
                         const ExperimentConfig&) = default;
};

/// Strict parse: unknown keys, wrong types and inconsistent fields throw
/// ConfigError.
ExperimentConfig parse_config(const nlohmann::json& doc);
ExperimentConfig load_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Fully resolved settings for one learner mode on one problem.
struct RunPlan {
  ProblemSpec problem;
  LearnerConfig learner;
  double beta = 0.0;
  std::uint64_t T = 0;
  double lambda = 1.0;
  double C = 0.0;
  Flavor flavor = Flavor::kL2;
  std::optional<TheoremParams> theorem;
};

/// C used when the config leaves it out: G + sigma for L2, ||G + sigma||_1
/// for L1.
double default_C(const ProblemSpec& problem, Flavor flavor);

/// Sizes one mode. Automatic sizing uses the coordinate-wise calculator for
/// CLIPPED_ADAM and the global one otherwise; a global learner asked for
/// L1 stationarity is sized for (lambda/sqrt(d), eps/sqrt(d)).
RunPlan plan_run(const ExperimentConfig& config, LearnerMode mode);

/// Throws ConfigError when a plan exceeds the desk caps and `large` is off.
void enforce_caps(const RunPlan& plan, std::size_t seed_count, bool large);

struct SeedResult {
  std::uint64_t seed = 0;
  RunSummary summary;
  double wall_time_s = 0.0;
  std::string csv_path;
};

struct RunOptions {
  bool large = false;
  bool write_files = true;
  std::optional<double> threshold;
};

/// Runs one seed and streams RunRecords to `csv` when given.
SeedResult run_seed(const RunPlan& plan, std::uint64_t seed,
                    std::ostream* csv, std::optional<double> threshold = {});

void write_csv_header(std::ostream& out);
void write_csv_row(std::ostream& out, const RunRecord& rec);
/// %.17g
std::string format_double(double v);
/// Shortest string that parses back to the same double.
std::string format_shortest(double v);

struct ExperimentResult {
  RunPlan plan;
  std::vector<SeedResult> seeds;
  double mean_t_avg_stationarity = 0.0;
  double stderr_t_avg_stationarity = 0.0;
  double mean_final_stationarity = 0.0;
  double max_regret_ratio = 0.0;
  double min_variance_margin = 0.0;
  double wall_time_s = 0.0;
  bool bound_violation = false;
  nlohmann::json summary;
};

/// `run`: every seed of the configured learner. Writes runs/<seed>.csv and
/// summary.json under the output directory when `write_files` is set.
ExperimentResult run_experiment(const ExperimentConfig& config,
                                const RunOptions& options);

struct ModeComparison {
  LearnerMode mode;
  RunPlan plan;
  /// Iterations until the running-mean L1 witness first reaches the
  /// threshold; T + 1 when it never does.
  std::vector<std::uint64_t> iterations;
  std::vector<bool> reached;
  double median_iterations = 0.0;
  bool bound_violation = false;
};

struct CompareResult {
  double threshold = 0.0;
  std::vector<ModeComparison> modes;
  bool bound_violation = false;
  nlohmann::json summary;
};

/// `compare`: each listed mode, same seeds, L1 witness threshold.
CompareResult compare_experiment(const ExperimentConfig& config,
                                 const RunOptions& options);

double median(std::vector<double> values);

enum class SequenceKind {
  kZero,
  kConstant,
  kGaussian,
  kSignFlip,
  kScaleJumpUp,
  kScaleJumpDown,
  kAdversarial,
};

std::string to_string(SequenceKind kind);
std::vector<SequenceKind> all_sequence_kinds();

struct RegretGrid {
  std::vector<std::size_t> dims = {1, 2, 8};
  std::vector<std::uint64_t> horizons = {10, 100, 500};
  std::vector<double> betas = {0.5, 0.9, 0.99, 1.0};
  std::size_t trials = 3;
  std::uint64_t seed = 20240601;
};

struct RegretCell {
  std::size_t dim = 0;
  std::uint64_t horizon = 0;
  double beta = 0.0;
  std::size_t sequences = 0;
  double max_ratio = 0.0;
  bool holds = true;
};

struct RegretViolation {
  LearnerConfig learner;
  SequenceKind kind = SequenceKind::kZero;
  std::uint64_t step = 0;
  double regret = 0.0;
  double bound = 0.0;
  std::vector<ParamVector> gradients;
};

struct RegretCheckResult {
  std::vector<RegretCell> cells;
  std::size_t sequences = 0;
  std::size_t learner_runs = 0;
  double max_ratio = 0.0;
  std::vector<RegretViolation> violations;
  bool passed() const { return violations.empty(); }
};

/// Plays one learner against one generated sequence, checking the bound
/// after every round. Returns the max ratio and any violation found.
struct SequenceOutcome {
  double max_ratio = 0.0;
  std::optional<RegretViolation> violation;
  std::vector<ParamVector> gradients;
};
SequenceOutcome play_sequence(const LearnerConfig& learner, std::size_t dim,
                              std::uint64_t horizon, SequenceKind kind,
                              RandomStream stream);

/// `regret-check`: standalone FTRL-family learners over the grid.
RegretCheckResult regret_check(const RegretGrid& grid);

nlohmann::json to_json(const RegretViolation& violation);

/// `params`: theorem sizing plus complexity tables.
struct ParamsRequest {
  double epsilon = 1.0;
  double lambda = 1.0;
  double C = 1.0;
  double delta = 1.0;
  std::size_t dim = 1;
  Flavor flavor = Flavor::kL2;
  std::optional<ParamVector> lipschitz_vec;
  std::optional<ParamVector> noise_vec;
};

nlohmann::json params_report(const ParamsRequest& request);

}  // namespace o2nc
