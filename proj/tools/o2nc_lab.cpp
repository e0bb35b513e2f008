// o2nc-lab: sizing calculator and experiment runner.

#include <CLI11.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "o2nc/harness.hpp"

namespace {

using nlohmann::json;

std::optional<o2nc::ParamVector> as_vector(const std::vector<double>& v) {
  if (v.empty()) return std::nullopt;
  return o2nc::ParamVector(v);
}

int cmd_params(const o2nc::ParamsRequest& req, bool as_json) {
  const json report = o2nc::params_report(req);
  if (as_json) {
    std::cout << report.dump(2) << '\n';
    return 0;
  }
  std::cout << "beta = " << o2nc::format_shortest(report["beta"].get<double>())
            << "\nD = " << o2nc::format_shortest(report["D"].get<double>())
            << "\nT = " << report["T"].get<std::uint64_t>() << '\n';
  for (const auto& [key, value] : report["complexity"].items()) {
    std::cout << "complexity." << key << " = "
              << o2nc::format_shortest(value.get<double>()) << '\n';
  }
  return 0;
}

void apply_overrides(o2nc::ExperimentConfig& config, const std::string& out,
                     const std::vector<std::uint64_t>& seeds) {
  if (!out.empty()) config.output_dir = out;
  if (!seeds.empty()) config.seeds = seeds;
}

int cmd_run(const std::string& path, const std::string& out,
            const std::vector<std::uint64_t>& seeds, bool large) {
  auto config = o2nc::load_config(path);
  apply_overrides(config, out, seeds);
  o2nc::RunOptions options;
  options.large = large;
  const auto result = o2nc::run_experiment(config, options);
  const auto& agg = result.summary["aggregate"];
  std::cout << "mode " << o2nc::to_string(result.plan.learner.mode)
            << "  beta " << o2nc::format_shortest(result.plan.beta) << "  D "
            << o2nc::format_shortest(result.plan.learner.radius) << "  T "
            << result.plan.T << '\n'
            << "t-averaged stationarity " << agg["t_avg_stationarity_mean"]
            << " +/- " << agg["t_avg_stationarity_stderr"] << '\n'
            << "max regret ratio " << agg["max_regret_ratio"]
            << "  min variance margin " << agg["min_variance_margin"] << '\n'
            << "status " << result.summary["status"].get<std::string>()
            << "  (" << config.output_dir << "/summary.json)\n";
  return result.bound_violation ? 1 : 0;
}

int cmd_compare(const std::string& path, const std::string& out,
                const std::vector<std::uint64_t>& seeds, bool large) {
  auto config = o2nc::load_config(path);
  apply_overrides(config, out, seeds);
  o2nc::RunOptions options;
  options.large = large;
  const auto result = o2nc::compare_experiment(config, options);
  std::cout << "threshold " << o2nc::format_shortest(result.threshold) << '\n';
  for (const auto& m : result.modes) {
    std::cout << o2nc::to_string(m.mode) << "  T " << m.plan.T
              << "  median iterations "
              << o2nc::format_shortest(m.median_iterations) << '\n';
  }
  std::cout << "status " << result.summary["status"].get<std::string>()
            << "  (" << config.output_dir << "/compare.json)\n";
  return result.bound_violation ? 1 : 0;
}

int cmd_regret_check(const o2nc::RegretGrid& grid, const std::string& out) {
  const auto result = o2nc::regret_check(grid);
  std::cout << "dim  T     beta   sequences  max_ratio  status\n";
  for (const auto& c : result.cells) {
    char line[128];
    std::snprintf(line, sizeof line, "%-4zu %-5llu %-6g %-10zu %-10.6f %s\n",
                  c.dim, static_cast<unsigned long long>(c.horizon), c.beta,
                  c.sequences, c.max_ratio, c.holds ? "pass" : "FAIL");
    std::cout << line;
  }
  std::cout << result.sequences << " sequences, " << result.learner_runs
            << " learner runs, max ratio "
            << o2nc::format_shortest(result.max_ratio) << '\n';
  if (result.passed()) return 0;

  json dump = json::array();
  for (const auto& v : result.violations) dump.push_back(o2nc::to_json(v));
  if (!out.empty()) {
    std::filesystem::create_directories(out);
    const auto file = std::filesystem::path(out) / "violations.json";
    std::ofstream(file) << dump.dump(2) << '\n';
    std::cerr << result.violations.size() << " violations written to "
              << file.string() << '\n';
  } else {
    std::cerr << dump.dump() << '\n';
  }
  return 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Online-to-nonconvex conversion lab"};
  app.set_version_flag("--version", o2nc::kVersion);
  app.require_subcommand(1);

  o2nc::ParamsRequest req;
  std::string flavor = "L2";
  std::vector<double> g_vec, sigma_vec;
  bool params_json = false;
  auto* params = app.add_subcommand("params", "Theorem sizing for beta, D, T");
  params->add_option("--epsilon", req.epsilon, "target epsilon")->required();
  params->add_option("--lambda", req.lambda, "regularization lambda")->required();
  params->add_option("--C", req.C, "constant C")->required();
  params->add_option("--delta", req.delta, "bound on F(x0) - inf F")->required();
  params->add_option("--d", req.dim, "dimension")->default_val(1);
  params->add_option("--flavor", flavor, "L2 or L1")->default_val("L2");
  params->add_option("--g-vec", g_vec, "per-coordinate Lipschitz constants")
      ->delimiter(',');
  params->add_option("--sigma-vec", sigma_vec, "per-coordinate noise levels")
      ->delimiter(',');
  params->add_flag("--json", params_json, "emit JSON");

  std::string config_path, out_dir;
  std::vector<std::uint64_t> seeds;
  bool large = false;
  auto* run = app.add_subcommand("run", "Run every seed of one learner");
  auto* compare = app.add_subcommand("compare", "Iterations-to-threshold per mode");
  for (auto* sub : {run, compare}) {
    sub->add_option("--config", config_path, "experiment JSON")->required();
    sub->add_option("--out", out_dir, "output directory (overrides config)");
    sub->add_option("--seeds", seeds, "seed list (overrides config)")
        ->delimiter(',');
    sub->add_flag("--large", large, "lift desk-scale caps");
  }

  o2nc::RegretGrid grid;
  auto* regret = app.add_subcommand("regret-check",
                                    "Deterministic regret bound over a grid");
  regret->add_option("--dims", grid.dims, "dimensions")->delimiter(',');
  regret->add_option("--horizons", grid.horizons, "horizons")->delimiter(',');
  regret->add_option("--betas", grid.betas, "discount factors")->delimiter(',');
  regret->add_option("--trials", grid.trials, "trials per cell");
  regret->add_option("--seed", grid.seed, "generator seed");
  regret->add_option("--out", out_dir, "directory for violations.json");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*params) {
      req.flavor = o2nc::parse_flavor(flavor);
      req.lipschitz_vec = as_vector(g_vec);
      req.noise_vec = as_vector(sigma_vec);
      if (req.lipschitz_vec.has_value() != req.noise_vec.has_value()) {
        throw o2nc::ConfigError("--g-vec and --sigma-vec go together");
      }
      return cmd_params(req, params_json);
    }
    if (*run) return cmd_run(config_path, out_dir, seeds, large);
    if (*compare) return cmd_compare(config_path, out_dir, seeds, large);
    if (*regret) return cmd_regret_check(grid, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
