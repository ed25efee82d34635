// Batch simulator CLI: single runs, paired variant comparisons, parameter
// sweeps, and network-file validation.
#include <cstdio>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rtpsim/default_scenario.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/grid.hpp"
#include "rtpsim/harness.hpp"
#include "rtpsim/scenario.hpp"

namespace {

int run_command(const std::string& scenario_path, std::uint64_t seed,
                const std::string& out_dir) {
  rtpsim::scenario_data data = rtpsim::load_scenario_data_file(scenario_path);
  rtpsim::run_result result = rtpsim::run_scenario(data, seed);
  rtpsim::write_run_outputs(result, out_dir);
  std::printf("run complete: %d days, final regret %.6g, %ld suboptimal, "
              "%ld violating days, outputs in %s\n",
              static_cast<int>(result.days.size()),
              result.final_cumulative_regret, result.final_suboptimal,
              result.violating_days, out_dir.c_str());
  return 0;
}

int compare_command(const std::string& scenario_path,
                    const std::vector<std::string>& variants, int seed_count,
                    const std::string& out_dir) {
  rtpsim::scenario_data data = rtpsim::load_scenario_data_file(scenario_path);
  rtpsim::compare_result result = rtpsim::compare_variants(
      data, variants, rtpsim::default_seeds(seed_count));
  rtpsim::write_compare_outputs(result, out_dir);
  std::printf("compare complete: %zu variants x %d seeds, outputs in %s\n",
              variants.size(), seed_count, out_dir.c_str());
  return 0;
}

int sweep_command(const std::string& scenario_path, const std::string& param,
                  const std::vector<double>& values, int seed_count,
                  const std::string& out_dir) {
  rtpsim::scenario_config cfg = rtpsim::load_scenario_file(scenario_path);
  std::vector<rtpsim::sweep_row> rows = rtpsim::sweep_parameter(
      cfg, param, values, rtpsim::default_seeds(seed_count));
  std::filesystem::create_directories(out_dir);
  rtpsim::write_sweep_csv(out_dir + "/sweep.csv", param, rows);
  std::printf("sweep complete: %zu values x %d seeds, outputs in %s\n",
              values.size(), seed_count, out_dir.c_str());
  return 0;
}

int validate_command(const std::string& network_path) {
  rtpsim::network net = rtpsim::network::from_csv_file(network_path);
  std::printf("ok: %d nodes, source voltage %.6g V\n", net.node_count,
              net.v0_volts);
  return 0;
}

int init_data_command(const std::string& dir) {
  rtpsim::write_default_bundle(dir);
  std::printf("wrote scenario bundle to %s\n", dir.c_str());
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Day-ahead pricing simulator for flexible-load aggregation"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::vector<std::string> variants;
  int seed_count = 20;
  std::string param = "nu";
  std::vector<double> values;
  std::string network_path;

  CLI::App* run = app.add_subcommand("run", "Simulate one scenario");
  run->add_option("--scenario", scenario_path, "Scenario file")->required();
  run->add_option("--seed", seed, "Random seed");
  run->add_option("--out", out_dir, "Output directory");

  CLI::App* compare =
      app.add_subcommand("compare", "Run several variants on shared seeds");
  compare->add_option("--scenario", scenario_path, "Scenario file")->required();
  compare
      ->add_option("--variants", variants,
                   "Comma-separated variant list (e.g. conts-b,uncon-ts)")
      ->required()
      ->delimiter(',');
  compare->add_option("--seeds", seed_count, "Number of seeds (1..K)");
  compare->add_option("--out", out_dir, "Output directory");

  CLI::App* sweep = app.add_subcommand("sweep", "Sweep one parameter");
  sweep->add_option("--scenario", scenario_path, "Scenario file")->required();
  sweep->add_option("--param", param,
                    "Parameter: nu, mu, sigma, sigma_obs, horizon, "
                    "two_stage_days, cluster_count");
  sweep->add_option("--values", values, "Comma-separated values")
      ->required()
      ->delimiter(',');
  sweep->add_option("--seeds", seed_count, "Number of seeds (1..K)");
  sweep->add_option("--out", out_dir, "Output directory");

  CLI::App* validate =
      app.add_subcommand("validate-network", "Check a network CSV file");
  validate->add_option("file", network_path, "Network CSV")->required();

  std::string data_dir = "data";
  CLI::App* init = app.add_subcommand(
      "init-data", "Write the built-in scenario bundle to a directory");
  init->add_option("dir", data_dir, "Target directory (default: data)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) return run_command(scenario_path, seed, out_dir);
    if (compare->parsed())
      return compare_command(scenario_path, variants, seed_count, out_dir);
    if (sweep->parsed())
      return sweep_command(scenario_path, param, values, seed_count, out_dir);
    if (validate->parsed()) return validate_command(network_path);
    if (init->parsed()) return init_data_command(data_dir);
  } catch (const rtpsim::sim_error& e) {
    std::fprintf(stderr, "error [%s]: %s\n", rtpsim::errc_name(e.code()),
                 e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 2;
}
