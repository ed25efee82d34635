#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rtpsim/bandit.hpp"
#include "rtpsim/metrics.hpp"
#include "rtpsim/scenario.hpp"

namespace rtpsim {

// One complete simulated run of a pricing policy against the environment.
//
// Daily order of operations (fixed, and the contract behind every CSV):
//   1. the active true model is determined (theta_switch_day, when set,
//      is the first day the replacement model generates the load);
//   2. the day's target is drawn from the `targets` stream;
//   3. the policy chooses a price using yesterday's belief;
//   4. the population responds: participation counts from the `preferences`
//      stream, metering noise from the `obs_noise` stream — both consumed in
//      fixed per-day blocks, so paired variants under one seed see identical
//      environment randomness no matter what they broadcast;
//   5. realized flows/voltages, realized cost, the day's constrained optimum
//      and expected costs are evaluated under the active true model;
//   6. the belief is updated with the day's observation (the two-stage
//      policy stops updating once it commits);
//   7. the day is recorded and the belief snapshotted.
//
// Variants:
//   conts-a      sampled-candidate objective, per-candidate constraint filter
//   conts-b      sampled-candidate objective, belief-mixture constraint filter
//   uncon-ts     sampled-candidate objective, no constraint filter
//   two-stage    explore-then-commit: days 1..L cycle in deck order through
//                the deck of robustly safe prices, then commit to the belief
//                mode at day L and select with that frozen belief (mixture
//                filter) thereafter
//   clairvoyant  true-model objective, per-candidate filter at the true model
struct run_result {
  std::vector<day_record> days;
  std::vector<int> theta_ids;                  // candidate ids, support order
  std::vector<std::vector<double>> posterior;  // [day][candidate] after update
  prior final_belief;
  int final_map_id = 0;
  double final_cumulative_regret = 0.0;
  long final_suboptimal = 0;  // suboptimal choices in the last 100 days
  long violating_days = 0;  // days with >= 1 realized constraint violation
  long fallback_days = 0;
  int first_mass_day = -1;  // first day with mass(active true) >= 0.95
  std::vector<int> explore_deck_ids;  // two-stage only: deck price ids
};

run_result run_scenario(const scenario_data& data, std::uint64_t seed);

// days.csv, regret.csv, suboptimal.csv, violations.csv, posterior.csv.
void write_run_outputs(const run_result& result, const std::string& out_dir);

// Seeds 1..count.
std::vector<std::uint64_t> default_seeds(int count);

// Runs every (variant, seed) pair on one scenario; a given seed reproduces
// the identical environment across variants.
struct compare_result {
  std::vector<std::string> variants;  // tokens as given (two-stage-N allowed)
  std::vector<std::uint64_t> seeds;
  std::vector<run_result> runs;  // runs[v * seeds.size() + s]

  const run_result& run(std::size_t variant, std::size_t seed) const {
    return runs[variant * seeds.size() + seed];
  }
};

compare_result compare_variants(const scenario_data& data,
                                const std::vector<std::string>& variants,
                                const std::vector<std::uint64_t>& seeds);

// compare.csv (one row per variant x seed) and violating_days.csv (per-day
// cumulative violating-day counts averaged over seeds, one column per
// variant).
void write_compare_outputs(const compare_result& result,
                           const std::string& out_dir);

// One-dimensional parameter sweep; every value runs the given seeds.
// Parameters: nu, mu, sigma, sigma_obs, horizon, two_stage_days,
// cluster_count (restricts the population to the first k clusters).
struct sweep_row {
  double value = 0.0;
  double mean_final_regret = 0.0;
  double std_final_regret = 0.0;
  double mean_final_suboptimal = 0.0;
  double mean_violating_days = 0.0;
  double mean_fallback_days = 0.0;
};

std::vector<sweep_row> sweep_parameter(const scenario_config& cfg,
                                       const std::string& param,
                                       const std::vector<double>& values,
                                       const std::vector<std::uint64_t>& seeds);

void write_sweep_csv(const std::string& path, const std::string& param,
                     const std::vector<sweep_row>& rows);

}  // namespace rtpsim
