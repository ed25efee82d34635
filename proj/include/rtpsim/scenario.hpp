#pragma once

#include <string>
#include <vector>

#include "rtpsim/clusters.hpp"
#include "rtpsim/grid.hpp"
#include "rtpsim/population.hpp"
#include "rtpsim/pricer.hpp"

namespace rtpsim {

// Simulation configuration. Text format: one `key value` pair per line,
// '#' comments and blank lines ignored; unknown keys are rejected so typos
// cannot silently fall back to defaults. File paths are resolved relative to
// the scenario file's directory.
struct scenario_config {
  int slots = 6;
  double dt_hours = 4.0;
  std::string network_file;
  std::string clusters_file;
  std::string prices_file;
  std::string targets_file;
  std::string thetas_file;
  int true_theta_id = 0;
  int horizon_days = 365;
  std::string variant = "conts-b";
  double mu = 0.1;
  double nu = 0.1;
  double sigma = 0.5;
  double sigma_obs = 0.0;
  double mass_bound_lambda = 0.0;  // scales nu floors derived from prior mass
  std::string target_mode = "iid";  // iid | cycle | non-repeating
  int theta_switch_day = 0;         // 0: never; else true model changes here
  int theta_switch_id = 0;
  std::vector<int> visible_clusters;  // empty: learner sees every cluster
  int two_stage_days = 25;
  std::vector<int> two_stage_explore_ids;  // empty: auto robust-safe deck
  int priced_node = 1;
  double u_min_frac = 0.95;  // voltage band as fractions of the source voltage
  double u_max_frac = 1.05;
};

// Applies a variant token to the config. Accepted: conts-a, conts-b,
// uncon-ts, clairvoyant, two-stage, and two-stage-N (N overrides
// two_stage_days). Throws ConfigError on anything else.
void set_variant(scenario_config& cfg, const std::string& token);

// Parses the text form. `origin` names the source in error messages.
scenario_config parse_scenario(const std::string& text,
                               const std::string& origin);

// Reads and parses a scenario file; resolves data paths against its directory.
scenario_config load_scenario_file(const std::string& path);

// Fully loaded scenario: config plus every referenced data file, validated
// for mutual consistency (slot counts, id references, node indices).
struct scenario_data {
  scenario_config cfg;
  network net;
  std::vector<cluster_spec> clusters;          // physical population
  std::vector<cluster_spec> learner_clusters;  // model the learner reasons with
  std::vector<price_signal> prices;
  std::vector<target_profile> targets;
  std::vector<sensitivity_model> thetas;
  int true_index = -1;    // index of cfg.true_theta_id within thetas
  int switch_index = -1;  // index of cfg.theta_switch_id, or -1
  constraint_limits limits;
};

scenario_data load_scenario_data(const scenario_config& cfg);
scenario_data load_scenario_data_file(const std::string& path);

}  // namespace rtpsim
