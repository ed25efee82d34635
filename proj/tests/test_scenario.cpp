#include <fstream>
#include <string>
#include <vector>

#include "doctest.h"
#include "rtpsim/default_scenario.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/scenario.hpp"
#include "test_support.hpp"

using namespace rtpsim;

namespace {

const char* kBaseText =
    "network net.csv\n"
    "clusters clusters.csv\n"
    "prices prices.csv\n"
    "targets targets.csv\n"
    "thetas thetas.csv\n"
    "true_theta 4\n";

scenario_config parse_with(const std::string& extra) {
  return parse_scenario(std::string(kBaseText) + extra, "mem");
}

}  // namespace

TEST_SUITE("scenario") {

TEST_CASE("set_variant accepts the policy tokens") {
  scenario_config cfg;
  for (const char* token :
       {"conts-a", "conts-b", "uncon-ts", "two-stage", "clairvoyant"}) {
    set_variant(cfg, token);
    CHECK(cfg.variant == token);
  }
  set_variant(cfg, "two-stage-40");
  CHECK(cfg.variant == "two-stage");
  CHECK(cfg.two_stage_days == 40);

  CHECK_THROWS_AS(set_variant(cfg, "greedy"), sim_error);
  CHECK_THROWS_AS(set_variant(cfg, "two-stage-0"), sim_error);
  CHECK_THROWS_AS(set_variant(cfg, "two-stage-x"), sim_error);
}

TEST_CASE("parse_scenario fills defaults and reads every key") {
  const scenario_config cfg = parse_with("");
  CHECK(cfg.slots == 6);
  CHECK(cfg.dt_hours == 4.0);
  CHECK(cfg.horizon_days == 365);
  CHECK(cfg.variant == "conts-b");
  CHECK(cfg.mu == 0.1);
  CHECK(cfg.nu == 0.1);
  CHECK(cfg.target_mode == "iid");
  CHECK(cfg.theta_switch_day == 0);
  CHECK(cfg.visible_clusters.empty());
  CHECK(cfg.two_stage_days == 25);
  CHECK(cfg.two_stage_explore_ids.empty());
  CHECK(cfg.priced_node == 1);
  CHECK(cfg.true_theta_id == 4);
  CHECK(cfg.network_file == "net.csv");

  const scenario_config full = parse_with(
      "slots 4\n"
      "dt_hours 6\n"
      "horizon 120\n"
      "variant two-stage-15\n"
      "mu 0.2\n"
      "nu 1.0\n"           // the loosest admissible budget
      "sigma 0.3\n"
      "sigma_obs 0.25\n"
      "mass_bound_lambda 0.5\n"
      "target_mode cycle\n"
      "theta_switch_day 60\n"
      "theta_switch_id 7\n"
      "visible_clusters 1,2,3\n"
      "two_stage_explore 5,6\n"
      "priced_node 2\n"
      "u_min_frac 0.9\n"
      "u_max_frac 1.1\n");
  CHECK(full.slots == 4);
  CHECK(full.dt_hours == 6.0);
  CHECK(full.horizon_days == 120);
  CHECK(full.variant == "two-stage");
  CHECK(full.two_stage_days == 15);
  CHECK(full.nu == 1.0);
  CHECK(full.mass_bound_lambda == 0.5);
  CHECK(full.target_mode == "cycle");
  CHECK(full.theta_switch_day == 60);
  CHECK(full.theta_switch_id == 7);
  CHECK(full.visible_clusters == std::vector<int>{1, 2, 3});
  CHECK(full.two_stage_explore_ids == std::vector<int>{5, 6});
  CHECK(full.priced_node == 2);
  CHECK(full.u_min_frac == 0.9);

  // Comment and blank handling, plus the explicit "everything" sentinels.
  const scenario_config sentinels = parse_with(
      "\n"
      "# a full-line comment\n"
      "visible_clusters all   # trailing comment\n"
      "two_stage_explore auto\n");
  CHECK(sentinels.visible_clusters.empty());
  CHECK(sentinels.two_stage_explore_ids.empty());
}

TEST_CASE("parse_scenario rejects malformed or out-of-range input") {
  CHECK_THROWS_AS((void)parse_with("bogus_key 1\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("mu 1.5\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("mu 0\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("nu 0\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("nu 1.01\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("slots -2\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("slots 2.5\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("horizon 0\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("target_mode sometimes\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("theta_switch_day 10\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("two_stage_days 0\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("u_min_frac 1.2\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("sigma -0.1\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("horizon 10\nhorizon 10\n"), sim_error);
  CHECK_THROWS_AS((void)parse_with("horizon\n"), sim_error);
  CHECK_THROWS_AS((void)parse_scenario("true_theta 4\n", "mem"), sim_error);
  CHECK_THROWS_AS((void)parse_scenario(std::string(kBaseText) +
                                           "visible_clusters ,\n",
                                       "mem"),
                  sim_error);
}

TEST_CASE("load_scenario_file resolves data paths against its directory") {
  const std::string dir = testsupport::scratch_dir("scn_paths");
  {
    std::ofstream out(dir + "/case.scn", std::ios::binary);
    out << kBaseText;
  }
  const scenario_config cfg = load_scenario_file(dir + "/case.scn");
  CHECK(cfg.network_file == dir + "/net.csv");
  CHECK(cfg.thetas_file == dir + "/thetas.csv");
  CHECK_THROWS_AS((void)load_scenario_file(dir + "/absent.scn"), sim_error);
}

TEST_CASE("load_scenario_data wires the generated bundle together") {
  const std::string dir = testsupport::scratch_dir("scn_data");
  write_default_bundle(dir);

  const scenario_data data = load_scenario_data_file(dir + "/acceptance.scn");
  CHECK(data.cfg.slots == 6);
  CHECK(data.cfg.horizon_days == 365);
  CHECK(data.net.node_count == 1);
  CHECK(data.clusters.size() == 20);
  CHECK(data.learner_clusters.size() == 20);
  CHECK(data.prices.size() == 64);
  CHECK(data.targets.size() == 10);
  CHECK(data.thetas.size() == 10);
  CHECK(data.true_index == 3);
  CHECK(data.thetas[3].id == data.cfg.true_theta_id);
  CHECK(data.switch_index == -1);
  CHECK(data.limits.u_min_v2 == doctest::Approx(0.9025 * 12500.0 * 12500.0));

  scenario_config cfg = load_scenario_file(dir + "/acceptance.scn");

  SUBCASE("visible_clusters restricts the learner model only") {
    cfg.visible_clusters = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    const scenario_data partial = load_scenario_data(cfg);
    CHECK(partial.clusters.size() == 20);
    REQUIRE(partial.learner_clusters.size() == 10);
    for (int i = 0; i < 10; ++i)
      CHECK(partial.learner_clusters[static_cast<std::size_t>(i)].id == i + 1);
  }

  SUBCASE("id references are validated") {
    scenario_config bad = cfg;
    bad.true_theta_id = 99;
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);

    bad = cfg;
    bad.theta_switch_day = 10;
    bad.theta_switch_id = 99;
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);

    bad = cfg;
    bad.priced_node = 5;
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);

    bad = cfg;
    bad.visible_clusters = {99};
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);

    bad = cfg;
    bad.two_stage_explore_ids = {999};
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);

    bad = cfg;
    bad.network_file = dir + "/missing.csv";
    CHECK_THROWS_AS((void)load_scenario_data(bad), sim_error);
  }

  SUBCASE("a valid switch id resolves to its index") {
    cfg.theta_switch_day = 250;
    cfg.theta_switch_id = 7;
    const scenario_data sw = load_scenario_data(cfg);
    CHECK(sw.switch_index == 6);
    CHECK(sw.thetas[6].id == 7);
  }
}

}  // TEST_SUITE
