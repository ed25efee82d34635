#include <filesystem>
#include <string>
#include <vector>

#include "doctest.h"
#include "rtpsim/default_scenario.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/harness.hpp"
#include "test_support.hpp"

using namespace rtpsim;

namespace {

// The generated bundle is written and loaded once for the whole suite; every
// case copies the loaded data and patches the config it needs.
struct bundle_fixture {
  std::string dir;
  scenario_data data;  // acceptance scenario with the horizon cut to 40 days

  bundle_fixture()
      : dir(testsupport::scratch_dir("harness_bundle")) {
    write_default_bundle(dir);
    data = load_scenario_data_file(dir + "/acceptance.scn");
    data.cfg.horizon_days = 40;
  }
};

const bundle_fixture& fixture() {
  static bundle_fixture f;
  return f;
}

scenario_data with_variant(const std::string& token) {
  scenario_data d = fixture().data;
  set_variant(d.cfg, token);
  return d;
}

}  // namespace

TEST_SUITE("harness") {

TEST_CASE("run_scenario is a pure function of scenario and seed") {
  const scenario_data& data = fixture().data;
  const run_result a = run_scenario(data, 3);
  const run_result b = run_scenario(data, 3);

  REQUIRE(a.days.size() == 40);
  CHECK(a.theta_ids == std::vector<int>{1, 2, 3, 4, 5, 6, 7, 8, 9, 10});
  CHECK(a.posterior == b.posterior);  // bitwise
  CHECK(a.final_cumulative_regret == b.final_cumulative_regret);
  CHECK(a.final_map_id == b.final_map_id);
  CHECK(a.violating_days == b.violating_days);
  for (std::size_t i = 0; i < a.days.size(); ++i) {
    CHECK(a.days[i].target_id == b.days[i].target_id);
    CHECK(a.days[i].chosen_price_id == b.days[i].chosen_price_id);
    CHECK(a.days[i].sampled_theta_id == b.days[i].sampled_theta_id);
    CHECK(a.days[i].realized_cost == b.days[i].realized_cost);
  }

  const run_result c = run_scenario(data, 4);
  bool any_difference = false;
  for (std::size_t i = 0; i < a.days.size(); ++i)
    if (a.days[i].target_id != c.days[i].target_id ||
        a.days[i].realized_cost != c.days[i].realized_cost)
      any_difference = true;
  CHECK(any_difference);
}

TEST_CASE("run records are complete and agree with the summary fields") {
  const run_result r = run_scenario(fixture().data, 1);
  CHECK_NOTHROW(validate_records(r.days));

  CHECK(violation_summary(r.days).violating_days == r.violating_days);

  long fallbacks = 0, late_suboptimal = 0;
  for (const day_record& d : r.days) {
    if (d.fallback) ++fallbacks;
    if (d.chosen_price_id != d.optimal_price_id && d.day > 40 - 100)
      ++late_suboptimal;
  }
  CHECK(fallbacks == r.fallback_days);
  CHECK(late_suboptimal == r.final_suboptimal);

  const regret_series series = cumulative_regret(r.days);
  CHECK(series.cumulative.back() == r.final_cumulative_regret);

  REQUIRE(r.posterior.size() == r.days.size());
  int first_mass = -1;
  for (std::size_t d = 0; d < r.posterior.size(); ++d) {
    CHECK(r.days[d].posterior_mass_true == r.posterior[d][3]);
    if (first_mass < 0 && r.posterior[d][3] >= 0.95)
      first_mass = static_cast<int>(d) + 1;
  }
  CHECK(first_mass == r.first_mass_day);

  CHECK(r.final_belief.weights == r.posterior.back());
}

TEST_CASE("one seed reproduces one environment across variants") {
  const auto variants =
      std::vector<std::string>{"conts-b", "uncon-ts", "clairvoyant"};
  const compare_result cmp =
      compare_variants(fixture().data, variants, {1, 2});
  REQUIRE(cmp.runs.size() == 6);
  for (std::size_t s = 0; s < cmp.seeds.size(); ++s) {
    const run_result& base = cmp.run(0, s);
    for (std::size_t v = 1; v < variants.size(); ++v) {
      const run_result& other = cmp.run(v, s);
      REQUIRE(other.days.size() == base.days.size());
      for (std::size_t d = 0; d < base.days.size(); ++d)
        CHECK(base.days[d].target_id == other.days[d].target_id);
    }
  }

  // The unconstrained filter never runs out of prices.
  for (std::size_t s = 0; s < cmp.seeds.size(); ++s)
    CHECK(cmp.run(1, s).fallback_days == 0);

  CHECK_THROWS_AS((void)compare_variants(fixture().data, {}, {1}), sim_error);
  CHECK_THROWS_AS((void)compare_variants(fixture().data, {"conts-b"}, {}),
                  sim_error);
}

TEST_CASE("two-stage explores the robust deck in order, then commits") {
  const scenario_data data = with_variant("two-stage-25");
  const run_result r = run_scenario(data, 1);

  std::vector<int> expected_deck;
  for (int id = 1; id <= 25; ++id) expected_deck.push_back(id);
  CHECK(r.explore_deck_ids == expected_deck);

  for (int day = 1; day <= 25; ++day) {
    const day_record& d = r.days[static_cast<std::size_t>(day - 1)];
    CHECK(d.chosen_price_id == expected_deck[static_cast<std::size_t>((day - 1) % 25)]);
    CHECK(d.sampled_theta_id == -1);
    CHECK(!d.fallback);
  }
  for (std::size_t i = 25; i < r.days.size(); ++i)
    CHECK(r.days[i].sampled_theta_id != -1);

  // After commitment the belief is frozen.
  for (std::size_t i = 25; i < r.posterior.size(); ++i)
    CHECK(r.posterior[i] == r.posterior[24]);
}

TEST_CASE("an early commitment freezes an uninformed belief") {
  const scenario_data data = with_variant("two-stage-5");
  const run_result r = run_scenario(data, 1);
  // Days 1..5 broadcast deck prices carrying no candidate-separating
  // information, so the committed mode is the earliest candidate.
  for (std::size_t i = 5; i < r.days.size(); ++i) {
    CHECK(r.days[i].sampled_theta_id == 1);
    CHECK(r.posterior[i] == r.posterior[4]);
  }
  const std::vector<double>& w = r.posterior[4];
  for (double v : w) CHECK(v == doctest::Approx(0.1).epsilon(1e-12));
}

TEST_CASE("the clairvoyant policy is its own baseline") {
  const scenario_data data = with_variant("clairvoyant");
  const run_result r = run_scenario(data, 2);
  for (const day_record& d : r.days)
    CHECK(d.chosen_price_id == d.optimal_price_id);
  CHECK(r.final_suboptimal == 0);
  CHECK(r.final_cumulative_regret == 0.0);
}

TEST_CASE("default_seeds counts from one") {
  CHECK(default_seeds(5) == std::vector<std::uint64_t>{1, 2, 3, 4, 5});
  CHECK(default_seeds(0).empty());
}

TEST_CASE("output writers emit the full file set") {
  namespace fs = std::filesystem;
  const std::string out = testsupport::scratch_dir("harness_out");

  const run_result r = run_scenario(fixture().data, 1);
  write_run_outputs(r, out + "/run");
  for (const char* name : {"days.csv", "regret.csv", "suboptimal.csv",
                           "violations.csv", "posterior.csv"})
    CHECK(fs::exists(out + "/run/" + name));
  csv_document days = read_csv_file(out + "/run/days.csv");
  CHECK(days.rows.size() == 41);
  csv_document post = read_csv_file(out + "/run/posterior.csv");
  CHECK(post.rows.size() == 1 + 40 * 10);

  const compare_result cmp =
      compare_variants(fixture().data, {"conts-b", "uncon-ts"}, {1});
  write_compare_outputs(cmp, out + "/cmp");
  csv_document summary = read_csv_file(out + "/cmp/compare.csv");
  REQUIRE(summary.rows.size() == 3);
  CHECK(summary.rows[1][0] == "conts-b");
  CHECK(summary.rows[2][0] == "uncon-ts");
  csv_document daily = read_csv_file(out + "/cmp/violating_days.csv");
  CHECK(daily.rows.size() == 41);
  CHECK(daily.rows[0] ==
        std::vector<std::string>{"day", "conts-b", "uncon-ts"});
}

TEST_CASE("sweep_parameter re-runs the scenario per value") {
  scenario_config cfg = load_scenario_file(fixture().dir + "/acceptance.scn");
  cfg.horizon_days = 30;
  const std::vector<sweep_row> rows =
      sweep_parameter(cfg, "horizon", {10.0, 20.0}, {1});
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].value == 10.0);
  CHECK(rows[1].value == 20.0);
  CHECK(rows[0].std_final_regret == 0.0);  // single seed

  CHECK_THROWS_AS((void)sweep_parameter(cfg, "volume", {1.0}, {1}), sim_error);
  CHECK_THROWS_AS((void)sweep_parameter(cfg, "nu", {}, {1}), sim_error);

  const std::string out = testsupport::scratch_dir("harness_sweep");
  write_sweep_csv(out + "/sweep.csv", "horizon", rows);
  csv_document doc = read_csv_file(out + "/sweep.csv");
  REQUIRE(doc.rows.size() == 3);
  CHECK(doc.rows[0][0] == "horizon");
  CHECK(cell_as_double(doc.rows[1][0], "sweep") == 10.0);

  // cluster_count trims both the physical and the learner population.
  const std::vector<sweep_row> trimmed =
      sweep_parameter(cfg, "cluster_count", {5.0}, {1});
  REQUIRE(trimmed.size() == 1);
  CHECK_THROWS_AS((void)sweep_parameter(cfg, "cluster_count", {99.0}, {1}),
                  sim_error);
}

}  // TEST_SUITE
