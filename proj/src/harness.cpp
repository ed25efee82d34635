#include "rtpsim/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "rtpsim/csv.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/pricer.hpp"
#include "rtpsim/rng.hpp"

namespace rtpsim {

namespace {

constexpr double kMassThreshold = 0.95;

struct day_target {
  target_profile profile;  // the values actually tracked that day
  int id = 0;              // id of the base profile it was derived from
};

// Target draw for one day. iid consumes one uniform; cycle consumes none;
// non-repeating cycles through the base profiles and scales each slot by an
// independent factor in [0.9, 1.1], making repeats measure-zero events.
day_target draw_target(const scenario_data& data, std::uint64_t seed, int day) {
  const std::vector<target_profile>& bases = data.targets;
  counter_rng rng(seed, rng_stream::targets, static_cast<std::uint64_t>(day));
  day_target out;
  if (data.cfg.target_mode == "iid") {
    std::size_t k = static_cast<std::size_t>(rng.index(bases.size()));
    out.profile = bases[k];
  } else {
    std::size_t k = static_cast<std::size_t>((day - 1) % bases.size());
    out.profile = bases[k];
    if (data.cfg.target_mode == "non-repeating")
      for (double& v : out.profile.target) v *= 0.9 + 0.2 * rng.uniform();
  }
  out.id = out.profile.id;
  return out;
}

constraint_mode mode_for_variant(const std::string& variant) {
  if (variant == "conts-a" || variant == "clairvoyant")
    return constraint_mode::set_a;
  if (variant == "conts-b" || variant == "two-stage")
    return constraint_mode::set_b;
  return constraint_mode::unconstrained;
}

// Background demand rows for the unpriced nodes: all zero.
demand_schedule zero_background(const network& net, int slots) {
  demand_schedule bg;
  bg.slots = slots;
  bg.active.assign(static_cast<std::size_t>(net.node_count),
                   std::vector<double>(static_cast<std::size_t>(slots), 0.0));
  return bg;
}

// Load models for the analytic constraint probability: stochastic priced
// node, deterministic zeros elsewhere.
std::vector<nodal_load_model> single_node_loads(const network& net, int slots,
                                                int priced_node,
                                                nodal_load_model priced) {
  nodal_load_model quiet;
  quiet.mean_p.assign(static_cast<std::size_t>(slots), 0.0);
  quiet.var_p.assign(static_cast<std::size_t>(slots), 0.0);
  std::vector<nodal_load_model> loads(static_cast<std::size_t>(net.node_count),
                                      quiet);
  loads[static_cast<std::size_t>(priced_node - 1)] = std::move(priced);
  return loads;
}

// Deck for the exploration phase: the fallback broadcast plus every price
// whose constraints hold with probability >= 1-mu under every candidate the
// learner entertains. Table order; the fallback is not duplicated.
std::vector<int> build_explore_deck(const scenario_data& data,
                                    const price_table& table,
                                    const noise_config& noise) {
  std::vector<int> deck;
  if (!data.cfg.two_stage_explore_ids.empty()) {
    for (int id : data.cfg.two_stage_explore_ids)
      for (std::size_t i = 0; i < table.prices.size(); ++i)
        if (table.prices[i].id == id) deck.push_back(static_cast<int>(i));
    return deck;
  }
  int fallback = table.fallback_index();
  for (std::size_t i = 0; i < table.prices.size(); ++i) {
    bool robust = true;
    for (const sensitivity_model& theta : data.thetas) {
      nodal_load_model m = physical_load_model(table.profiles[i], theta,
                                               table.prices[i].price, noise);
      constraint_probs probs = constraint_probability(
          data.net, single_node_loads(data.net, data.cfg.slots,
                                      data.cfg.priced_node, std::move(m)),
          data.limits);
      if (!(probs.min_sat() >= 1.0 - data.cfg.mu)) {
        robust = false;
        break;
      }
    }
    if (robust || static_cast<int>(i) == fallback)
      deck.push_back(static_cast<int>(i));
  }
  return deck;
}

}  // namespace

run_result run_scenario(const scenario_data& data, std::uint64_t seed) {
  const scenario_config& cfg = data.cfg;
  const bool learner_sees_all =
      data.learner_clusters.size() == data.clusters.size() &&
      cfg.visible_clusters.empty();

  // Environment-side table (true population) and the learner's table. They
  // share the same price list, so indices are interchangeable.
  price_table env_table = price_table::build(data.prices, data.clusters,
                                             cfg.dt_hours);
  price_table learner_table =
      learner_sees_all
          ? env_table
          : price_table::build(data.prices, data.learner_clusters, cfg.dt_hours);

  noise_config noise;
  noise.sigma = cfg.sigma;
  noise.sigma_obs = cfg.sigma_obs;

  chance_config select_cfg;
  select_cfg.mode = mode_for_variant(cfg.variant);
  select_cfg.mu = cfg.mu;
  select_cfg.nu = cfg.nu;
  select_cfg.limits = data.limits;

  chance_config clair_cfg = select_cfg;
  clair_cfg.mode = constraint_mode::set_a;

  demand_schedule background = zero_background(data.net, cfg.slots);

  prior belief = init_prior(data.thetas);
  run_result out;
  out.theta_ids.reserve(data.thetas.size());
  for (const sensitivity_model& m : data.thetas) out.theta_ids.push_back(m.id);

  const bool two_stage = cfg.variant == "two-stage";
  std::vector<int> deck;
  if (two_stage) {
    deck = build_explore_deck(data, learner_table, noise);
    if (deck.empty()) throw_error(errc::no_feasible_price, "empty explore deck");
    for (int i : deck)
      out.explore_deck_ids.push_back(learner_table.prices[static_cast<std::size_t>(i)].id);
  }
  bool committed = false;
  prior committed_belief;
  int committed_mode = -1;

  double cumulative_regret_total = 0.0;

  for (int day = 1; day <= cfg.horizon_days; ++day) {
    // 1. Active true model.
    int true_idx = data.true_index;
    if (cfg.theta_switch_day > 0 && day >= cfg.theta_switch_day)
      true_idx = data.switch_index;
    const sensitivity_model& theta_true =
        data.thetas[static_cast<std::size_t>(true_idx)];

    // 2. Target.
    day_target today = draw_target(data, seed, day);

    // 3. Price choice.
    selection_result chosen;
    int sampled_theta_id = -1;
    if (two_stage && !committed) {
      int pos = (day - 1) % static_cast<int>(deck.size());
      chosen.price_index = deck[static_cast<std::size_t>(pos)];
      chosen.fallback = false;
    } else if (two_stage) {
      const sensitivity_model& objective =
          committed_belief.support[static_cast<std::size_t>(committed_mode)];
      sampled_theta_id = objective.id;
      chosen = select_price(learner_table, objective, committed_belief,
                            today.profile, select_cfg, data.net,
                            cfg.priced_node, background, noise);
    } else if (cfg.variant == "clairvoyant") {
      sampled_theta_id = theta_true.id;
      chosen = select_price(learner_table, theta_true, belief, today.profile,
                            select_cfg, data.net, cfg.priced_node, background,
                            noise);
    } else {
      counter_rng ts_rng(seed, rng_stream::ts_sampling,
                         static_cast<std::uint64_t>(day));
      int k = sample_index(belief, ts_rng);
      const sensitivity_model& objective =
          belief.support[static_cast<std::size_t>(k)];
      sampled_theta_id = objective.id;
      chosen = select_price(learner_table, objective, belief, today.profile,
                            select_cfg, data.net, cfg.priced_node, background,
                            noise);
    }
    const std::size_t ci = static_cast<std::size_t>(chosen.price_index);
    const price_signal& price = env_table.prices[ci];

    // 4. Environment response (streams consumed in fixed per-day blocks).
    counter_rng pref_rng(seed, rng_stream::preferences,
                         static_cast<std::uint64_t>(day));
    counter_rng obs_rng(seed, rng_stream::obs_noise,
                        static_cast<std::uint64_t>(day));
    std::vector<double> counts = sample_adjustments(
        theta_true, price.price, data.clusters, noise, pref_rng);
    const response_profile& env_profile = env_table.profiles[ci];
    std::vector<double> physical(static_cast<std::size_t>(cfg.slots), 0.0);
    for (std::size_t c = 0; c < counts.size(); ++c)
      for (int t = 0; t < cfg.slots; ++t)
        physical[static_cast<std::size_t>(t)] +=
            counts[c] * env_profile.schedules[c][static_cast<std::size_t>(t)];
    std::vector<double> observed = physical;
    for (double& y : observed) y = std::max(0.0, y + noise.sigma_obs * obs_rng.normal());

    // 5. Grid outcome and costs under the active true model.
    demand_schedule demand = background;
    demand.active[static_cast<std::size_t>(cfg.priced_node - 1)] = physical;
    violation_report report =
        check_constraints(solve_lindistflow(data.net, demand), data.net,
                          data.limits);

    selection_result best = clairvoyant_price(env_table, theta_true,
                                              today.profile, clair_cfg,
                                              data.net, cfg.priced_node,
                                              background, noise);

    load_moments chosen_m =
        expected_load(env_profile, theta_true, price.price, noise);
    load_moments best_m = expected_load(
        env_table.profiles[static_cast<std::size_t>(best.price_index)],
        theta_true,
        env_table.prices[static_cast<std::size_t>(best.price_index)].price,
        noise);

    nodal_load_model chosen_phys =
        physical_load_model(env_profile, theta_true, price.price, noise);
    constraint_probs chosen_probs = constraint_probability(
        data.net, single_node_loads(data.net, cfg.slots, cfg.priced_node,
                                    std::move(chosen_phys)),
        data.limits);

    // 6. Belief update.
    if (!(two_stage && committed)) {
      belief = posterior_update(belief, observed,
                                learner_table.profiles[ci], price.price, noise);
    }
    if (two_stage && !committed && day >= cfg.two_stage_days) {
      committed = true;
      committed_belief = belief;
      committed_mode = map_index(committed_belief);
    }

    // 7. Record.
    day_record rec;
    rec.day = day;
    rec.target_id = today.id;
    rec.sampled_theta_id = sampled_theta_id;
    rec.chosen_price_id = price.id;
    rec.optimal_price_id =
        env_table.prices[static_cast<std::size_t>(best.price_index)].id;
    rec.fallback = chosen.fallback;
    double realized = 0.0;
    for (int t = 0; t < cfg.slots; ++t) {
      double d = physical[static_cast<std::size_t>(t)] -
                 today.profile.target[static_cast<std::size_t>(t)];
      realized += d * d;
    }
    rec.realized_cost = realized;
    rec.chosen_expected_cost_true = expected_cost(chosen_m, today.profile.target);
    rec.clairvoyant_expected_cost = expected_cost(best_m, today.profile.target);
    rec.posterior_mass_true = belief.weights[static_cast<std::size_t>(true_idx)];
    rec.true_violation_prob = 1.0 - chosen_probs.min_sat();
    rec.violation_flow = report.flow_count;
    rec.violation_voltage_low = report.voltage_low_count;
    rec.violation_voltage_high = report.voltage_high_count;
    cumulative_regret_total +=
        rec.chosen_expected_cost_true - rec.clairvoyant_expected_cost;
    if (rec.chosen_price_id != rec.optimal_price_id &&
        day > cfg.horizon_days - 100)
      ++out.final_suboptimal;
    if (report.total() > 0) ++out.violating_days;
    if (rec.fallback) ++out.fallback_days;
    if (out.first_mass_day < 0 && rec.posterior_mass_true >= kMassThreshold)
      out.first_mass_day = day;
    out.days.push_back(rec);
    out.posterior.push_back(belief.weights);
  }

  out.final_belief = belief;
  out.final_map_id =
      belief.support[static_cast<std::size_t>(map_index(belief))].id;
  out.final_cumulative_regret = cumulative_regret_total;
  return out;
}

void write_run_outputs(const run_result& result, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir(out_dir);
  write_days_csv((dir / "days.csv").string(), result.days);
  write_regret_csv((dir / "regret.csv").string(), result.days);
  write_suboptimal_csv((dir / "suboptimal.csv").string(), result.days);
  write_violations_csv((dir / "violations.csv").string(), result.days);
  write_posterior_csv((dir / "posterior.csv").string(), result.theta_ids,
                      result.posterior);
}

std::vector<std::uint64_t> default_seeds(int count) {
  std::vector<std::uint64_t> seeds;
  for (int i = 1; i <= count; ++i)
    seeds.push_back(static_cast<std::uint64_t>(i));
  return seeds;
}

compare_result compare_variants(const scenario_data& data,
                                const std::vector<std::string>& variants,
                                const std::vector<std::uint64_t>& seeds) {
  if (variants.empty()) throw_error(errc::config_error, "no variants to compare");
  if (seeds.empty()) throw_error(errc::config_error, "no seeds to compare");
  compare_result out;
  out.variants = variants;
  out.seeds = seeds;
  for (const std::string& token : variants) {
    scenario_data variant_data = data;
    set_variant(variant_data.cfg, token);
    for (std::uint64_t seed : seeds)
      out.runs.push_back(run_scenario(variant_data, seed));
  }
  return out;
}

void write_compare_outputs(const compare_result& result,
                           const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::filesystem::path dir(out_dir);

  std::ofstream summary((dir / "compare.csv").string(), std::ios::binary);
  if (!summary)
    throw_error(errc::parse_error, "cannot open for writing: compare.csv");
  summary << "variant,seed,final_regret,final_suboptimal,violating_days,"
             "fallback_days,first_mass_day,final_map_id\n";
  for (std::size_t v = 0; v < result.variants.size(); ++v)
    for (std::size_t s = 0; s < result.seeds.size(); ++s) {
      const run_result& r = result.run(v, s);
      summary << result.variants[v] << ',' << result.seeds[s] << ','
              << format_double(r.final_cumulative_regret) << ','
              << r.final_suboptimal << ',' << r.violating_days << ','
              << r.fallback_days << ',' << r.first_mass_day << ','
              << r.final_map_id << '\n';
    }

  // Per-day cumulative count of violating days, averaged over seeds.
  std::ofstream daily((dir / "violating_days.csv").string(), std::ios::binary);
  if (!daily)
    throw_error(errc::parse_error, "cannot open for writing: violating_days.csv");
  daily << "day";
  for (const std::string& v : result.variants) daily << ',' << v;
  daily << '\n';
  std::size_t horizon = result.runs.front().days.size();
  for (std::size_t d = 0; d < horizon; ++d) {
    daily << (d + 1);
    for (std::size_t v = 0; v < result.variants.size(); ++v) {
      double mean = 0.0;
      for (std::size_t s = 0; s < result.seeds.size(); ++s) {
        const run_result& r = result.run(v, s);
        long cum = 0;
        for (std::size_t i = 0; i <= d && i < r.days.size(); ++i)
          if (r.days[i].violations_total() > 0) ++cum;
        mean += static_cast<double>(cum);
      }
      daily << ',' << format_double(mean / static_cast<double>(result.seeds.size()));
    }
    daily << '\n';
  }
}

std::vector<sweep_row> sweep_parameter(const scenario_config& cfg,
                                       const std::string& param,
                                       const std::vector<double>& values,
                                       const std::vector<std::uint64_t>& seeds) {
  if (values.empty()) throw_error(errc::config_error, "no sweep values");
  if (seeds.empty()) throw_error(errc::config_error, "no sweep seeds");
  std::vector<sweep_row> rows;
  for (double value : values) {
    scenario_config patched = cfg;
    int cluster_count = 0;
    if (param == "nu") patched.nu = value;
    else if (param == "mu") patched.mu = value;
    else if (param == "sigma") patched.sigma = value;
    else if (param == "sigma_obs") patched.sigma_obs = value;
    else if (param == "horizon") patched.horizon_days = static_cast<int>(value);
    else if (param == "two_stage_days")
      patched.two_stage_days = static_cast<int>(value);
    else if (param == "cluster_count") cluster_count = static_cast<int>(value);
    else throw_error(errc::config_error, "unknown sweep parameter '" + param + "'");

    scenario_data data = load_scenario_data(patched);
    if (cluster_count > 0) {
      if (cluster_count > static_cast<int>(data.clusters.size()))
        throw_error(errc::config_error, "cluster_count exceeds population");
      data.clusters.resize(static_cast<std::size_t>(cluster_count));
      data.learner_clusters = data.clusters;
    }

    sweep_row row;
    row.value = value;
    std::vector<double> regrets;
    for (std::uint64_t seed : seeds) {
      run_result r = run_scenario(data, seed);
      regrets.push_back(r.final_cumulative_regret);
      row.mean_final_suboptimal += static_cast<double>(r.final_suboptimal);
      row.mean_violating_days += static_cast<double>(r.violating_days);
      row.mean_fallback_days += static_cast<double>(r.fallback_days);
    }
    double n = static_cast<double>(seeds.size());
    for (double r : regrets) row.mean_final_regret += r;
    row.mean_final_regret /= n;
    double ss = 0.0;
    for (double r : regrets) {
      double d = r - row.mean_final_regret;
      ss += d * d;
    }
    row.std_final_regret = seeds.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
    row.mean_final_suboptimal /= n;
    row.mean_violating_days /= n;
    row.mean_fallback_days /= n;
    rows.push_back(row);
  }
  return rows;
}

void write_sweep_csv(const std::string& path, const std::string& param,
                     const std::vector<sweep_row>& rows) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw_error(errc::parse_error, "cannot open for writing: " + path);
  out << param
      << ",mean_final_regret,std_final_regret,mean_final_suboptimal,"
         "mean_violating_days,mean_fallback_days\n";
  for (const sweep_row& r : rows)
    out << format_double(r.value) << ',' << format_double(r.mean_final_regret)
        << ',' << format_double(r.std_final_regret) << ','
        << format_double(r.mean_final_suboptimal) << ','
        << format_double(r.mean_violating_days) << ','
        << format_double(r.mean_fallback_days) << '\n';
}

}  // namespace rtpsim
