#include "rtpsim/pricer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "rtpsim/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace rtpsim {

namespace {

std::vector<double> load_row(const std::vector<std::string>& row,
                             const std::string& ctx, std::size_t offset) {
  std::vector<double> v;
  for (std::size_t i = offset; i < row.size(); ++i) {
    v.push_back(cell_as_double(row[i], ctx));
  }
  return v;
}

}  // namespace

std::vector<price_signal> load_prices(const csv_document& doc,
                                      const std::string& origin) {
  const auto& header = doc.rows.front();
  if (header.size() < 2 || header[0] != "price_id") {
    throw_error(errc::parse_error,
                origin + ": expected header starting with 'price_id'");
  }
  const std::size_t slots = header.size() - 1;
  std::vector<price_signal> out;
  std::set<int> ids;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string ctx = origin + " row " + std::to_string(r + 1);
    if (row.size() != slots + 1) throw_error(errc::parse_error, ctx + ": ragged row");
    price_signal p;
    p.id = static_cast<int>(cell_as_long(row[0], ctx + " price_id"));
    if (!ids.insert(p.id).second) {
      throw_error(errc::parse_error, ctx + ": duplicate price id");
    }
    p.price = load_row(row, ctx, 1);
    for (double v : p.price) {
      if (v <= 0.0) {
        throw_error(errc::parse_error, ctx + ": prices must be positive");
      }
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<price_signal> load_prices_file(const std::string& path) {
  return load_prices(read_csv_file(path), path);
}

std::vector<target_profile> load_targets(const csv_document& doc,
                                         const std::string& origin) {
  const auto& header = doc.rows.front();
  if (header.size() < 2 || header[0] != "target_id") {
    throw_error(errc::parse_error,
                origin + ": expected header starting with 'target_id'");
  }
  const std::size_t slots = header.size() - 1;
  std::vector<target_profile> out;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string ctx = origin + " row " + std::to_string(r + 1);
    if (row.size() != slots + 1) throw_error(errc::parse_error, ctx + ": ragged row");
    target_profile t;
    t.id = static_cast<int>(cell_as_long(row[0], ctx + " target_id"));
    t.target = load_row(row, ctx, 1);
    for (double v : t.target) {
      if (v < 0.0) {
        throw_error(errc::parse_error, ctx + ": targets must be >= 0");
      }
    }
    out.push_back(std::move(t));
  }
  return out;
}

std::vector<target_profile> load_targets_file(const std::string& path) {
  return load_targets(read_csv_file(path), path);
}

price_table price_table::build(std::vector<price_signal> prices,
                               const std::vector<cluster_spec>& specs,
                               double dt_hours) {
  if (prices.empty()) {
    throw_error(errc::config_error, "price set is empty");
  }
  price_table table;
  table.dt_hours = dt_hours;
  table.profiles.reserve(prices.size());
  for (const price_signal& p : prices) {
    if (p.price.size() != prices.front().price.size()) {
      throw_error(errc::dimension_mismatch, "price signals differ in length");
    }
    table.profiles.push_back(build_response_profile(specs, p.price, dt_hours));
  }
  table.prices = std::move(prices);
  return table;
}

int price_table::fallback_index() const {
  int best = 0;
  double best_sum = -1.0;
  for (int i = 0; i < static_cast<int>(prices.size()); ++i) {
    double s = 0.0;
    for (double v : prices[i].price) s += v;
    if (s > best_sum) {
      best_sum = s;
      best = i;
    }
  }
  return best;
}

double expected_cost(const load_moments& m, const std::vector<double>& target) {
  if (m.mean.size() != target.size()) {
    throw_error(errc::dimension_mismatch, "target length != slots");
  }
  double cost = 0.0;
  for (std::size_t t = 0; t < target.size(); ++t) {
    const double d = m.mean[t] - target[t];
    cost += d * d + m.var[t];
  }
  return cost;
}

double expected_cost(const sensitivity_model& theta,
                     const std::vector<double>& price,
                     const target_profile& target,
                     const std::vector<cluster_spec>& specs, double dt_hours,
                     const noise_config& noise) {
  return expected_cost(expected_load(theta, price, specs, dt_hours, noise),
                       target.target);
}

nodal_load_model physical_load_model(const response_profile& profile,
                                     const sensitivity_model& theta,
                                     const std::vector<double>& price,
                                     const noise_config& noise) {
  const double s = sensitivity_inner_product(theta, price);
  nodal_load_model m;
  const std::size_t slots = price.size();
  m.mean_p.resize(slots);
  m.var_p.resize(slots);
  const double pref_var = noise.sigma * noise.sigma;
  for (std::size_t t = 0; t < slots; ++t) {
    // Metering noise is excluded: the grid sees the physical load only.
    m.mean_p[t] = profile.beta_weighted[t] / s;
    m.var_p[t] = pref_var * profile.square_sum[t];
  }
  return m;
}

double constraint_probs::min_sat() const {
  double m = 1.0;
  for (double s : sat) m = std::min(m, s);
  return m;
}

constraint_probs constraint_probability(const network& net,
                                        const std::vector<nodal_load_model>& loads,
                                        const constraint_limits& limits) {
  const int n = net.node_count;
  if (static_cast<int>(loads.size()) != n) {
    throw_error(errc::dimension_mismatch, "one load model per node required");
  }
  const int slots = loads.empty() ? 0 : static_cast<int>(loads[0].mean_p.size());
  for (const auto& l : loads) {
    if (static_cast<int>(l.mean_p.size()) != slots ||
        static_cast<int>(l.var_p.size()) != slots ||
        (!l.q_kvar.empty() && static_cast<int>(l.q_kvar.size()) != slots)) {
      throw_error(errc::dimension_mismatch, "load model slot mismatch");
    }
  }

  constraint_probs out;
  out.sat.reserve(static_cast<std::size_t>(n) * slots * 3);

  // Line flows: mean/variance add over the subtree (independent nodes).
  for (int i = 1; i <= n; ++i) {
    const double cap = net.lines[i - 1].s_max_kva;
    for (int t = 0; t < slots; ++t) {
      double mean = 0.0, var = 0.0, fq = 0.0;
      for (int k : net.subtree[i - 1]) {
        mean += loads[k - 1].mean_p[t];
        var += loads[k - 1].var_p[t];
        if (!loads[k - 1].q_kvar.empty()) fq += loads[k - 1].q_kvar[t];
      }
      const double b2 = cap * cap - fq * fq;
      double p;
      if (b2 < 0.0) {
        p = 0.0;  // reactive flow alone exceeds the rating
      } else {
        const double b = std::sqrt(b2);
        if (var <= 0.0) {
          p = (std::fabs(mean) <= b) ? 1.0 : 0.0;
        } else {
          const double sd = std::sqrt(var);
          p = normal_cdf((b - mean) / sd) - normal_cdf((-b - mean) / sd);
        }
      }
      out.sat.push_back(p);
    }
  }

  // Squared voltage at node a: affine in the nodal active/reactive loads with
  // coefficients 2R / 2X summed over shared root-path lines (kW -> W factor
  // 1000 applied once).
  const double u0 = net.v0_volts * net.v0_volts;
  for (int a = 1; a <= n; ++a) {
    std::vector<double> cr(n + 1, 0.0), cx(n + 1, 0.0);
    for (int k = 1; k <= n; ++k) {
      cr[k] = net.common_path_2r(a, k) * 1000.0;
      cx[k] = net.common_path_2x(a, k) * 1000.0;
    }
    for (int t = 0; t < slots; ++t) {
      double mean = u0, var = 0.0;
      for (int k = 1; k <= n; ++k) {
        mean -= cr[k] * loads[k - 1].mean_p[t];
        var += cr[k] * cr[k] * loads[k - 1].var_p[t];
        if (!loads[k - 1].q_kvar.empty()) mean -= cx[k] * loads[k - 1].q_kvar[t];
      }
      double p_low, p_high;
      if (var <= 0.0) {
        p_low = (mean >= limits.u_min_v2) ? 1.0 : 0.0;
        p_high = (mean <= limits.u_max_v2) ? 1.0 : 0.0;
      } else {
        const double sd = std::sqrt(var);
        p_low = normal_cdf((mean - limits.u_min_v2) / sd);
        p_high = normal_cdf((limits.u_max_v2 - mean) / sd);
      }
      out.sat.push_back(p_low);
      out.sat.push_back(p_high);
    }
  }
  return out;
}

constraint_probs mc_constraint_probability(const network& net,
                                           const std::vector<nodal_load_model>& loads,
                                           const constraint_limits& limits,
                                           int n_samples, std::uint64_t seed) {
  const int n = net.node_count;
  if (static_cast<int>(loads.size()) != n) {
    throw_error(errc::dimension_mismatch, "one load model per node required");
  }
  const int slots = loads.empty() ? 0 : static_cast<int>(loads[0].mean_p.size());
  const int n_constraints = n * slots * 3;
  std::vector<long> viol(n_constraints, 0);

#ifdef _OPENMP
#pragma omp parallel
#endif
  {
    std::vector<long> local(n_constraints, 0);
    demand_schedule d;
    d.slots = slots;
    d.active.assign(n, std::vector<double>(slots, 0.0));
    d.reactive.assign(n, std::vector<double>(slots, 0.0));
    for (int k = 0; k < n; ++k) {
      if (!loads[k].q_kvar.empty()) d.reactive[k] = loads[k].q_kvar;
    }

#ifdef _OPENMP
#pragma omp for schedule(static)
#endif
    for (int s = 0; s < n_samples; ++s) {
      // Sample s is a pure function of its counter block: reproducible
      // independent of scheduling.
      counter_rng rng(seed, rng_stream::monte_carlo,
                      static_cast<std::uint64_t>(s));
      for (int k = 0; k < n; ++k) {
        for (int t = 0; t < slots; ++t) {
          const double sd =
              loads[k].var_p[t] > 0.0 ? std::sqrt(loads[k].var_p[t]) : 0.0;
          // Deterministic entries consume no draws, so the draw sequence is a
          // fixed function of the stochastic entries alone.
          d.active[k][t] =
              loads[k].mean_p[t] + (sd > 0.0 ? sd * rng.normal() : 0.0);
        }
      }
      const flow_solution sol = solve_lindistflow(net, d);
      int idx = 0;
      for (int i = 1; i <= n; ++i) {
        const double cap2 = net.lines[i - 1].s_max_kva * net.lines[i - 1].s_max_kva;
        for (int t = 0; t < slots; ++t, ++idx) {
          const double fp = sol.flow_p[i - 1][t];
          const double fq = sol.flow_q[i - 1][t];
          if (fp * fp + fq * fq > cap2) ++local[idx];
        }
      }
      for (int a = 1; a <= n; ++a) {
        for (int t = 0; t < slots; ++t) {
          const double u = sol.u[a][t];
          if (u < limits.u_min_v2) ++local[idx];
          ++idx;
          if (u > limits.u_max_v2) ++local[idx];
          ++idx;
        }
      }
    }

#ifdef _OPENMP
#pragma omp critical
#endif
    {
      for (int j = 0; j < n_constraints; ++j) viol[j] += local[j];
    }
  }

  constraint_probs out;
  out.sat.resize(n_constraints);
  for (int j = 0; j < n_constraints; ++j) {
    out.sat[j] =
        1.0 - static_cast<double>(viol[j]) / static_cast<double>(n_samples);
  }
  return out;
}

namespace {

// Shared evaluation core for the enumeration kernel. Fills per-price cost and
// feasibility; identical arithmetic whether run serially or with OpenMP, since
// every price's evaluation is independent and writes only its own slot.
void evaluate_prices(const price_table& table,
                     const sensitivity_model& objective_theta,
                     const prior& belief, const target_profile& target,
                     const chance_config& cfg, const network& net,
                     int priced_node, const demand_schedule& background,
                     const noise_config& noise, bool parallel,
                     std::vector<double>& cost, std::vector<char>& feasible) {
  const int np = static_cast<int>(table.prices.size());
  cost.assign(np, 0.0);
  feasible.assign(np, 1);

  if (priced_node < 1 || priced_node > net.node_count) {
    throw_error(errc::config_error,
                "priced node " + std::to_string(priced_node) +
                    " outside network");
  }

  // Deterministic background rows shared by all evaluations.
  std::vector<nodal_load_model> base(net.node_count);
  const int slots = static_cast<int>(table.prices.front().price.size());
  for (int k = 1; k <= net.node_count; ++k) {
    nodal_load_model& m = base[k - 1];
    m.mean_p.assign(slots, 0.0);
    m.var_p.assign(slots, 0.0);
    if (!background.active.empty() && k != priced_node) {
      m.mean_p = background.active[k - 1];
    }
    if (!background.reactive.empty()) m.q_kvar = background.reactive[k - 1];
  }

#ifdef _OPENMP
#pragma omp parallel for schedule(static) if (parallel)
#endif
  for (int i = 0; i < np; ++i) {
    const price_signal& p = table.prices[i];
    const response_profile& prof = table.profiles[i];

    const load_moments m = expected_load(prof, objective_theta, p.price, noise);
    cost[i] = expected_cost(m, target.target);

    if (cfg.mode == constraint_mode::unconstrained) continue;

    std::vector<nodal_load_model> loads = base;
    bool ok = true;
    if (cfg.mode == constraint_mode::set_a) {
      loads[priced_node - 1] =
          physical_load_model(prof, objective_theta, p.price, noise);
      const constraint_probs probs =
          constraint_probability(net, loads, cfg.limits);
      ok = probs.min_sat() >= 1.0 - cfg.mu;
    } else {
      // Set B: every scalar constraint must hold at level 1-nu under the
      // belief mixture. Accumulate weighted per-candidate tails.
      std::vector<double> mix;
      for (std::size_t k = 0; k < belief.support.size(); ++k) {
        if (belief.weights[k] <= 0.0) continue;
        loads[priced_node - 1] =
            physical_load_model(prof, belief.support[k], p.price, noise);
        const constraint_probs probs =
            constraint_probability(net, loads, cfg.limits);
        if (mix.empty()) mix.assign(probs.sat.size(), 0.0);
        for (std::size_t j = 0; j < probs.sat.size(); ++j) {
          mix[j] += belief.weights[k] * probs.sat[j];
        }
      }
      for (double sj : mix) {
        if (!(sj >= 1.0 - cfg.nu)) {
          ok = false;
          break;
        }
      }
    }
    feasible[i] = ok ? 1 : 0;
  }

  (void)parallel;  // used only by the pragma when OpenMP is enabled
}

}  // namespace

selection_result select_price(const price_table& table,
                              const sensitivity_model& objective_theta,
                              const prior& belief, const target_profile& target,
                              const chance_config& cfg, const network& net,
                              int priced_node, const demand_schedule& background,
                              const noise_config& noise, bool parallel,
                              bool require_feasible) {
  std::vector<double> cost;
  std::vector<char> feasible;
  evaluate_prices(table, objective_theta, belief, target, cfg, net, priced_node,
                  background, noise, parallel, cost, feasible);

  // Serial argmin over the feasible set in table order: deterministic
  // tie-break toward the lowest price id regardless of thread count.
  selection_result res;
  for (int i = 0; i < static_cast<int>(table.prices.size()); ++i) {
    if (!feasible[i]) continue;
    if (res.price_index < 0 || cost[i] < res.objective) {
      res.price_index = i;
      res.objective = cost[i];
    }
  }
  if (res.price_index < 0) {
    if (require_feasible) {
      throw_error(errc::no_feasible_price,
                  "no price passes the constraint filter for target " +
                      std::to_string(target.id));
    }
    res.price_index = table.fallback_index();
    res.fallback = true;
    res.objective = cost[res.price_index];
  }
  return res;
}

selection_result clairvoyant_price(const price_table& table,
                                   const sensitivity_model& theta_star,
                                   const target_profile& target,
                                   const chance_config& cfg, const network& net,
                                   int priced_node,
                                   const demand_schedule& background,
                                   const noise_config& noise, bool parallel) {
  chance_config oracle_cfg = cfg;
  oracle_cfg.mode = constraint_mode::set_a;  // true-model chance constraints
  prior degenerate;
  degenerate.support = {theta_star};
  degenerate.weights = {1.0};
  return select_price(table, theta_star, degenerate, target, oracle_cfg, net,
                      priced_node, background, noise, parallel);
}

std::vector<selection_result> select_prices_multinode(
    const price_table& table, const std::vector<populated_node>& nodes,
    const chance_config& cfg, const network& net, const noise_config& noise) {
  const int slots =
      table.prices.empty() ? 0 : static_cast<int>(table.prices.front().price.size());
  std::vector<int> current(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    current[j] = nodes[j].previous_price_index >= 0
                     ? nodes[j].previous_price_index
                     : table.fallback_index();
  }

  std::vector<selection_result> results(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    // Other populated nodes enter as deterministic background at the mean of
    // their most recent selection under their own objective candidate.
    demand_schedule background;
    background.slots = slots;
    background.active.assign(net.node_count, std::vector<double>(slots, 0.0));
    for (std::size_t o = 0; o < nodes.size(); ++o) {
      if (o == j) continue;
      const int idx = current[o];
      const nodal_load_model m =
          physical_load_model(table.profiles[idx], *nodes[o].objective_theta,
                              table.prices[idx].price, noise);
      background.active[nodes[o].node - 1] = m.mean_p;
    }
    results[j] = select_price(table, *nodes[j].objective_theta,
                              *nodes[j].belief, *nodes[j].target, cfg, net,
                              nodes[j].node, background, noise);
    current[j] = results[j].price_index;
  }
  return results;
}

}  // namespace rtpsim
