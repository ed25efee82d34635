#pragma once

#include <string>
#include <vector>

#include "rtpsim/bandit.hpp"
#include "rtpsim/grid.hpp"
#include "rtpsim/population.hpp"

namespace rtpsim {

struct price_signal {
  int id = 0;
  std::vector<double> price;  // $/kWh per slot, strictly positive
};

struct target_profile {
  int id = 0;
  std::vector<double> target;  // kW per slot
};

std::vector<price_signal> load_prices(const csv_document& doc,
                                      const std::string& origin);
std::vector<price_signal> load_prices_file(const std::string& path);
std::vector<target_profile> load_targets(const csv_document& doc,
                                         const std::string& origin);
std::vector<target_profile> load_targets_file(const std::string& path);

enum class constraint_mode { set_a, set_b, unconstrained };

struct chance_config {
  constraint_mode mode = constraint_mode::set_a;
  double mu = 0.1;  // violation budget under a fixed candidate (Set A)
  double nu = 0.1;  // violation budget under the belief mixture (Set B)
  constraint_limits limits;
};

// Candidate price set with per-price response profiles precomputed once; the
// daily loop and the enumeration kernel index into it.
struct price_table {
  double dt_hours = 0.0;
  std::vector<price_signal> prices;
  std::vector<response_profile> profiles;

  static price_table build(std::vector<price_signal> prices,
                           const std::vector<cluster_spec>& specs,
                           double dt_hours);
  // Fallback broadcast: the price with the largest slot sum (lowest id on
  // ties) — the demand-minimizing action in this response model.
  int fallback_index() const;
};

// Expected squared tracking error: sum_t (mean(t)-V(t))^2 + sum_t var(t).
double expected_cost(const load_moments& m, const std::vector<double>& target);
double expected_cost(const sensitivity_model& theta,
                     const std::vector<double>& price,
                     const target_profile& target,
                     const std::vector<cluster_spec>& specs, double dt_hours,
                     const noise_config& noise);

// One node's stochastic active load (slotwise-independent Gaussian) plus
// deterministic reactive demand; variance zero means a fixed background load.
struct nodal_load_model {
  std::vector<double> mean_p;  // kW per slot
  std::vector<double> var_p;   // kW^2 per slot
  std::vector<double> q_kvar;  // kvar per slot, deterministic (empty = zero)
};

// Per-scalar-constraint satisfaction probabilities, exact Gaussian tails via
// the affine LinDistFlow map. Order: per line, flow limit per slot; then per
// node, lower and upper voltage bounds per slot.
struct constraint_probs {
  std::vector<double> sat;
  double min_sat() const;
};

constraint_probs constraint_probability(const network& net,
                                        const std::vector<nodal_load_model>& loads,
                                        const constraint_limits& limits);

// Monte Carlo estimate of the same probabilities (untruncated Gaussian loads,
// matching the analytic model). Deterministic for fixed (seed, n_samples)
// regardless of thread count: sample s is a pure function of the counter
// block s, and the tallies are integer sums.
constraint_probs mc_constraint_probability(const network& net,
                                           const std::vector<nodal_load_model>& loads,
                                           const constraint_limits& limits,
                                           int n_samples, std::uint64_t seed);

// Physical-load moments (no metering noise) for the priced node under theta.
nodal_load_model physical_load_model(const response_profile& profile,
                                     const sensitivity_model& theta,
                                     const std::vector<double>& price,
                                     const noise_config& noise);

struct selection_result {
  int price_index = -1;   // position in the price table
  bool fallback = false;  // no price passed the filter; fallback broadcast
  double objective = 0.0; // expected cost of the returned price under the
                          // objective belief (the sampled candidate)
};

// Daily constrained selection over the price table. The objective is the
// expected cost under `objective_theta` (the sampled candidate, or the true
// model for the clairvoyant). The feasibility filter depends on cfg.mode:
//   set_a          every constraint holds w.p. >= 1-mu under objective_theta
//   set_b          every constraint holds w.p. >= 1-nu under the belief
//                  mixture (weights of `belief`)
//   unconstrained  no filter
// `background` gives other nodes' deterministic demands (kW/kvar rows sized
// node_count x slots; the priced node's row is ignored). Ties break toward the
// lowest price id. When nothing is feasible the fallback price is returned
// with fallback=true (or NoFeasiblePrice is thrown if require_feasible).
selection_result select_price(const price_table& table,
                              const sensitivity_model& objective_theta,
                              const prior& belief, const target_profile& target,
                              const chance_config& cfg, const network& net,
                              int priced_node, const demand_schedule& background,
                              const noise_config& noise,
                              bool parallel = true,
                              bool require_feasible = false);

// Constrained optimum under the true model (degenerate belief at theta_star,
// Set A semantics at level 1-mu).
selection_result clairvoyant_price(const price_table& table,
                                   const sensitivity_model& theta_star,
                                   const target_profile& target,
                                   const chance_config& cfg, const network& net,
                                   int priced_node,
                                   const demand_schedule& background,
                                   const noise_config& noise,
                                   bool parallel = true);

// Coordinate pass for several populated nodes sharing one feeder: nodes are
// priced in index order, each seeing the others at their most recent
// selection (today's for nodes already priced this round, the supplied
// previous selection otherwise). Returns one selection per populated node.
struct populated_node {
  int node = 0;
  const target_profile* target = nullptr;
  const sensitivity_model* objective_theta = nullptr;
  const prior* belief = nullptr;
  int previous_price_index = -1;  // fallback index used when < 0
};

std::vector<selection_result> select_prices_multinode(
    const price_table& table, const std::vector<populated_node>& nodes,
    const chance_config& cfg, const network& net, const noise_config& noise);

}  // namespace rtpsim
