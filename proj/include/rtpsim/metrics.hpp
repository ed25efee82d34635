#pragma once

#include <string>
#include <vector>

#include "rtpsim/clusters.hpp"
#include "rtpsim/population.hpp"

namespace rtpsim {

// One day's full transcript of the learning loop.
struct day_record {
  int day = 0;  // 1-based, strictly increasing within a run
  int target_id = 0;
  int sampled_theta_id = -1;  // -1 when the policy drew no candidate that day
  int chosen_price_id = 0;
  int optimal_price_id = 0;  // constrained optimum under the day's true model
  bool fallback = false;     // no feasible price; fallback broadcast
  double realized_cost = 0.0;               // |D - V|^2 of the physical load
  double chosen_expected_cost_true = 0.0;   // chosen price, true-model expectation
  double clairvoyant_expected_cost = 0.0;   // optimal price, true-model expectation
  double posterior_mass_true = 0.0;         // after the day's update
  double true_violation_prob = 0.0;  // max over constraints of 1 - sat, true model
  int violation_flow = 0;            // realized flow-limit violations (line-slots)
  int violation_voltage_low = 0;
  int violation_voltage_high = 0;

  int violations_total() const {
    return violation_flow + violation_voltage_low + violation_voltage_high;
  }
};

// Throws IncompleteRecord unless days run 1..n with nonnegative costs.
void validate_records(const std::vector<day_record>& records);

// Instantaneous expected-cost gaps and their running sum. Gaps use expected
// costs under the true model, so the series is nondecreasing whenever the
// recorded optimum is cost-minimal among the prices the run could choose.
struct regret_series {
  std::vector<double> instant;
  std::vector<double> cumulative;
};
regret_series cumulative_regret(const std::vector<day_record>& records);

// Running count of days whose chosen price differs from the recorded optimum.
std::vector<long> suboptimal_count(const std::vector<day_record>& records);

// KL divergence between the slotwise-independent Gaussian observation models
// of two candidates at one price, in nats. Infinite when a deterministic slot
// separates them.
double kl_marginal(const sensitivity_model& theta_a,
                   const sensitivity_model& theta_b,
                   const std::vector<double>& price,
                   const std::vector<cluster_spec>& specs, double dt_hours,
                   const noise_config& noise);

struct violation_totals {
  long flow = 0;
  long voltage_low = 0;
  long voltage_high = 0;
  long violating_days = 0;  // days with at least one realized violation
  long total() const { return flow + voltage_low + voltage_high; }
};
violation_totals violation_summary(const std::vector<day_record>& records);

// CSV emitters (shortest-round-trip number formatting, byte-stable output).
void write_regret_csv(const std::string& path,
                      const std::vector<day_record>& records);
void write_suboptimal_csv(const std::string& path,
                          const std::vector<day_record>& records);
void write_violations_csv(const std::string& path,
                          const std::vector<day_record>& records);
void write_posterior_csv(const std::string& path,
                         const std::vector<int>& theta_ids,
                         const std::vector<std::vector<double>>& daily_weights);
void write_days_csv(const std::string& path,
                    const std::vector<day_record>& records);

}  // namespace rtpsim
