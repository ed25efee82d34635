#pragma once

#include <string>
#include <vector>

#include "rtpsim/csv.hpp"

namespace rtpsim {

enum class cluster_kind { interruptible, uninterruptible };

// One flexibility cluster: either an energy budget that may be spread freely
// over a window subject to a power cap (interruptible), or a fixed pulse that
// may slide within a shift window (uninterruptible). `beta` scales how many
// appliances of this cluster participate on average.
struct cluster_spec {
  int id = 0;
  cluster_kind kind = cluster_kind::interruptible;
  int t1 = 1;  // 1-based inclusive window start (consumption or shift window)
  int t2 = 1;  // 1-based inclusive window end
  double energy_kwh = 0.0;         // interruptible only
  double power_cap_kw = 0.0;       // interruptible only
  std::vector<double> pulse_kw;    // uninterruptible only, offset 0 at shift slot
  double beta = 0.0;

  // Throws InfeasibleSpec / LengthMismatch when the spec cannot produce any
  // feasible schedule on a horizon of `slots` slots of `dt_hours` each.
  void validate(int slots, double dt_hours) const;
};

// Cheapest feasible daily schedule for a posted price (kW per slot).
// Interruptible: greedy fill of the cheapest in-window slots at the power cap
// (ties resolved toward the earliest slot). Uninterruptible: cheapest shift
// (ties resolved toward the earliest shift). Deterministic by construction.
std::vector<double> min_cost_profile(const cluster_spec& spec,
                                     const std::vector<double>& price,
                                     double dt_hours);

// Weighted aggregate response: sum_c counts[c] * min_cost_profile(c, price).
std::vector<double> aggregate_profile(const std::vector<cluster_spec>& specs,
                                      const std::vector<double>& counts,
                                      const std::vector<double>& price,
                                      double dt_hours);

std::vector<cluster_spec> load_clusters(const csv_document& doc,
                                        const std::string& origin);
std::vector<cluster_spec> load_clusters_file(const std::string& path);

}  // namespace rtpsim
