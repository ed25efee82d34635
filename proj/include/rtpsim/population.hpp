#pragma once

#include <string>
#include <vector>

#include "rtpsim/clusters.hpp"
#include "rtpsim/csv.hpp"
#include "rtpsim/rng.hpp"

namespace rtpsim {

// A candidate price-sensitivity vector: the population's mean participation in
// cluster c under price p is beta_c / (theta . p).
struct sensitivity_model {
  int id = 0;
  std::vector<double> theta;
};

struct noise_config {
  double sigma = 0.5;            // std of each cluster's participation count
  double sigma_obs = 0.0;        // per-slot additive observation noise, kW
  bool truncate_at_zero = true;  // simulator clamps negative counts
};

// theta . p; throws NonPositiveInnerProduct when not strictly positive.
double sensitivity_inner_product(const sensitivity_model& theta,
                                 const std::vector<double>& price);

// Everything about one price that does not depend on theta: the per-cluster
// min-cost schedules and the two slotwise aggregates used by the Gaussian
// observation model. Computing these once per price keeps candidate
// evaluation O(T) and, crucially, makes every candidate's moments share the
// exact same floating-point inputs.
struct response_profile {
  std::vector<std::vector<double>> schedules;  // [cluster][slot], kW
  std::vector<double> beta_weighted;           // B(t) = sum_c beta_c * d_c(t)
  std::vector<double> square_sum;              // S(t) = sum_c d_c(t)^2
};

response_profile build_response_profile(const std::vector<cluster_spec>& specs,
                                        const std::vector<double>& price,
                                        double dt_hours);

struct load_moments {
  std::vector<double> mean;  // kW per slot
  std::vector<double> var;   // kW^2 per slot
};

// Untruncated Gaussian moments of the aggregate load:
//   mean(t) = B(t) / (theta . p)
//   var(t)  = sigma^2 * S(t) + sigma_obs^2
load_moments expected_load(const response_profile& profile,
                           const sensitivity_model& theta,
                           const std::vector<double>& price,
                           const noise_config& noise);

// Convenience overload that builds the profile internally.
load_moments expected_load(const sensitivity_model& theta,
                           const std::vector<double>& price,
                           const std::vector<cluster_spec>& specs,
                           double dt_hours, const noise_config& noise);

// Per-cluster participation counts a_c ~ Normal(beta_c/(theta.p), sigma^2),
// clamped at zero when configured. One normal draw per cluster, in cluster
// order, so paired runs consume identical environment randomness.
std::vector<double> sample_adjustments(const sensitivity_model& theta,
                                       const std::vector<double>& price,
                                       const std::vector<cluster_spec>& specs,
                                       const noise_config& noise,
                                       counter_rng& rng);

// Realized daily observation: Y(t) = sum_c a_c d_c(t) + obs noise, clamped at
// zero entrywise. `obs_rng` supplies the per-slot observation noise separately
// from the preference stream.
std::vector<double> realize_load(const sensitivity_model& theta,
                                 const std::vector<double>& price,
                                 const std::vector<cluster_spec>& specs,
                                 double dt_hours, const noise_config& noise,
                                 counter_rng& pref_rng, counter_rng& obs_rng);

// Cached-profile variant used by the daily loop.
std::vector<double> realize_load(const response_profile& profile,
                                 const sensitivity_model& theta,
                                 const std::vector<double>& price,
                                 const std::vector<cluster_spec>& specs,
                                 const noise_config& noise,
                                 counter_rng& pref_rng, counter_rng& obs_rng);

std::vector<sensitivity_model> load_thetas(const csv_document& doc,
                                           const std::string& origin);
std::vector<sensitivity_model> load_thetas_file(const std::string& path);

}  // namespace rtpsim
