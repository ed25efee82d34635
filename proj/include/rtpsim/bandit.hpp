#pragma once

#include <optional>
#include <vector>

#include "rtpsim/population.hpp"
#include "rtpsim/rng.hpp"

namespace rtpsim {

// Discrete belief over a finite candidate set. Immutable value type: updates
// return new priors. Candidate order is the support order; ties (bitwise-equal
// weights) always resolve toward the earliest entry, which makes mode lookups
// deterministic.
struct prior {
  std::vector<sensitivity_model> support;
  std::vector<double> weights;
};

// Uniform weights when none are given. Throws EmptySupport / NonSimplexWeights.
prior init_prior(std::vector<sensitivity_model> support,
                 std::optional<std::vector<double>> weights = std::nullopt);

// Index drawn with probability weights[k] (CDF walk in support order).
int sample_index(const prior& pi, counter_rng& rng);

// Index of the largest weight; earliest entry wins exact ties.
int map_index(const prior& pi);

// Sum of log Normal(Y(t); mean(t), var(t)) over slots, with moments from the
// candidate's untruncated observation model. A zero-variance slot contributes
// 0 when the observation matches the deterministic mean (relative tolerance
// 1e-9) and -inf otherwise.
double log_likelihood(const std::vector<double>& observation,
                      const response_profile& profile,
                      const sensitivity_model& theta,
                      const std::vector<double>& price,
                      const noise_config& noise);

double log_likelihood(const std::vector<double>& observation,
                      const std::vector<double>& price,
                      const sensitivity_model& theta,
                      const std::vector<cluster_spec>& specs, double dt_hours,
                      const noise_config& noise);

// Exact Bayes step in log domain with max-shift normalization:
//   w'_k proportional to w_k * exp(loglik_k).
// Zero-weight candidates stay at zero. Throws AllZeroLikelihood when every
// positive-weight candidate underflows to zero density.
prior posterior_update(const prior& pi, const std::vector<double>& observation,
                       const std::vector<double>& price,
                       const std::vector<cluster_spec>& specs, double dt_hours,
                       const noise_config& noise);

// Cached-profile variant.
prior posterior_update(const prior& pi, const std::vector<double>& observation,
                       const response_profile& profile,
                       const std::vector<double>& price,
                       const noise_config& noise);

// Worst-case floor on the belief mass of the true candidate after any single
// day: initial mass times exp(-lambda * |price set|).
double min_mass_bound(double prior_mass_on_true, double lambda,
                      int price_count);

}  // namespace rtpsim
