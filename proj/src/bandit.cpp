#include "rtpsim/bandit.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "rtpsim/errors.hpp"

namespace rtpsim {

namespace {
constexpr double kLog2Pi = 1.8378770664093454836;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();
}  // namespace

prior init_prior(std::vector<sensitivity_model> support,
                 std::optional<std::vector<double>> weights) {
  if (support.empty()) {
    throw_error(errc::empty_support, "prior needs at least one candidate");
  }
  prior pi;
  if (weights) {
    if (weights->size() != support.size()) {
      throw_error(errc::non_simplex_weights,
                  "weight count does not match support size");
    }
    double sum = 0.0;
    for (double w : *weights) {
      if (w < 0.0) {
        throw_error(errc::non_simplex_weights, "negative weight");
      }
      sum += w;
    }
    if (std::fabs(sum - 1.0) > 1e-12) {
      throw_error(errc::non_simplex_weights,
                  "weights sum to " + std::to_string(sum));
    }
    pi.weights = std::move(*weights);
  } else {
    pi.weights.assign(support.size(), 1.0 / static_cast<double>(support.size()));
  }
  pi.support = std::move(support);
  return pi;
}

int sample_index(const prior& pi, counter_rng& rng) {
  const double u = rng.uniform();
  double cum = 0.0;
  const int n = static_cast<int>(pi.weights.size());
  for (int k = 0; k < n; ++k) {
    cum += pi.weights[k];
    if (u < cum) return k;
  }
  return n - 1;  // u landed in the rounding slack past the last cumulative sum
}

int map_index(const prior& pi) {
  int best = 0;
  for (int k = 1; k < static_cast<int>(pi.weights.size()); ++k) {
    if (pi.weights[k] > pi.weights[best]) best = k;
  }
  return best;
}

double log_likelihood(const std::vector<double>& observation,
                      const response_profile& profile,
                      const sensitivity_model& theta,
                      const std::vector<double>& price,
                      const noise_config& noise) {
  const load_moments m = expected_load(profile, theta, price, noise);
  if (observation.size() != m.mean.size()) {
    throw_error(errc::dimension_mismatch, "observation length != slots");
  }
  double ll = 0.0;
  for (std::size_t t = 0; t < observation.size(); ++t) {
    const double diff = observation[t] - m.mean[t];
    const double v = m.var[t];
    if (v <= 0.0) {
      // Deterministic slot: a point mass. Match contributes nothing; any
      // mismatch is impossible under this candidate.
      if (std::fabs(diff) > 1e-9 * (1.0 + std::fabs(m.mean[t]))) return kNegInf;
      continue;
    }
    ll += -0.5 * (kLog2Pi + std::log(v)) - diff * diff / (2.0 * v);
  }
  return ll;
}

double log_likelihood(const std::vector<double>& observation,
                      const std::vector<double>& price,
                      const sensitivity_model& theta,
                      const std::vector<cluster_spec>& specs, double dt_hours,
                      const noise_config& noise) {
  return log_likelihood(observation,
                        build_response_profile(specs, price, dt_hours), theta,
                        price, noise);
}

prior posterior_update(const prior& pi, const std::vector<double>& observation,
                       const response_profile& profile,
                       const std::vector<double>& price,
                       const noise_config& noise) {
  const int n = static_cast<int>(pi.support.size());
  std::vector<double> ll(n, kNegInf);
  double max_ll = kNegInf;
  for (int k = 0; k < n; ++k) {
    if (pi.weights[k] <= 0.0) continue;  // null support stays null
    ll[k] = log_likelihood(observation, profile, pi.support[k], price, noise);
    max_ll = std::max(max_ll, ll[k]);
  }
  if (max_ll == kNegInf) {
    throw_error(errc::all_zero_likelihood,
                "every positive-weight candidate has zero density");
  }
  prior out;
  out.support = pi.support;
  out.weights.assign(n, 0.0);
  double norm = 0.0;
  for (int k = 0; k < n; ++k) {
    if (pi.weights[k] <= 0.0 || ll[k] == kNegInf) continue;
    out.weights[k] = pi.weights[k] * std::exp(ll[k] - max_ll);
    norm += out.weights[k];
  }
  if (norm <= 0.0) {
    throw_error(errc::all_zero_likelihood, "posterior normalizer underflowed");
  }
  for (double& w : out.weights) w /= norm;
  return out;
}

prior posterior_update(const prior& pi, const std::vector<double>& observation,
                       const std::vector<double>& price,
                       const std::vector<cluster_spec>& specs, double dt_hours,
                       const noise_config& noise) {
  return posterior_update(pi, observation,
                          build_response_profile(specs, price, dt_hours), price,
                          noise);
}

double min_mass_bound(double prior_mass_on_true, double lambda,
                      int price_count) {
  return prior_mass_on_true * std::exp(-lambda * static_cast<double>(price_count));
}

}  // namespace rtpsim
