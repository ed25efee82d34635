#include "rtpsim/population.hpp"

#include <algorithm>
#include <cmath>

#include "rtpsim/errors.hpp"

namespace rtpsim {

double sensitivity_inner_product(const sensitivity_model& theta,
                                 const std::vector<double>& price) {
  if (theta.theta.size() != price.size()) {
    throw_error(errc::dimension_mismatch,
                "theta length != price length");
  }
  double s = 0.0;
  for (std::size_t t = 0; t < price.size(); ++t) s += theta.theta[t] * price[t];
  if (!(s > 0.0)) {
    throw_error(errc::non_positive_inner_product,
                "theta . p = " + std::to_string(s) + " for theta id " +
                    std::to_string(theta.id));
  }
  return s;
}

response_profile build_response_profile(const std::vector<cluster_spec>& specs,
                                        const std::vector<double>& price,
                                        double dt_hours) {
  response_profile rp;
  const std::size_t slots = price.size();
  rp.beta_weighted.assign(slots, 0.0);
  rp.square_sum.assign(slots, 0.0);
  rp.schedules.reserve(specs.size());
  for (const cluster_spec& spec : specs) {
    std::vector<double> sched = min_cost_profile(spec, price, dt_hours);
    for (std::size_t t = 0; t < slots; ++t) {
      rp.beta_weighted[t] += spec.beta * sched[t];
      rp.square_sum[t] += sched[t] * sched[t];
    }
    rp.schedules.push_back(std::move(sched));
  }
  return rp;
}

load_moments expected_load(const response_profile& profile,
                           const sensitivity_model& theta,
                           const std::vector<double>& price,
                           const noise_config& noise) {
  const double s = sensitivity_inner_product(theta, price);
  const std::size_t slots = price.size();
  load_moments m;
  m.mean.resize(slots);
  m.var.resize(slots);
  const double obs_var = noise.sigma_obs * noise.sigma_obs;
  const double pref_var = noise.sigma * noise.sigma;
  for (std::size_t t = 0; t < slots; ++t) {
    m.mean[t] = profile.beta_weighted[t] / s;
    m.var[t] = pref_var * profile.square_sum[t] + obs_var;
  }
  return m;
}

load_moments expected_load(const sensitivity_model& theta,
                           const std::vector<double>& price,
                           const std::vector<cluster_spec>& specs,
                           double dt_hours, const noise_config& noise) {
  return expected_load(build_response_profile(specs, price, dt_hours), theta,
                       price, noise);
}

std::vector<double> sample_adjustments(const sensitivity_model& theta,
                                       const std::vector<double>& price,
                                       const std::vector<cluster_spec>& specs,
                                       const noise_config& noise,
                                       counter_rng& rng) {
  const double s = sensitivity_inner_product(theta, price);
  std::vector<double> a(specs.size());
  for (std::size_t c = 0; c < specs.size(); ++c) {
    double v = specs[c].beta / s + noise.sigma * rng.normal();
    if (noise.truncate_at_zero && v < 0.0) v = 0.0;
    a[c] = v;
  }
  return a;
}

std::vector<double> realize_load(const response_profile& profile,
                                 const sensitivity_model& theta,
                                 const std::vector<double>& price,
                                 const std::vector<cluster_spec>& specs,
                                 const noise_config& noise,
                                 counter_rng& pref_rng, counter_rng& obs_rng) {
  const std::vector<double> a =
      sample_adjustments(theta, price, specs, noise, pref_rng);
  const std::size_t slots = price.size();
  std::vector<double> y(slots, 0.0);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    for (std::size_t t = 0; t < slots; ++t) {
      y[t] += a[c] * profile.schedules[c][t];
    }
  }
  for (std::size_t t = 0; t < slots; ++t) {
    y[t] += noise.sigma_obs * obs_rng.normal();
    if (y[t] < 0.0) y[t] = 0.0;
  }
  return y;
}

std::vector<double> realize_load(const sensitivity_model& theta,
                                 const std::vector<double>& price,
                                 const std::vector<cluster_spec>& specs,
                                 double dt_hours, const noise_config& noise,
                                 counter_rng& pref_rng, counter_rng& obs_rng) {
  return realize_load(build_response_profile(specs, price, dt_hours), theta,
                      price, specs, noise, pref_rng, obs_rng);
}

std::vector<sensitivity_model> load_thetas(const csv_document& doc,
                                           const std::string& origin) {
  const auto& header = doc.rows.front();
  if (header.size() < 2 || header[0] != "theta_id") {
    throw_error(errc::parse_error,
                origin + ": expected header starting with 'theta_id'");
  }
  const std::size_t slots = header.size() - 1;
  std::vector<sensitivity_model> out;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string ctx = origin + " row " + std::to_string(r + 1);
    if (row.size() != slots + 1) {
      throw_error(errc::parse_error, ctx + ": ragged row");
    }
    sensitivity_model m;
    m.id = static_cast<int>(cell_as_long(row[0], ctx + " theta_id"));
    for (std::size_t t = 1; t < row.size(); ++t) {
      const double v = cell_as_double(row[t], ctx);
      if (v <= 0.0) {
        throw_error(errc::parse_error, ctx + ": theta entries must be positive");
      }
      m.theta.push_back(v);
    }
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<sensitivity_model> load_thetas_file(const std::string& path) {
  return load_thetas(read_csv_file(path), path);
}

}  // namespace rtpsim
