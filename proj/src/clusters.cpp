#include "rtpsim/clusters.hpp"

#include <algorithm>
#include <numeric>

#include "rtpsim/errors.hpp"

namespace rtpsim {

void cluster_spec::validate(int slots, double dt_hours) const {
  const std::string who = "cluster " + std::to_string(id);
  if (beta < 0.0) {
    throw_error(errc::infeasible_spec, who + ": beta must be >= 0");
  }
  if (kind == cluster_kind::interruptible) {
    if (t1 < 1 || t2 < t1 || t2 > slots) {
      throw_error(errc::infeasible_spec,
                  who + ": window must satisfy 1 <= t1 <= t2 <= slots");
    }
    if (energy_kwh < 0.0) {
      throw_error(errc::infeasible_spec, who + ": energy must be >= 0");
    }
    if (energy_kwh > 0.0 && power_cap_kw <= 0.0) {
      throw_error(errc::infeasible_spec,
                  who + ": positive energy requires a positive power cap");
    }
    const double window_hours = dt_hours * (t2 - t1 + 1);
    if (energy_kwh > power_cap_kw * window_hours * (1.0 + 1e-12)) {
      throw_error(errc::infeasible_spec,
                  who + ": window cannot hold the energy at the power cap");
    }
  } else {
    if (pulse_kw.empty()) {
      throw_error(errc::infeasible_spec, who + ": empty pulse");
    }
    for (double v : pulse_kw) {
      if (v < 0.0) {
        throw_error(errc::infeasible_spec, who + ": pulse entries must be >= 0");
      }
    }
    const int len = static_cast<int>(pulse_kw.size());
    if (t1 < 1 || t2 < t1 || t2 + len - 1 > slots) {
      throw_error(errc::infeasible_spec,
                  who + ": some shift places the pulse outside the horizon");
    }
  }
}

std::vector<double> min_cost_profile(const cluster_spec& spec,
                                     const std::vector<double>& price,
                                     double dt_hours) {
  const int slots = static_cast<int>(price.size());
  spec.validate(slots, dt_hours);
  std::vector<double> out(slots, 0.0);

  if (spec.kind == cluster_kind::interruptible) {
    if (spec.energy_kwh <= 0.0) return out;
    // Fractional-knapsack structure: order in-window slots by price (earliest
    // slot first on ties), fill each at the cap until the budget is spent.
    std::vector<int> order;
    for (int t = spec.t1; t <= spec.t2; ++t) order.push_back(t - 1);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return price[a] < price[b]; });
    double remaining = spec.energy_kwh;
    for (int t : order) {
      if (remaining <= 0.0) break;
      const double take_kw = std::min(spec.power_cap_kw, remaining / dt_hours);
      out[t] = take_kw;
      remaining -= take_kw * dt_hours;
    }
    return out;
  }

  // Uninterruptible: evaluate every admissible shift, keep the cheapest
  // (earliest shift wins ties).
  const int len = static_cast<int>(spec.pulse_kw.size());
  int best_shift = spec.t1;
  double best_cost = 0.0;
  for (int s = spec.t1; s <= spec.t2; ++s) {
    double cost = 0.0;
    for (int k = 0; k < len; ++k) cost += price[s - 1 + k] * spec.pulse_kw[k];
    if (s == spec.t1 || cost < best_cost) {
      best_cost = cost;
      best_shift = s;
    }
  }
  for (int k = 0; k < len; ++k) out[best_shift - 1 + k] = spec.pulse_kw[k];
  return out;
}

std::vector<double> aggregate_profile(const std::vector<cluster_spec>& specs,
                                      const std::vector<double>& counts,
                                      const std::vector<double>& price,
                                      double dt_hours) {
  if (specs.size() != counts.size()) {
    throw_error(errc::length_mismatch,
                "counts length does not match cluster count");
  }
  std::vector<double> total(price.size(), 0.0);
  for (std::size_t c = 0; c < specs.size(); ++c) {
    if (counts[c] == 0.0) continue;
    const std::vector<double> prof = min_cost_profile(specs[c], price, dt_hours);
    for (std::size_t t = 0; t < total.size(); ++t) {
      total[t] += counts[c] * prof[t];
    }
  }
  return total;
}

std::vector<cluster_spec> load_clusters(const csv_document& doc,
                                        const std::string& origin) {
  const auto& header = doc.rows.front();
  if (header.empty() || header[0] != "cluster_id") {
    throw_error(errc::parse_error,
                origin + ": expected header starting with 'cluster_id'");
  }
  std::vector<cluster_spec> specs;
  for (std::size_t r = 1; r < doc.rows.size(); ++r) {
    const auto& row = doc.rows[r];
    const std::string ctx = origin + " row " + std::to_string(r + 1);
    if (row.size() != 7) {
      throw_error(errc::parse_error, ctx + ": expected 7 columns");
    }
    cluster_spec spec;
    spec.id = static_cast<int>(cell_as_long(row[0], ctx + " cluster_id"));
    if (row[1] == "interruptible") {
      spec.kind = cluster_kind::interruptible;
      spec.energy_kwh = cell_as_double(row[4], ctx + " E_kWh");
      spec.power_cap_kw = cell_as_double(row[5], ctx + " rho_kW");
    } else if (row[1] == "uninterruptible") {
      spec.kind = cluster_kind::uninterruptible;
      // The energy column carries the pulse as '|'-separated kW values.
      const std::string& cell = row[4];
      std::size_t start = 0;
      for (;;) {
        std::size_t bar = cell.find('|', start);
        const std::string piece = cell.substr(
            start, bar == std::string::npos ? std::string::npos : bar - start);
        spec.pulse_kw.push_back(cell_as_double(piece, ctx + " pulse"));
        if (bar == std::string::npos) break;
        start = bar + 1;
      }
    } else {
      throw_error(errc::parse_error, ctx + ": unknown kind '" + row[1] + "'");
    }
    spec.t1 = static_cast<int>(cell_as_long(row[2], ctx + " t1"));
    spec.t2 = static_cast<int>(cell_as_long(row[3], ctx + " t2"));
    spec.beta = cell_as_double(row[6], ctx + " beta");
    specs.push_back(std::move(spec));
  }
  return specs;
}

std::vector<cluster_spec> load_clusters_file(const std::string& path) {
  return load_clusters(read_csv_file(path), path);
}

}  // namespace rtpsim
