#pragma once
// Reference implementations for the per-cluster scheduling problem, shared by
// the unit and acceptance suites. Deliberately independent of the library
// code paths: the interruptible case is solved as a fractional knapsack over
// explicitly sorted (price, slot) pairs, the shiftable case by enumerating
// every feasible shift.

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <vector>

#include "rtpsim/clusters.hpp"
#include "rtpsim/rng.hpp"

namespace testsupport {

inline std::vector<double> oracle_profile(const rtpsim::cluster_spec& spec,
                                          const std::vector<double>& price,
                                          double dt_hours) {
  const int slots = static_cast<int>(price.size());
  std::vector<double> out(static_cast<std::size_t>(slots), 0.0);
  if (spec.kind == rtpsim::cluster_kind::interruptible) {
    std::vector<int> order;
    for (int t = spec.t1; t <= spec.t2; ++t) order.push_back(t - 1);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return price[static_cast<std::size_t>(a)] <
             price[static_cast<std::size_t>(b)];
    });  // stable: equal prices keep slot order, i.e. earliest first
    double remaining = spec.energy_kwh;
    for (int t : order) {
      if (remaining <= 0.0) break;
      const double take = std::min(remaining, spec.power_cap_kw * dt_hours);
      out[static_cast<std::size_t>(t)] = take / dt_hours;
      remaining -= take;
    }
    return out;
  }
  // Shiftable pulse: start positions run over [t1, t2]; the pulse may extend
  // past t2 but never past the horizon (validate guarantees that).
  const int len = static_cast<int>(spec.pulse_kw.size());
  int best_shift = -1;
  double best_cost = 0.0;
  for (int s = spec.t1; s <= spec.t2; ++s) {
    double cost = 0.0;
    for (int k = 0; k < len; ++k)
      cost += spec.pulse_kw[static_cast<std::size_t>(k)] *
              price[static_cast<std::size_t>(s - 1 + k)] * dt_hours;
    if (best_shift < 0 || cost < best_cost) {  // strict: earliest shift wins ties
      best_shift = s;
      best_cost = cost;
    }
  }
  for (int k = 0; k < len; ++k)
    out[static_cast<std::size_t>(best_shift - 1 + k)] =
        spec.pulse_kw[static_cast<std::size_t>(k)];
  return out;
}

inline double profile_cost(const std::vector<double>& profile,
                           const std::vector<double>& price, double dt_hours) {
  double c = 0.0;
  for (std::size_t t = 0; t < profile.size(); ++t)
    c += profile[t] * price[t] * dt_hours;
  return c;
}

// Random feasible cluster spec on `slots` slots of `dt_hours` each.
inline rtpsim::cluster_spec random_cluster(rtpsim::counter_rng& rng, int slots,
                                           double dt_hours) {
  rtpsim::cluster_spec spec;
  spec.id = 1;
  spec.beta = 1.0 + 20.0 * rng.uniform();
  const int a = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(slots)));
  const int b = 1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(slots)));
  spec.t1 = std::min(a, b);
  spec.t2 = std::max(a, b);
  if (rng.uniform() < 0.5) {
    spec.kind = rtpsim::cluster_kind::interruptible;
    spec.power_cap_kw = 0.5 + 10.0 * rng.uniform();
    const double window_kwh =
        spec.power_cap_kw * dt_hours * (spec.t2 - spec.t1 + 1);
    spec.energy_kwh = window_kwh * (0.05 + 0.9 * rng.uniform());
  } else {
    spec.kind = rtpsim::cluster_kind::uninterruptible;
    // Every start in [t1, t2] must keep the pulse inside the horizon.
    const int len_max = slots - spec.t2 + 1;
    const int len =
        1 + static_cast<int>(rng.index(static_cast<std::uint64_t>(len_max)));
    for (int k = 0; k < len; ++k)
      spec.pulse_kw.push_back(0.1 + 8.0 * rng.uniform());
  }
  return spec;
}

inline std::vector<double> random_price(rtpsim::counter_rng& rng, int slots,
                                        bool with_ties) {
  std::vector<double> p;
  for (int t = 0; t < slots; ++t) {
    double v = 0.05 + 0.95 * rng.uniform();
    if (with_ties) v = (1.0 + rng.index(4)) * 0.125;  // coarse grid forces ties
    p.push_back(v);
  }
  return p;
}

}  // namespace testsupport
