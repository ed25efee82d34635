// Benchmark: the daily price-enumeration kernel, OpenMP-parallel vs the
// serial reference path. Both paths must return identical selections; the
// parallel path reduces per-price results deterministically, so this also
// serves as a quick consistency check on real-sized workloads.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "rtpsim/bandit.hpp"
#include "rtpsim/clusters.hpp"
#include "rtpsim/grid.hpp"
#include "rtpsim/population.hpp"
#include "rtpsim/pricer.hpp"
#include "rtpsim/rng.hpp"

namespace {

struct workload {
  rtpsim::network net;
  std::vector<rtpsim::cluster_spec> specs;
  rtpsim::price_table table;
  std::vector<rtpsim::sensitivity_model> thetas;
  rtpsim::prior belief;
  std::vector<rtpsim::target_profile> targets;
  rtpsim::demand_schedule background;
  rtpsim::noise_config noise;
  rtpsim::chance_config cfg;
};

workload build_workload(int slots, int n_prices, int n_clusters,
                        int n_thetas, int n_targets) {
  workload w;

  rtpsim::csv_document net_doc;
  net_doc.comments = {"#v0_volts=12500"};
  net_doc.rows = {
      {"line_index", "parent_node", "child_node", "R_ohm", "X_ohm", "Smax_kVA"},
      {"1", "0", "1", "0.0242", "0.0482", "1e9"}};
  w.net = rtpsim::network::from_document(net_doc, "bench");

  rtpsim::counter_rng gen(7, rtpsim::rng_stream::scenario_gen, 0);
  w.specs.reserve(static_cast<std::size_t>(n_clusters));
  for (int c = 0; c < n_clusters; ++c) {
    rtpsim::cluster_spec spec;
    spec.id = c + 1;
    spec.kind = rtpsim::cluster_kind::interruptible;
    spec.t1 = 1 + gen.index(slots - 1);
    spec.t2 = spec.t1 + 1 + gen.index(slots - spec.t1);
    spec.energy_kwh = 8.0 + gen.uniform() * 24.0;
    spec.power_cap_kw = spec.energy_kwh / 4.0;
    spec.beta = 8.0 + gen.uniform() * 10.0;
    w.specs.push_back(spec);
  }

  std::vector<rtpsim::price_signal> prices;
  prices.reserve(static_cast<std::size_t>(n_prices));
  for (int p = 0; p < n_prices; ++p) {
    rtpsim::price_signal sig;
    sig.id = p + 1;
    sig.price.resize(static_cast<std::size_t>(slots));
    for (double& level : sig.price)
      level = 0.125 + 0.0625 * static_cast<double>(gen.index(7));
    prices.push_back(std::move(sig));
  }
  w.table = rtpsim::price_table::build(std::move(prices), w.specs, 4.0);

  w.thetas.reserve(static_cast<std::size_t>(n_thetas));
  for (int k = 0; k < n_thetas; ++k) {
    rtpsim::sensitivity_model theta;
    theta.id = k + 1;
    theta.theta.resize(static_cast<std::size_t>(slots));
    for (double& v : theta.theta)
      v = 0.75 + 0.03125 * static_cast<double>(gen.index(17));
    w.thetas.push_back(theta);
  }
  w.belief = rtpsim::init_prior(w.thetas);

  for (int j = 0; j < n_targets; ++j) {
    rtpsim::target_profile t;
    t.id = j + 1;
    t.target.resize(static_cast<std::size_t>(slots));
    rtpsim::load_moments m = rtpsim::expected_load(
        w.thetas[static_cast<std::size_t>(j % n_thetas)],
        w.table.prices[static_cast<std::size_t>(j % n_prices)].price, w.specs,
        4.0, w.noise);
    for (int s = 0; s < slots; ++s)
      t.target[static_cast<std::size_t>(s)] =
          m.mean[static_cast<std::size_t>(s)] * (1.0 + 0.05 * gen.uniform());
    w.targets.push_back(std::move(t));
  }

  w.background.slots = slots;
  w.background.active.assign(1, std::vector<double>(static_cast<std::size_t>(slots), 0.0));
  w.background.reactive = w.background.active;

  w.noise.sigma = 0.4;
  w.cfg.mode = rtpsim::constraint_mode::set_b;
  w.cfg.mu = 0.1;
  w.cfg.nu = 0.1;
  w.cfg.limits = rtpsim::constraint_limits::voltage_band(12500.0, 0.95, 1.05);
  return w;
}

double time_selections(const workload& w, bool parallel, int rounds,
                       std::vector<int>& picks) {
  picks.clear();
  auto start = std::chrono::steady_clock::now();
  for (int r = 0; r < rounds; ++r) {
    const rtpsim::sensitivity_model& theta =
        w.thetas[static_cast<std::size_t>(r) % w.thetas.size()];
    const rtpsim::target_profile& target =
        w.targets[static_cast<std::size_t>(r) % w.targets.size()];
    rtpsim::selection_result sel =
        rtpsim::select_price(w.table, theta, w.belief, target, w.cfg, w.net, 1,
                             w.background, w.noise, parallel);
    picks.push_back(sel.fallback ? -1 : sel.price_index);
  }
  auto stop = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(stop - start).count();
}

}  // namespace

int main(int argc, char** argv) {
  int rounds = 200;
  int n_prices = 128;
  int n_clusters = 40;
  if (argc > 1) rounds = std::atoi(argv[1]);
  if (argc > 2) n_prices = std::atoi(argv[2]);
  if (argc > 3) n_clusters = std::atoi(argv[3]);
  if (rounds < 1 || n_prices < 2 || n_clusters < 1) {
    std::fprintf(stderr, "usage: bench_kernels [rounds] [prices] [clusters]\n");
    return 2;
  }

  workload w = build_workload(6, n_prices, n_clusters, 10, 8);

#ifdef _OPENMP
  int threads = omp_get_max_threads();
#else
  int threads = 1;
#endif
  std::printf("price enumeration: %d rounds, %d prices, %d clusters, "
              "%d candidates, %d threads\n",
              rounds, n_prices, n_clusters,
              static_cast<int>(w.thetas.size()), threads);

  std::vector<int> serial_picks;
  std::vector<int> parallel_picks;
  double warm = time_selections(w, true, 10, parallel_picks);
  (void)warm;
  double t_serial = time_selections(w, false, rounds, serial_picks);
  double t_parallel = time_selections(w, true, rounds, parallel_picks);

  if (serial_picks != parallel_picks) {
    std::fprintf(stderr, "FAIL: serial and parallel selections differ\n");
    return 1;
  }

  std::printf("serial    %.3f s  (%.2f ms/selection)\n", t_serial,
              1e3 * t_serial / rounds);
  std::printf("parallel  %.3f s  (%.2f ms/selection)\n", t_parallel,
              1e3 * t_parallel / rounds);
  std::printf("speedup   %.2fx (identical selections: yes)\n",
              t_serial / t_parallel);
  return 0;
}
