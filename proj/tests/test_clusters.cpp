#include <cmath>
#include <vector>

#include "cluster_oracle.hpp"
#include "doctest.h"
#include "rtpsim/clusters.hpp"
#include "rtpsim/csv.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/rng.hpp"

using namespace rtpsim;

TEST_SUITE("clusters") {

TEST_CASE("interruptible fill takes the cheapest in-window slots at the cap") {
  cluster_spec spec;
  spec.id = 1;
  spec.kind = cluster_kind::interruptible;
  spec.t1 = 2;
  spec.t2 = 4;
  spec.power_cap_kw = 2.0;
  spec.energy_kwh = 12.0;  // 1.5 slots at the cap with dt = 4
  spec.beta = 1.0;
  spec.validate(5, 4.0);

  const std::vector<double> price{0.1, 0.9, 0.2, 0.5, 0.0};
  const std::vector<double> got = min_cost_profile(spec, price, 4.0);
  // Cheapest in-window slot is 3 (0.2): full cap. Next is 4 (0.5): remainder
  // 4 kWh -> 1 kW. Slots outside [2,4] stay empty even though cheaper.
  CHECK(got == std::vector<double>{0.0, 0.0, 2.0, 1.0, 0.0});
}

TEST_CASE("equal prices resolve toward the earliest slot") {
  cluster_spec spec;
  spec.kind = cluster_kind::interruptible;
  spec.t1 = 1;
  spec.t2 = 3;
  spec.power_cap_kw = 3.0;
  spec.energy_kwh = 6.0;
  spec.beta = 1.0;
  const std::vector<double> price{0.4, 0.4, 0.4};
  CHECK(min_cost_profile(spec, price, 2.0) ==
        std::vector<double>{3.0, 0.0, 0.0});
}

TEST_CASE("shiftable pulse slides to the cheapest offset, earliest on ties") {
  cluster_spec spec;
  spec.kind = cluster_kind::uninterruptible;
  spec.t1 = 1;
  spec.t2 = 3;  // start positions; the 2-slot pulse may overhang into slot 4
  spec.pulse_kw = {3.0, 1.0};
  spec.beta = 1.0;
  spec.validate(4, 1.0);

  // Starts 1..3 cost 3p(s)+p(s+1): 1.3, 0.8, 1.7 -> start 2.
  std::vector<double> price{0.4, 0.1, 0.5, 0.2};
  CHECK(min_cost_profile(spec, price, 1.0) ==
        std::vector<double>{0.0, 3.0, 1.0, 0.0});

  // Cheapest shift at the window's end.
  price = {0.4, 0.4, 0.5, 0.0};
  CHECK(min_cost_profile(spec, price, 1.0) ==
        std::vector<double>{0.0, 0.0, 3.0, 1.0});

  // All shifts tie on a flat price: earliest wins.
  price = {0.3, 0.3, 0.3, 0.3};
  CHECK(min_cost_profile(spec, price, 1.0) ==
        std::vector<double>{3.0, 1.0, 0.0, 0.0});
}

TEST_CASE("validate rejects specs that cannot meet their own constraints") {
  cluster_spec spec;
  spec.kind = cluster_kind::interruptible;
  spec.t1 = 2;
  spec.t2 = 3;
  spec.power_cap_kw = 1.0;
  spec.energy_kwh = 20.0;  // window holds at most 8 kWh at dt = 4
  spec.beta = 1.0;
  CHECK_THROWS_AS(spec.validate(4, 4.0), sim_error);

  spec.energy_kwh = 4.0;
  CHECK_NOTHROW(spec.validate(4, 4.0));
  spec.t2 = 7;  // window leaves the horizon
  CHECK_THROWS_AS(spec.validate(4, 4.0), sim_error);

  cluster_spec pulse;
  pulse.kind = cluster_kind::uninterruptible;
  pulse.t1 = 1;
  pulse.t2 = 2;
  pulse.pulse_kw = {1.0, 1.0, 1.0};
  pulse.beta = 1.0;
  // Start 2 would push the 3-slot pulse past a 3-slot horizon.
  CHECK_THROWS_AS(pulse.validate(3, 1.0), sim_error);
  CHECK_NOTHROW(pulse.validate(4, 1.0));
}

TEST_CASE("randomized specs match the reference solver exactly") {
  counter_rng rng(777, rng_stream::monte_carlo, 2);
  for (int rep = 0; rep < 150; ++rep) {
    const int slots = 3 + static_cast<int>(rng.index(6));
    const double dt = (rep % 3 == 0) ? 1.0 : 4.0;
    cluster_spec spec = testsupport::random_cluster(rng, slots, dt);
    REQUIRE_NOTHROW(spec.validate(slots, dt));
    const std::vector<double> price =
        testsupport::random_price(rng, slots, rep % 4 == 0);

    const std::vector<double> got = min_cost_profile(spec, price, dt);
    const std::vector<double> want = testsupport::oracle_profile(spec, price, dt);

    // Identical tie rules make the whole profile comparable, not just cost.
    REQUIRE(got.size() == want.size());
    for (std::size_t t = 0; t < got.size(); ++t)
      CHECK(got[t] == doctest::Approx(want[t]).epsilon(1e-12));

    const double cg = testsupport::profile_cost(got, price, dt);
    const double cw = testsupport::profile_cost(want, price, dt);
    CHECK(std::fabs(cg - cw) <= 1e-9 * std::max(1.0, std::fabs(cw)));

    // Hard invariants: in-window support, caps, exact energy.
    double energy = 0.0;
    for (std::size_t t = 0; t < got.size(); ++t) {
      if (got[t] != 0.0) {
        CHECK(static_cast<int>(t) + 1 >= spec.t1);
        const bool inside_or_overhang =
            static_cast<int>(t) + 1 <= spec.t2 ||
            spec.kind == cluster_kind::uninterruptible;
        CHECK(inside_or_overhang);
      }
      if (spec.kind == cluster_kind::interruptible)
        CHECK(got[t] <= spec.power_cap_kw + 1e-12);
      energy += got[t] * dt;
    }
    if (spec.kind == cluster_kind::interruptible)
      CHECK(energy == doctest::Approx(spec.energy_kwh).epsilon(1e-12));
  }
}

TEST_CASE("aggregate_profile is the count-weighted schedule sum") {
  cluster_spec a;
  a.kind = cluster_kind::interruptible;
  a.t1 = 1;
  a.t2 = 2;
  a.power_cap_kw = 1.0;
  a.energy_kwh = 1.0;
  a.beta = 5.0;
  cluster_spec b = a;
  b.t1 = 2;
  b.t2 = 2;

  const std::vector<double> price{0.2, 0.1};
  const std::vector<double> agg =
      aggregate_profile({a, b}, {2.0, 3.0}, price, 1.0);
  // a fills slot 2 (cheaper), b must use slot 2: 2*1 + 3*1 there.
  CHECK(agg == std::vector<double>{0.0, 5.0});
}

TEST_CASE("cluster csv loader round-trips both kinds") {
  csv_document doc;
  doc.rows = {
      {"cluster_id", "kind", "t1", "t2", "E_kWh", "rho_kW", "beta"},
      {"1", "interruptible", "1", "3", "8", "2", "14.5"},
      {"2", "uninterruptible", "2", "4", "3|1.5", "0", "7"},
  };
  std::vector<cluster_spec> specs = load_clusters(doc, "inline");
  REQUIRE(specs.size() == 2);
  CHECK(specs[0].kind == cluster_kind::interruptible);
  CHECK(specs[0].energy_kwh == 8.0);
  CHECK(specs[0].power_cap_kw == 2.0);
  CHECK(specs[0].beta == 14.5);
  CHECK(specs[1].kind == cluster_kind::uninterruptible);
  CHECK(specs[1].pulse_kw == std::vector<double>{3.0, 1.5});
  CHECK(specs[1].beta == 7.0);

  doc.rows[1][1] = "unknown-kind";
  CHECK_THROWS_AS((void)load_clusters(doc, "inline"), sim_error);
}

}  // TEST_SUITE
