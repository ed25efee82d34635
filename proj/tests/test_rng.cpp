#include <cmath>
#include <cstdint>
#include <set>
#include <vector>

#include "doctest.h"
#include "rtpsim/rng.hpp"

using namespace rtpsim;

TEST_SUITE("rng") {

TEST_CASE("u01 stays strictly inside the open unit interval") {
  for (std::uint64_t c = 0; c < 20000; ++c) {
    const double u = u01(42, 1, 7, c);
    CHECK(u > 0.0);
    CHECK(u < 1.0);
  }
}

TEST_CASE("variates are pure functions of (seed, stream, block, counter)") {
  CHECK(u01(1, 2, 3, 4) == u01(1, 2, 3, 4));
  CHECK(mix_u64(9, 9, 9, 9) == mix_u64(9, 9, 9, 9));
  // Changing any coordinate changes the draw.
  const double base = u01(1, 2, 3, 4);
  CHECK(u01(2, 2, 3, 4) != base);
  CHECK(u01(1, 3, 3, 4) != base);
  CHECK(u01(1, 2, 4, 4) != base);
  CHECK(u01(1, 2, 3, 5) != base);
}

TEST_CASE("streams with the same seed do not collide") {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 1; s <= 7; ++s)
    for (std::uint64_t c = 0; c < 64; ++c)
      seen.insert(mix_u64(123, s, 0, c));
  CHECK(seen.size() == 7u * 64u);
}

TEST_CASE("counter_rng advances its counter and replays exactly") {
  counter_rng a(5, rng_stream::targets, 10);
  counter_rng b(5, rng_stream::targets, 10);
  CHECK(a.counter() == 0);
  std::vector<double> xs, ys;
  for (int i = 0; i < 100; ++i) xs.push_back(a.uniform());
  for (int i = 0; i < 100; ++i) ys.push_back(b.uniform());
  CHECK(a.counter() == 100);
  CHECK(xs == ys);
}

TEST_CASE("index(n) is in range and covers all residues") {
  counter_rng rng(77, rng_stream::monte_carlo, 0);
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 5000; ++i) {
    const std::uint64_t k = rng.index(10);
    REQUIRE(k < 10);
    ++hits[static_cast<std::size_t>(k)];
  }
  for (int h : hits) CHECK(h > 300);  // crude uniformity floor (expected 500)
}

TEST_CASE("inverse_normal_cdf inverts normal_cdf to high accuracy") {
  for (int i = 1; i < 400; ++i) {
    const double p = i / 400.0;
    const double z = inverse_normal_cdf(p);
    CHECK(std::fabs(normal_cdf(z) - p) < 1e-12);
  }
  // Symmetry of the quantile function.
  CHECK(inverse_normal_cdf(0.5) == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(inverse_normal_cdf(0.975) ==
        doctest::Approx(1.959963984540054).epsilon(1e-12));
  CHECK(inverse_normal_cdf(0.2) == doctest::Approx(-inverse_normal_cdf(0.8))
                                       .epsilon(1e-13));
}

TEST_CASE("normal() has roughly standard moments") {
  counter_rng rng(2024, rng_stream::obs_noise, 3);
  const int n = 40000;
  double sum = 0.0, sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = rng.normal();
    sum += z;
    sq += z * z;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(std::fabs(mean) < 0.02);       // SE = 1/200
  CHECK(std::fabs(var - 1.0) < 0.03);  // SE ~ sqrt(2/n)
}

TEST_CASE("shuffle is a deterministic permutation") {
  std::vector<int> v0{1, 2, 3, 4, 5, 6, 7, 8};
  std::vector<int> a = v0, b = v0;
  counter_rng ra(11, rng_stream::scenario_gen, 0);
  counter_rng rb(11, rng_stream::scenario_gen, 0);
  ra.shuffle(a);
  rb.shuffle(b);
  CHECK(a == b);
  std::vector<int> sa = a;
  std::sort(sa.begin(), sa.end());
  CHECK(sa == v0);
}

}  // TEST_SUITE
