#include <cmath>
#include <cstdint>
#include <vector>

#include "bayes_oracle.hpp"
#include "cluster_oracle.hpp"
#include "doctest.h"
#include "rtpsim/bandit.hpp"
#include "rtpsim/errors.hpp"
#include "rtpsim/rng.hpp"

using namespace rtpsim;

namespace {

sensitivity_model theta_of(int id, std::vector<double> v) {
  sensitivity_model m;
  m.id = id;
  m.theta = std::move(v);
  return m;
}

}  // namespace

TEST_SUITE("bandit") {

TEST_CASE("init_prior defaults to uniform and validates given weights") {
  prior pi = init_prior({theta_of(1, {1.0}), theta_of(2, {2.0})});
  CHECK(pi.weights == std::vector<double>{0.5, 0.5});

  CHECK_THROWS_AS((void)init_prior({}), sim_error);
  CHECK_THROWS_AS(
      (void)init_prior({theta_of(1, {1.0})}, std::vector<double>{0.5, 0.5}),
      sim_error);
  CHECK_THROWS_AS(
      (void)init_prior({theta_of(1, {1.0})}, std::vector<double>{-1.0}),
      sim_error);
  CHECK_THROWS_AS(
      (void)init_prior({theta_of(1, {1.0}), theta_of(2, {2.0})},
                       std::vector<double>{0.7, 0.7}),
      sim_error);
  CHECK_NOTHROW((void)init_prior({theta_of(1, {1.0}), theta_of(2, {2.0})},
                                 std::vector<double>{0.25, 0.75}));
}

TEST_CASE("map_index prefers the earliest maximum") {
  prior pi = init_prior({theta_of(1, {1.0}), theta_of(2, {2.0}),
                         theta_of(3, {3.0})},
                        std::vector<double>{0.4, 0.2, 0.4});
  CHECK(map_index(pi) == 0);
  pi.weights = {0.1, 0.8, 0.1};
  CHECK(map_index(pi) == 1);
}

TEST_CASE("sample_index walks the CDF in support order") {
  prior pi = init_prior({theta_of(1, {1.0}), theta_of(2, {2.0}),
                         theta_of(3, {3.0})},
                        std::vector<double>{0.2, 0.0, 0.8});
  int hits[3] = {0, 0, 0};
  for (int i = 0; i < 4000; ++i) {
    counter_rng rng(31, rng_stream::ts_sampling, static_cast<std::uint64_t>(i));
    ++hits[sample_index(pi, rng)];
  }
  CHECK(hits[1] == 0);  // zero-mass candidate is never drawn
  CHECK(hits[0] > 600);
  CHECK(hits[0] < 1000);  // expected 800
  CHECK(hits[0] + hits[2] == 4000);
}

TEST_CASE("log_likelihood is the slotwise Gaussian sum") {
  cluster_spec c;
  c.id = 1;
  c.kind = cluster_kind::interruptible;
  c.t1 = 1;
  c.t2 = 1;
  c.power_cap_kw = 2.0;
  c.energy_kwh = 2.0;
  c.beta = 4.0;
  noise_config noise;
  noise.sigma = 0.5;
  noise.sigma_obs = 0.0;
  const std::vector<double> price{0.5};
  const sensitivity_model th = theta_of(1, {1.0});

  // mean = 4*2/0.5 = 16, var = 0.25*4 = 1.
  const double y = 17.3;
  const double want =
      -0.5 * std::log(2.0 * 3.14159265358979323846) - 0.5 * (y - 16.0) * (y - 16.0);
  CHECK(log_likelihood({y}, price, th, {c}, 1.0, noise) ==
        doctest::Approx(want).epsilon(1e-12));
}

TEST_CASE("deterministic slots accept matches and veto mismatches") {
  // sigma = sigma_obs = 0: the model is a point mass on B(t)/s.
  cluster_spec c;
  c.id = 1;
  c.kind = cluster_kind::interruptible;
  c.t1 = 1;
  c.t2 = 1;
  c.power_cap_kw = 2.0;
  c.energy_kwh = 2.0;
  c.beta = 4.0;
  noise_config noise;
  noise.sigma = 0.0;
  noise.sigma_obs = 0.0;
  const std::vector<double> price{0.5};
  const sensitivity_model th = theta_of(1, {1.0});

  CHECK(log_likelihood({16.0}, price, th, {c}, 1.0, noise) == 0.0);
  CHECK(log_likelihood({16.1}, price, th, {c}, 1.0, noise) ==
        -std::numeric_limits<double>::infinity());

  prior pi = init_prior({th});
  CHECK_THROWS_AS(
      (void)posterior_update(pi, {16.1}, price, {c}, 1.0, noise),
      sim_error);
}

TEST_CASE("posterior_update matches the long-double reference") {
  counter_rng rng(404, rng_stream::monte_carlo, 3);
  noise_config noise;
  for (int rep = 0; rep < 60; ++rep) {
    const int slots = 1 + static_cast<int>(rng.index(3));  // T <= 3
    const int n_theta = 2 + static_cast<int>(rng.index(3));  // |support| <= 4
    const double dt = 1.0 + 3.0 * rng.uniform();
    noise.sigma = 0.2 + 0.6 * rng.uniform();
    noise.sigma_obs = 0.3 + 0.5 * rng.uniform();  // keeps every slot stochastic

    std::vector<cluster_spec> specs;
    const int n_specs = 1 + static_cast<int>(rng.index(3));
    for (int i = 0; i < n_specs; ++i) {
      cluster_spec s = testsupport::random_cluster(rng, slots, dt);
      s.id = i + 1;
      specs.push_back(s);
    }

    std::vector<sensitivity_model> support;
    for (int k = 0; k < n_theta; ++k) {
      std::vector<double> v;
      for (int t = 0; t < slots; ++t) v.push_back(0.5 + 1.5 * rng.uniform());
      support.push_back(theta_of(k + 1, std::move(v)));
    }
    std::vector<double> weights(static_cast<std::size_t>(n_theta), 0.0);
    double wsum = 0.0;
    for (double& w : weights) {
      w = 0.05 + rng.uniform();
      wsum += w;
    }
    for (double& w : weights) w /= wsum;
    // Renormalize exactly so init_prior's simplex check passes.
    double correction = 0.0;
    for (double w : weights) correction += w;
    weights[0] += 1.0 - correction;
    prior pi = init_prior(support, weights);

    std::vector<double> price;
    for (int t = 0; t < slots; ++t) price.push_back(0.1 + 0.9 * rng.uniform());

    // Observation near the first candidate's mean, plus noise.
    load_moments m = expected_load(support[0], price, specs, dt, noise);
    std::vector<double> obs(m.mean);
    for (double& y : obs) y += 2.0 * (rng.uniform() - 0.5) * 3.0;

    prior got = posterior_update(pi, obs, price, specs, dt, noise);
    std::vector<double> want = testsupport::brute_force_posterior(
        pi, obs, price, specs, dt, noise);

    double sum = 0.0;
    for (std::size_t k = 0; k < got.weights.size(); ++k) {
      CHECK(std::fabs(got.weights[k] - want[k]) < 1e-10);
      sum += got.weights[k];
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("zero-weight candidates stay at zero through updates") {
  cluster_spec c;
  c.id = 1;
  c.kind = cluster_kind::interruptible;
  c.t1 = 1;
  c.t2 = 1;
  c.power_cap_kw = 2.0;
  c.energy_kwh = 2.0;
  c.beta = 4.0;
  noise_config noise;
  noise.sigma = 0.5;
  noise.sigma_obs = 0.5;
  const std::vector<double> price{0.5};

  prior pi = init_prior(
      {theta_of(1, {1.0}), theta_of(2, {1.3}), theta_of(3, {0.7})},
      std::vector<double>{0.5, 0.0, 0.5});
  prior post = posterior_update(pi, {10.0}, price, {c}, 1.0, noise);
  CHECK(post.weights[1] == 0.0);
  CHECK(post.weights[0] + post.weights[2] == doctest::Approx(1.0));
}

TEST_CASE("min_mass_bound scales the prior mass by exp(-lambda * count)") {
  CHECK(min_mass_bound(0.1, 0.0, 64) == doctest::Approx(0.1));
  CHECK(min_mass_bound(0.2, 0.5, 4) == doctest::Approx(0.2 * std::exp(-2.0)));
}

}  // TEST_SUITE
