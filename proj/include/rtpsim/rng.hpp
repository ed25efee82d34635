#pragma once

#include <cstdint>
#include <vector>

namespace rtpsim {

// Named substreams derived from one master seed. Every consumer owns its own
// stream, so adding draws to one part of the simulation never perturbs the
// others and paired runs can share the environment streams exactly.
enum class rng_stream : std::uint64_t {
  targets = 1,
  preferences = 2,
  obs_noise = 3,
  ts_sampling = 4,
  two_stage = 5,
  scenario_gen = 6,
  monte_carlo = 7,
};

// Counter-based generator: the n-th variate of (seed, stream, block) is a pure
// hash of (seed, stream, block, n). No sequential state to share or lock, so
// parallel consumers are bitwise reproducible regardless of thread count.
std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t block, std::uint64_t counter);

// Uniform on (0,1), strictly inside the open interval (safe for quantile maps).
double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t block,
           std::uint64_t counter);

// Standard normal quantile (Wichura's double-precision rational
// approximation); |error| < 1e-15 over (0,1). Pure arithmetic, no libm
// special functions, hence bit-stable across platforms and thread counts.
double inverse_normal_cdf(double p);

// Standard normal CDF via erfc.
double normal_cdf(double z);

class counter_rng {
 public:
  counter_rng(std::uint64_t seed, rng_stream stream, std::uint64_t block)
      : seed_(seed),
        stream_(static_cast<std::uint64_t>(stream)),
        block_(block),
        counter_(0) {}

  double uniform() { return u01(seed_, stream_, block_, counter_++); }
  double normal() { return inverse_normal_cdf(uniform()); }

  // Uniform integer in [0, n).
  std::uint64_t index(std::uint64_t n);

  // Fisher-Yates shuffle, deterministic given the stream position.
  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(index(i));
      std::swap(v[i - 1], v[j]);
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_;
  std::uint64_t counter_;
};

}  // namespace rtpsim
