#include "rtpsim/rng.hpp"

#include <cmath>

namespace rtpsim {

namespace {

// SplitMix64 finalizer: a strong 64-bit bijective mixer.
inline std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

}  // namespace

std::uint64_t mix_u64(std::uint64_t seed, std::uint64_t stream,
                      std::uint64_t block, std::uint64_t counter) {
  // Chain the finalizer over the four words; each stage is bijective in its
  // accumulator, and distinct golden-ratio offsets keep the words from
  // cancelling one another.
  std::uint64_t h = mix64(seed);
  h = mix64(h ^ (stream * 0xd1b54a32d192ed03ULL));
  h = mix64(h ^ (block * 0x8cb92ba72f3d8dd7ULL));
  h = mix64(h ^ (counter * 0xa0761d6478bd642fULL));
  return h;
}

double u01(std::uint64_t seed, std::uint64_t stream, std::uint64_t block,
           std::uint64_t counter) {
  const std::uint64_t bits = mix_u64(seed, stream, block, counter) >> 11;
  // (bits + 0.5) / 2^53: strictly inside (0,1), 53-bit resolution.
  return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

std::uint64_t counter_rng::index(std::uint64_t n) {
  if (n <= 1) {
    if (n == 1) ++counter_;  // consume a draw either way, keeps streams aligned
    return 0;
  }
  // Rejection sampling on the top bits removes modulo bias.
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  for (;;) {
    const std::uint64_t x = mix_u64(seed_, stream_, block_, counter_++);
    if (x < limit) return x % n;
  }
}

double inverse_normal_cdf(double p) {
  // Wichura (1988), algorithm PPND16. Three rational approximations by region.
  const double q = p - 0.5;
  if (std::fabs(q) <= 0.425) {
    const double r = 0.180625 - q * q;
    const double num =
        q * (((((((2.5090809287301226727e3 * r + 3.3430575583588128105e4) * r +
                   6.7265770927008700853e4) * r + 4.5921953931549871457e4) * r +
                 1.3731693765509461125e4) * r + 1.9715909503065514427e3) * r +
               1.3314166789178437745e2) * r + 3.3871328727963666080e0);
    const double den =
        (((((((5.2264952788528545610e3 * r + 2.8729085735721942674e4) * r +
              3.9307895800092710610e4) * r + 2.1213794301586595867e4) * r +
            5.3941960214247511077e3) * r + 6.8718700749205790830e2) * r +
          4.2313330701600911252e1) * r + 1.0);
    return num / den;
  }
  double r = (q < 0.0) ? p : 1.0 - p;
  r = std::sqrt(-std::log(r));
  double x;
  if (r <= 5.0) {
    r -= 1.6;
    const double num =
        (((((((7.74545014278341407640e-4 * r + 2.27238449892691845833e-2) * r +
              2.41780725177450611770e-1) * r + 1.27045825245236838258e0) * r +
            3.64784832476320460504e0) * r + 5.76949722146069140550e0) * r +
          4.63033784615654529590e0) * r + 1.42343711074968357734e0);
    const double den =
        (((((((1.05075007164441684324e-9 * r + 5.47593808499534494600e-4) * r +
              1.51986665636164571966e-2) * r + 1.48103976427480074590e-1) * r +
            6.89767334985100004550e-1) * r + 1.67638483018380384940e0) * r +
          2.05319162663775882187e0) * r + 1.0);
    x = num / den;
  } else {
    r -= 5.0;
    const double num =
        (((((((2.01033439929228813265e-7 * r + 2.71155556874348757815e-5) * r +
              1.24266094738807843860e-3) * r + 2.65321895265761230930e-2) * r +
            2.96560571828504891230e-1) * r + 1.78482653991729133580e0) * r +
          5.46378491116411436990e0) * r + 6.65790464350110377720e0);
    const double den =
        (((((((2.04426310338993978564e-15 * r + 1.42151175831644588870e-7) * r +
              1.84631831751005468180e-5) * r + 7.86869131145613259100e-4) * r +
            1.48753612908506148525e-2) * r + 1.36929880922735805310e-1) * r +
          5.99832206555887937690e-1) * r + 1.0);
    x = num / den;
  }
  return (q < 0.0) ? -x : x;
}

double normal_cdf(double z) {
  return 0.5 * std::erfc(-z * 0.7071067811865475244);
}

}  // namespace rtpsim
