#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>

namespace zcp {

/// z for a one-sided 99% normal quantile.
inline constexpr double kZ99 = 2.3263478740408408;

/// One-sided Wilson score upper confidence limit for a binomial rate.
inline double wilson_upper(std::int64_t failures, std::int64_t trials, double z = kZ99) {
  if (trials <= 0) return 1.0;
  const double n = static_cast<double>(trials);
  const double phat = static_cast<double>(failures) / n;
  const double z2 = z * z;
  const double centre = phat + z2 / (2.0 * n);
  const double spread = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n));
  return std::min(1.0, (centre + spread) / (1.0 + z2 / n));
}

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Per-unit random stream keyed by (master seed, index), independent of
/// the order in which units are executed.
class Stream {
 public:
  Stream(std::uint64_t seed, std::uint64_t index)
      : gen_(splitmix64(splitmix64(seed) ^ splitmix64(index ^ 0xD1B54A32D192ED03ULL))) {}

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  std::uint64_t bits() { return gen_(); }

 private:
  std::mt19937_64 gen_;
};

}  // namespace zcp
