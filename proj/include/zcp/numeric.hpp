#pragma once

// Small log-space helpers shared by the divergence and betting code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>

namespace zcp {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// ln(e^a + e^b) without overflow; either argument may be -inf.
inline double log_add_exp(double a, double b) {
  if (a == -kInf) return b;
  if (b == -kInf) return a;
  const double hi = std::max(a, b);
  return hi + std::log1p(std::exp(-std::abs(a - b)));
}

inline double log_sum_exp(std::span<const double> xs) {
  double hi = -kInf;
  for (double x : xs) hi = std::max(hi, x);
  if (hi == -kInf || hi == kInf) return hi;
  double acc = 0.0;
  for (double x : xs) acc += std::exp(x - hi);
  return hi + std::log(acc);
}

/// ln|e^lr - 1|, i.e. the log of |r - 1| given lr = ln r. Returns -inf at lr = 0.
inline double log_abs_expm1(double lr) {
  if (lr == 0.0) return -kInf;
  if (lr == kInf) return kInf;
  if (lr > 0.0) return lr + std::log(-std::expm1(-lr));
  return std::log(-std::expm1(lr));
}

/// ln(1 + e^{2 s}) for s = ln(c t), switching to 2 s + ln(1 + (c t)^-2)
/// once c t exceeds 1e8.
inline double log1p_sq_from_log(double s) {
  constexpr double kSwitch = 18.420680743952367;  // ln(1e8)
  if (s == -kInf) return 0.0;
  if (s > kSwitch) return 2.0 * s + std::log1p(std::exp(-2.0 * s));
  return std::log1p(std::exp(2.0 * s));
}

/// Least-squares slope of ln(y) against ln(x).
inline double log_log_slope(std::span<const double> x, std::span<const double> y) {
  const std::size_t n = std::min(x.size(), y.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(n);
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace zcp
