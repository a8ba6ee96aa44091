#pragma once

// Continuous coin betting: fixed-fraction wealth, the hindsight-optimal
// fraction, a Krichevsky-Trofimov online bettor, and Ville boundary scans.
// All wealth is carried as ln W so products of up to 2^n stay representable;
// ruin (1 + beta c = 0) is ln W = -inf.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "zcp/error.hpp"
#include "zcp/numeric.hpp"

namespace zcp {

struct WealthTrace {
  std::vector<double> coins;       // c_t, t = 1..n
  std::vector<double> bets;        // beta_t, chosen before c_t is seen
  std::vector<double> log_wealth;  // ln W_t, t = 0..n, ln W_0 = 0
  double beta_star = 0.0;
  double log_wealth_star = 0.0;

  std::size_t steps() const noexcept { return coins.size(); }
  double final_log_wealth() const { return log_wealth.back(); }
  double wealth(std::size_t t) const { return std::exp(log_wealth.at(t)); }
  /// ln(W*_n / W_n).
  double log_regret() const { return log_wealth_star - final_log_wealth(); }
};

struct OptimalBet {
  double beta_star = 0.0;
  double log_wealth_star = 0.0;
};

namespace detail {

inline void require_coins(std::span<const double> coins) {
  for (double c : coins) {
    require(std::isfinite(c) && c >= -1.0 && c <= 1.0, "coin outcomes must lie in [-1,1]");
  }
}

}  // namespace detail

/// ln W_n(beta) = sum_t ln(1 + beta c_t).
inline double wealth_fixed(double beta, std::span<const double> coins) {
  detail::require(std::isfinite(beta) && beta >= -1.0 && beta <= 1.0, "bet must lie in [-1,1]");
  detail::require_coins(coins);
  double acc = 0.0;
  for (double c : coins) {
    const double step = 1.0 + beta * c;
    if (step <= 0.0) return -kInf;
    acc += std::log1p(beta * c);
  }
  return acc;
}

/// Maximizes the concave map beta -> sum ln(1 + beta c_t) over [-1, 1].
///
/// Bisects on the derivative sum c_t / (1 + beta c_t), which is decreasing,
/// then compares the interior candidate against both endpoints and beta = 0.
inline OptimalBet max_log_wealth(std::span<const double> coins) {
  detail::require(!coins.empty(), "max_log_wealth: need at least one coin");
  detail::require_coins(coins);

  auto slope = [&](double beta) {
    double acc = 0.0;
    for (double c : coins) {
      const double step = 1.0 + beta * c;
      if (step <= 0.0) return c > 0.0 ? kInf : -kInf;
      acc += c / step;
    }
    return acc;
  };
  auto value = [&](double beta) {
    double acc = 0.0;
    for (double c : coins) {
      if (1.0 + beta * c <= 0.0) return -kInf;
      acc += std::log1p(beta * c);
    }
    return acc;
  };

  double lo = -1.0, hi = 1.0;
  double candidate;
  if (slope(hi) >= 0.0) {
    candidate = hi;
  } else if (slope(lo) <= 0.0) {
    candidate = lo;
  } else {
    while (hi - lo > 1e-12) {
      const double mid = 0.5 * (lo + hi);
      if (mid <= lo || mid >= hi) break;
      (slope(mid) > 0.0 ? lo : hi) = mid;
    }
    candidate = 0.5 * (lo + hi);
  }

  OptimalBet best{0.0, 0.0};
  for (double beta : {candidate, -1.0, 1.0}) {
    const double v = value(beta);
    if (v > best.log_wealth_star) best = {beta, v};
  }
  return best;
}

/// Krichevsky-Trofimov fractions beta_t = (c_1 + ... + c_{t-1}) / t.
/// `solve_optimum = false` skips (beta*, ln W*) for callers that only scan
/// the wealth path.
inline WealthTrace kt_bettor(std::span<const double> coins, bool solve_optimum = true) {
  detail::require_coins(coins);
  WealthTrace trace;
  trace.coins.assign(coins.begin(), coins.end());
  trace.bets.reserve(coins.size());
  trace.log_wealth.reserve(coins.size() + 1);
  trace.log_wealth.push_back(0.0);
  double running_sum = 0.0;
  double log_w = 0.0;
  for (std::size_t i = 0; i < coins.size(); ++i) {
    const double beta = running_sum / static_cast<double>(i + 1);
    trace.bets.push_back(beta);
    log_w += std::log1p(beta * coins[i]);
    trace.log_wealth.push_back(log_w);
    running_sum += coins[i];
  }
  if (solve_optimum && !coins.empty()) {
    const auto opt = max_log_wealth(coins);
    trace.beta_star = opt.beta_star;
    trace.log_wealth_star = opt.log_wealth_star;
  }
  return trace;
}

/// Online mixture over constant bets with an arcsine (Beta(1/2,1/2)) prior:
/// beta_t = E[beta | c_1..c_{t-1}] under weights proportional to W_{t-1}(beta).
/// With beta = -cos(phi), phi uniform on [0, pi], the prior integral becomes
/// a trapezoid rule on `grid` nodes. On +-1 coins this reproduces the KT
/// fractions; on continuous coins it keeps W* / W <= 2 sqrt(n), which the KT
/// fractions do not.
inline WealthTrace mixture_bettor(std::span<const double> coins, std::size_t grid = 1025,
                                  bool solve_optimum = true) {
  detail::require_coins(coins);
  detail::require(grid >= 3, "mixture_bettor: grid must have at least 3 nodes");
  std::vector<double> beta(grid), weight(grid);
  const double step = std::numbers::pi / static_cast<double>(grid - 1);
  for (std::size_t j = 0; j < grid; ++j) {
    beta[j] = -std::cos(step * static_cast<double>(j));
    weight[j] = (j == 0 || j + 1 == grid) ? 0.5 : 1.0;  // trapezoid end weights
  }
  // Symmetric nodes so that the first bet is exactly 0.
  for (std::size_t j = 0; j < grid / 2; ++j) beta[grid - 1 - j] = -beta[j];
  if (grid % 2 == 1) beta[grid / 2] = 0.0;

  WealthTrace trace;
  trace.coins.assign(coins.begin(), coins.end());
  trace.bets.reserve(coins.size());
  trace.log_wealth.reserve(coins.size() + 1);
  trace.log_wealth.push_back(0.0);
  double log_total = 0.0;
  for (double c : coins) {
    // Posterior weights are kept normalized to sum 1, so only ratios matter.
    double num = 0.0, den = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
      num += weight[j] * beta[j];
      den += weight[j];
    }
    const double b = std::clamp(num / den, -1.0, 1.0);
    trace.bets.push_back(b);
    log_total += std::log1p(b * c);
    trace.log_wealth.push_back(log_total);
    double total = 0.0;
    for (std::size_t j = 0; j < grid; ++j) {
      weight[j] *= std::max(0.0, 1.0 + beta[j] * c);
      total += weight[j];
    }
    for (double& w : weight) w /= total;
  }
  if (solve_optimum && !coins.empty()) {
    const auto opt = max_log_wealth(coins);
    trace.beta_star = opt.beta_star;
    trace.log_wealth_star = opt.log_wealth_star;
  }
  return trace;
}

/// (sum_t c_t)^2 / (4n), a lower bound on ln W*_n.
inline double wealth_quadratic_lower(std::span<const double> coins) {
  detail::require(!coins.empty(), "wealth_quadratic_lower: need at least one coin");
  detail::require_coins(coins);
  double sum = 0.0;
  for (double c : coins) sum += c;
  return sum * sum / (4.0 * static_cast<double>(coins.size()));
}

/// Smallest t with W_t >= 1/delta, if any.
inline std::optional<std::size_t> ville_first_crossing(const WealthTrace& trace, double delta) {
  detail::require(delta > 0.0 && delta < 1.0, "ville_first_crossing: delta must lie in (0,1)");
  const double threshold = -std::log(delta);
  for (std::size_t t = 0; t < trace.log_wealth.size(); ++t) {
    if (trace.log_wealth[t] >= threshold) return t;
  }
  return std::nullopt;
}

}  // namespace zcp
