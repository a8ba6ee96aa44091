#pragma once

// Bound formulas: the Hoeffding-type ZCP bound, the KL baseline, the
// log-wealth complexity term Comp_n(alpha) and its empirical-Bernstein and
// Bernoulli-kl relaxations, the finite-n surrogate of the asymptotic rate,
// and the analytic lemmas the relaxations rest on.
//
// Gaps are per-sample (divided by n). Any bound >= 1 is vacuous for a
// [0,1]-valued loss and is reported as exactly 1.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "zcp/distributions.hpp"
#include "zcp/divergences.hpp"
#include "zcp/error.hpp"
#include "zcp/numeric.hpp"

namespace zcp {

struct BoundConfig {
  std::int64_t n = 1000;
  double delta = 0.05;
  double alpha = 2.0;  // Renyi order in Comp_n

  void validate(std::int64_t min_n = 1) const {
    detail::require(n >= min_n, "bound config: n is below the minimum for this bound");
    detail::require(delta > 0.0 && delta < 1.0, "bound config: delta must lie in (0,1)");
    detail::require(std::isfinite(alpha) && alpha > 1.0, "bound config: alpha must exceed 1");
  }
  double nd() const { return static_cast<double>(n); }
};

inline double clamp_unit(double v) {
  if (std::isnan(v)) return 1.0;
  return std::clamp(v, 0.0, 1.0);
}

inline bool is_vacuous(double bound) { return bound >= 1.0; }

/// ZCP scale sqrt(2n)/delta used by the Hoeffding-type bound.
inline double hoeffding_zcp_scale(const BoundConfig& cfg) {
  return std::sqrt(2.0 * cfg.nd()) / cfg.delta;
}

/// ZCP scale sqrt(2) n^2.5 / delta used by Comp_n.
inline double log_wealth_zcp_scale(const BoundConfig& cfg) {
  return std::numbers::sqrt2 * std::pow(cfg.nd(), 2.5) / cfg.delta;
}

/// (sqrt(2) D_ZCP + 2 + sqrt(ln(2 sqrt(n)/delta))) / sqrt(n), with D_ZCP
/// taken at c = sqrt(2n)/delta.
inline double hoeffding_zcp_bound(double d_zcp_at_c, const BoundConfig& cfg) {
  cfg.validate();
  detail::require(d_zcp_at_c >= 0.0, "hoeffding_zcp_bound: divergence must be >= 0");
  const double sn = std::sqrt(cfg.nd());
  const double confidence = std::sqrt(std::log(2.0 * sn / cfg.delta));
  return clamp_unit((std::numbers::sqrt2 * d_zcp_at_c + 2.0 + confidence) / sn);
}

/// sqrt((KL + ln(2 sqrt(n)/delta)) / (2n)).
inline double mcallester_baseline(double d_kl, const BoundConfig& cfg) {
  cfg.validate();
  detail::require(d_kl >= 0.0, "mcallester_baseline: divergence must be >= 0");
  const double sn = std::sqrt(cfg.nd());
  return clamp_unit(std::sqrt((d_kl + std::log(2.0 * sn / cfg.delta)) / (2.0 * cfg.nd())));
}

/// Comp_n(alpha): the log-wealth bound, with D_ZCP taken at
/// c = sqrt(2) n^2.5 / delta and D_alpha the Renyi divergence of order alpha.
inline double comp_n(double d_alpha, double d_zcp_at_c, const BoundConfig& cfg) {
  cfg.validate(2);
  detail::require(d_alpha >= 0.0 && d_zcp_at_c >= 0.0, "comp_n: divergences must be >= 0");
  const double n = cfg.nd();
  const double ratio = 4.0 * n * n / cfg.delta;
  const double order_coef = cfg.alpha / (cfg.alpha - 1.0);
  const double radius = std::log(ratio) + order_coef * std::log(n) + d_alpha;
  const double lead = d_zcp_at_c == 0.0 ? 0.0 : std::sqrt(radius) * d_zcp_at_c / std::numbers::sqrt2;
  return lead + std::log(2.0) + 2.0 + 0.5 * std::log(n) + std::log1p(ratio) +
         cfg.delta / (n * (n + 1.0));
}

/// sqrt(2 comp V) / (sqrt(n) - 2 comp/sqrt(n))_+ + 2 comp / (n - 2 comp)_+.
inline double empirical_bernstein_bound(double comp, double v_hat, std::int64_t n) {
  detail::require(comp >= 0.0 && v_hat >= 0.0, "empirical_bernstein_bound: inputs must be >= 0");
  detail::require(n >= 2, "empirical_bernstein_bound: n must be >= 2");
  const double nd = static_cast<double>(n);
  const double sn = std::sqrt(nd);
  auto ratio = [](double num, double den) {
    if (num == 0.0) return 0.0;
    return den > 0.0 ? num / den : kInf;
  };
  const double slow = ratio(std::sqrt(2.0 * comp * v_hat), sn - 2.0 * comp / sn);
  const double fast = ratio(2.0 * comp, nd - 2.0 * comp);
  return clamp_unit(slow + fast);
}

/// Row-major n x m losses: row i holds f(theta, X_i) for every atom theta.
struct LossMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  LossMatrix() = default;
  LossMatrix(std::size_t n, std::size_t m) : rows(n), cols(m), data(n * m, 0.0) {}
  double& at(std::size_t i, std::size_t theta) { return data[i * cols + theta]; }
  double at(std::size_t i, std::size_t theta) const { return data[i * cols + theta]; }
};

/// V(P) = 1/(n(n-1)) sum_{i<j} int (f(theta,X_i) - f(theta,X_j))^2 dP(theta),
/// using sum_{i<j} (a_i - a_j)^2 = n sum_i (a_i - mean a)^2 per atom.
inline double expected_sample_variance(const LossMatrix& losses,
                                       const DiscreteDistribution& posterior) {
  detail::require(losses.rows >= 2, "expected_sample_variance: need n >= 2");
  detail::require(posterior.size() == losses.cols,
                  "expected_sample_variance: posterior size must match loss columns");
  const double n = static_cast<double>(losses.rows);
  double acc = 0.0;
  for (std::size_t t = 0; t < losses.cols; ++t) {
    if (posterior[t] == 0.0) continue;
    double mean = 0.0;
    for (std::size_t i = 0; i < losses.rows; ++i) mean += losses.at(i, t);
    mean /= n;
    double ss = 0.0;
    for (std::size_t i = 0; i < losses.rows; ++i) {
      const double d = losses.at(i, t) - mean;
      ss += d * d;
    }
    acc += posterior[t] * n * ss;
  }
  return acc / (n * (n - 1.0));
}

/// Upper bound on the posterior-averaged true mean from the Bernoulli-kl budget comp/n.
inline double little_kl_mean_bound(double p_hat_mean, double comp, std::int64_t n) {
  detail::require(comp >= 0.0, "little_kl_mean_bound: comp must be >= 0");
  detail::require(n >= 2, "little_kl_mean_bound: n must be >= 2");
  return little_kl_inverse_upper(std::clamp(p_hat_mean, 0.0, 1.0), comp / static_cast<double>(n));
}

struct AsymptoticsCheck {
  double b_over_l = 0.0;
  double a_value = 0.0;
  bool holds = true;
};

/// Dominating log term L(n) = sqrt(2 ln n ln(en) ln(2 + 2 sqrt(2) n^4.5)).
inline double asymptotics_log_term(double n) {
  return std::sqrt(2.0 * std::log(n) * (1.0 + std::log(n)) *
                   std::log(2.0 + 2.0 * std::numbers::sqrt2 * std::pow(n, 4.5)));
}

/// Compares B_n / L(n) with A_n = 2 + (2 + sqrt(D_{alpha_n}))(D_ZCP(1) + D_TV),
/// where B_n is Comp_n at delta = 1/n^2, alpha_n = 1 + 1/ln n.
inline AsymptoticsCheck asymptotics_inequality_check(const DiscreteDistribution& p,
                                                     const DiscreteDistribution& p0,
                                                     std::int64_t n) {
  detail::require(n >= 25, "asymptotics_inequality_check: n must be >= 25");
  const double nd = static_cast<double>(n);
  BoundConfig cfg{n, 1.0 / (nd * nd), 1.0 + 1.0 / std::log(nd)};
  const double d_alpha = renyi_discrete(p, p0, cfg.alpha);
  const double d_zcp = zcp_discrete(p, p0, log_wealth_zcp_scale(cfg));
  if (!std::isfinite(d_alpha) || !std::isfinite(d_zcp)) return {kInf, kInf, true};
  const double b = comp_n(d_alpha, d_zcp, cfg);
  const double a = 2.0 + (2.0 + std::sqrt(d_alpha)) * (zcp_discrete(p, p0, 1.0) + tv_discrete(p, p0));
  const double b_over_l = b / asymptotics_log_term(nd);
  return {b_over_l, a, b_over_l <= a};
}

/// |y| sqrt(a ln(1 + a y^2 / b^2)) - b, an upper bound on the convex
/// conjugate of x -> b exp(x^2 / (2a)).
inline double fenchel_dual_bound(double a, double b, double y) {
  detail::require(a > 0.0 && b > 0.0, "fenchel_dual_bound: a and b must be > 0");
  return std::abs(y) * std::sqrt(a * std::log1p(a * y * y / (b * b))) - b;
}

/// sup_x (x y - b exp(x^2/(2a))), by bisection on the stationarity
/// condition y = (b x / a) exp(x^2/(2a)), whose root lies in [0, a|y|/b].
inline double fenchel_conjugate(double a, double b, double y) {
  detail::require(a > 0.0 && b > 0.0, "fenchel_conjugate: a and b must be > 0");
  const double ay = std::abs(y);
  if (ay == 0.0) return -b;
  double lo = 0.0, hi = a * ay / b;
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double g = b * mid / a * std::exp(mid * mid / (2.0 * a));
    (g < ay ? lo : hi) = mid;
  }
  auto value = [&](double x) { return x * ay - b * std::exp(x * x / (2.0 * a)); };
  return std::max(value(lo), value(hi));
}

/// ln(1 - |beta|) + |beta|, the quadratic coefficient in Fan's bound.
inline double fan_coefficient(double beta) {
  const double ab = std::abs(beta);
  return std::log1p(-ab) + ab;
}

/// max over beta in [-1,1] of a beta + b (ln(1 - |beta|) + |beta|), attained
/// at |beta| = |a| / (|a| + b); equals |a| - b ln(1 + |a|/b).
inline double max_fan_objective(double a, double b) {
  detail::require(b >= 0.0, "max_fan_objective: b must be >= 0");
  const double aa = std::abs(a);
  if (b == 0.0) return aa;
  return aa - b * std::log1p(aa / b);
}

struct InequalityCheck {
  std::string name;
  std::int64_t draws = 0;
  std::int64_t violations = 0;
  double worst_slack = kInf;  // min over draws of (rhs - lhs); >= 0 when all hold
  std::string worst_input;

  InequalityCheck() = default;
  explicit InequalityCheck(std::string check_name) : name(std::move(check_name)) {}

  bool passed() const { return violations == 0; }

  void record(double lhs, double rhs, double tol, const std::string& input) {
    ++draws;
    const double slack = rhs - lhs;
    if (slack < worst_slack) {
      worst_slack = slack;
      worst_input = input;
    }
    if (slack < -tol * std::max(1.0, std::abs(lhs))) ++violations;
  }
};

struct InequalitySuiteReport {
  std::vector<InequalityCheck> checks;
  bool passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.passed(); });
  }
};

/// Fuzzes Fan's bound ln(1 + beta x) >= beta x + (ln(1-|beta|) + |beta|) x^2,
/// the max-beta lemma max f >= a^2 / ((4/3)|a| + 2b), and the conjugate bound.
/// `inject_fault` reverses the first inequality so callers can verify that a
/// violation is detected.
inline InequalitySuiteReport analytic_inequality_suite(std::int64_t trials, std::uint64_t seed,
                                                       double tol = 1e-9,
                                                       bool inject_fault = false) {
  detail::require(trials >= 1, "analytic_inequality_suite: trials must be >= 1");
  std::mt19937_64 gen(seed);
  auto unit = [&] { return static_cast<double>(gen() >> 11) * 0x1.0p-53; };
  auto describe = [](std::initializer_list<std::pair<const char*, double>> kv) {
    std::ostringstream os;
    os.precision(17);
    bool first = true;
    for (const auto& [k, v] : kv) {
      os << (first ? "" : " ") << k << "=" << v;
      first = false;
    }
    return os.str();
  };

  InequalityCheck fan{"fan_log_lower"}, lemma{"max_beta_lemma"}, fenchel{"fenchel_dual"};
  for (std::int64_t t = 0; t < trials; ++t) {
    // Half the bets are pushed toward |beta| = 1, where the bound is tightest.
    double beta = 2.0 * unit() - 1.0;
    if (t % 2 == 1) beta = std::copysign(1.0 - std::pow(10.0, -8.0 * unit()), beta);
    if (t % 97 == 0) beta = 0.0;
    const double x = 2.0 * unit() - 1.0;
    const double fan_lhs = beta * x + fan_coefficient(beta) * x * x;
    const double fan_rhs = std::log1p(beta * x);
    if (inject_fault) {
      fan.record(fan_rhs, fan_lhs, tol, describe({{"beta", beta}, {"x", x}}));
    } else {
      fan.record(fan_lhs, fan_rhs, tol, describe({{"beta", beta}, {"x", x}}));
    }

    const double a = t % 89 == 0 ? 0.0 : 20.0 * unit() - 10.0;
    const double b = t % 83 == 0 ? 0.0 : 10.0 * unit();
    const double lemma_lhs = a == 0.0 ? 0.0 : a * a / (4.0 / 3.0 * std::abs(a) + 2.0 * b);
    lemma.record(lemma_lhs, max_fan_objective(a, b), tol, describe({{"a", a}, {"b", b}}));

    const double fa = 1e-3 + 10.0 * unit();
    const double fb = 1e-3 + 10.0 * unit();
    const double fy = 20.0 * unit() - 10.0;
    fenchel.record(fenchel_conjugate(fa, fb, fy), fenchel_dual_bound(fa, fb, fy), tol,
                   describe({{"a", fa}, {"b", fb}, {"y", fy}}));
  }
  return {{fan, lemma, fenchel}};
}

}  // namespace zcp
