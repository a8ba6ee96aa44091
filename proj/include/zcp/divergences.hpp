#pragma once

// Exact discrete divergences, quadrature-based divergences of the Gaussian
// mixture pair, the Bernoulli kl and its upper inverse, and the closed-form
// upper bounds that relate ZCP to KL and TV.

#include <algorithm>
#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "zcp/distributions.hpp"
#include "zcp/error.hpp"
#include "zcp/numeric.hpp"
#include "zcp/quadrature.hpp"

namespace zcp {

enum class DivergenceKind { KL, TV, Renyi, ZCP, LittleKL };

inline std::string to_string(DivergenceKind k) {
  switch (k) {
    case DivergenceKind::KL: return "kl";
    case DivergenceKind::TV: return "tv";
    case DivergenceKind::Renyi: return "renyi";
    case DivergenceKind::ZCP: return "zcp";
    case DivergenceKind::LittleKL: return "little-kl";
  }
  return "unknown";
}

/// Which divergence to evaluate; alpha applies to Renyi, c to ZCP.
struct DivergenceSpec {
  DivergenceKind kind = DivergenceKind::KL;
  double alpha = 0.0;
  double c = 0.0;

  static DivergenceSpec kl() { return {DivergenceKind::KL, 0.0, 0.0}; }
  static DivergenceSpec tv() { return {DivergenceKind::TV, 0.0, 0.0}; }
  static DivergenceSpec renyi(double alpha) { return {DivergenceKind::Renyi, alpha, 0.0}; }
  static DivergenceSpec zcp(double c) { return {DivergenceKind::ZCP, 0.0, c}; }
};

struct DivergenceValue {
  DivergenceSpec spec;
  double value = 0.0;
  double abs_error = 0.0;
};

namespace detail {

inline void require_same_support(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  require(p.size() == q.size(), "divergence: support sizes differ");
}

inline void require_renyi_order(double alpha) {
  require(std::isfinite(alpha) && alpha > 0.0, "renyi: alpha must be > 0");
  require(alpha != 1.0, "renyi: alpha = 1 is the KL divergence, use kl_discrete");
}

// |p - q| from the weights and lr = ln(p/q), without forming r.
inline double abs_diff(double p, double q, double lr) {
  if (lr > 0.0) return p * -std::expm1(-lr);
  return q * -std::expm1(lr);
}

// |r - 1| sqrt(ln(1 + c^2 (r - 1)^2)) weighted by q, given lr = ln r.
inline double zcp_term(double p, double q, double lr, double log_c) {
  if (lr == 0.0 || log_c == -kInf) return 0.0;
  const double log_factor = log1p_sq_from_log(log_c + log_abs_expm1(lr));
  return abs_diff(p, q, lr) * std::sqrt(log_factor);
}

}  // namespace detail

/// sum_i p_i ln(p_i / q_i); +inf when some q_i = 0 < p_i.
inline double kl_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::require_same_support(p, q);
  const auto lp = p.log_weights();
  const auto lq = q.log_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (lp[i] == -kInf) continue;
    if (lq[i] == -kInf) return kInf;
    acc += p[i] * (lp[i] - lq[i]);
  }
  return std::max(acc, 0.0);
}

inline double tv_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q) {
  detail::require_same_support(p, q);
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) acc += std::abs(p[i] - q[i]);
  return std::min(0.5 * acc, 1.0);
}

/// (1/(alpha-1)) ln sum_i p_i^alpha q_i^(1-alpha), accumulated in log space.
inline double renyi_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q,
                             double alpha) {
  detail::require_same_support(p, q);
  detail::require_renyi_order(alpha);
  const auto lp = p.log_weights();
  const auto lq = q.log_weights();
  std::vector<double> terms;
  terms.reserve(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (lp[i] == -kInf) continue;
    if (lq[i] == -kInf) {
      if (alpha > 1.0) return kInf;
      continue;
    }
    terms.push_back(alpha * lp[i] + (1.0 - alpha) * lq[i]);
  }
  const double lse = log_sum_exp(terms);
  if (lse == -kInf) return kInf;  // disjoint supports, alpha < 1
  return std::max(lse / (alpha - 1.0), 0.0);
}

/// sum_i q_i |r_i - 1| sqrt(ln(1 + c^2 (r_i - 1)^2)) with r_i = p_i/q_i.
/// `ln_ratio_override` supplies ln(p_i/q_i) per atom when it is known more
/// precisely than the stored log-weights give it.
inline double zcp_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q, double c,
                           std::optional<std::span<const double>> ln_ratio_override = {}) {
  detail::require_same_support(p, q);
  detail::require(std::isfinite(c) && c >= 0.0, "zcp: c must be finite and >= 0");
  if (ln_ratio_override) {
    detail::require(ln_ratio_override->size() == p.size(), "zcp: override length mismatch");
  }
  if (c == 0.0) return 0.0;
  const double log_c = std::log(c);
  const auto lp = p.log_weights();
  const auto lq = q.log_weights();
  double acc = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (lp[i] == -kInf && lq[i] == -kInf) continue;
    if (lq[i] == -kInf) return kInf;
    const double lr = ln_ratio_override ? (*ln_ratio_override)[i] : lp[i] - lq[i];
    acc += detail::zcp_term(p[i], q[i], lr, log_c);
  }
  return acc;
}

inline double zcp_discrete(const DiscreteDistribution& p, const DiscreteDistribution& q, double c,
                           std::span<const double> ln_ratio_override) {
  return zcp_discrete(p, q, c, std::optional<std::span<const double>>(ln_ratio_override));
}

/// Breakpoints seeding the quadrature: a fine lattice on the narrow
/// component's scale and a coarser one on the wide component's scale.
inline std::vector<double> gaussian_breakpoints(const GaussianMixturePair& g, double half_width) {
  const double lo = g.mu - half_width * g.sigma1;
  const double hi = g.mu + half_width * g.sigma1;
  std::vector<double> pts{lo, hi};
  auto lattice = [&](double step, int count) {
    for (int k = -count; k <= count; ++k) {
      const double x = g.mu + k * step;
      if (x > lo && x < hi) pts.push_back(x);
    }
  };
  lattice(0.5 * g.sigma2, 32);
  lattice(0.5 * g.sigma1, static_cast<int>(std::ceil(2.0 * half_width)));
  std::sort(pts.begin(), pts.end());
  const double min_gap = 1e-9 * std::min(g.sigma1, g.sigma2);
  std::vector<double> out;
  for (double x : pts) {
    if (out.empty() || x - out.back() > min_gap) out.push_back(x);
  }
  return out;
}

/// Divergence between the mixture P and its narrow component Q, integrated
/// over [mu - L sigma1, mu + L sigma1].
inline DivergenceValue divergence_gaussian(const GaussianMixturePair& g, const DivergenceSpec& spec,
                                           const QuadratureConfig& cfg = {}) {
  cfg.validate();
  const auto bps = gaussian_breakpoints(g, cfg.half_width_in_sigma1);
  auto run = [&](auto&& integrand) {
    return integrate_adaptive(integrand, bps, cfg.rel_tol, cfg.max_subdivisions);
  };
  DivergenceValue out{spec, 0.0, 0.0};
  switch (spec.kind) {
    case DivergenceKind::KL: {
      const auto r = run([&](double x) {
        const double lp = log_p_density(g, x);
        return lp == -kInf ? 0.0 : std::exp(lp) * density_ratio_log(g, x);
      });
      out.value = std::max(r.value, 0.0);
      out.abs_error = r.abs_error;
      break;
    }
    case DivergenceKind::TV: {
      const auto r = run([&](double x) {
        return 0.5 * detail::abs_diff(std::exp(log_p_density(g, x)), std::exp(log_q_density(g, x)),
                                      density_ratio_log(g, x));
      });
      out.value = std::clamp(r.value, 0.0, 1.0);
      out.abs_error = r.abs_error;
      break;
    }
    case DivergenceKind::ZCP: {
      detail::require(std::isfinite(spec.c) && spec.c >= 0.0, "zcp: c must be finite and >= 0");
      if (spec.c == 0.0) break;
      const double log_c = std::log(spec.c);
      const auto r = run([&](double x) {
        return detail::zcp_term(std::exp(log_p_density(g, x)), std::exp(log_q_density(g, x)),
                                density_ratio_log(g, x), log_c);
      });
      out.value = std::max(r.value, 0.0);
      out.abs_error = r.abs_error;
      break;
    }
    case DivergenceKind::Renyi: {
      detail::require_renyi_order(spec.alpha);
      const double a = spec.alpha;
      // p^a q^(1-a) ~ exp(x^2 ((a-1)/sigma2^2 - a/sigma1^2) / 2) in the tails.
      if (a > 1.0 && g.p > 0.0 &&
          (a - 1.0) / (g.sigma2 * g.sigma2) >= a / (g.sigma1 * g.sigma1)) {
        out.value = kInf;
        out.abs_error = 0.0;
        break;
      }
      const auto integrand = [&](double x) {
        return std::exp(log_q_density(g, x) + a * density_ratio_log(g, x));
      };
      auto r = run(integrand);
      // The log maps an absolute error e on the integral I to e / (I |a-1|)
      // on the divergence, so tighten until that meets the divergence budget.
      const double d0 = std::max(std::log(r.value) / (a - 1.0), 0.0);
      const double budget = 0.5 * (cfg.rel_tol * d0 + 1e-12) * std::abs(a - 1.0) * r.value;
      if (r.abs_error / (r.value * std::abs(a - 1.0)) > cfg.rel_tol * d0 + 1e-12) {
        r = integrate_adaptive(integrand, bps, budget / r.value, cfg.max_subdivisions, 0.1 * budget);
      }
      out.value = std::max(std::log(r.value) / (a - 1.0), 0.0);
      out.abs_error = r.abs_error / (r.value * std::abs(a - 1.0));
      break;
    }
    case DivergenceKind::LittleKL:
      throw ValidationError("divergence_gaussian: little-kl applies to Bernoulli means only");
  }
  return out;
}

/// Bernoulli kl(p_hat || q) with 0 ln 0 = 0.
inline double little_kl(double p_hat, double q) {
  detail::require(p_hat >= 0.0 && p_hat <= 1.0, "little_kl: p_hat must lie in [0,1]");
  detail::require(q >= 0.0 && q <= 1.0, "little_kl: q must lie in [0,1]");
  double acc = 0.0;
  if (p_hat > 0.0) {
    if (q == 0.0) return kInf;
    acc += p_hat * (std::log(p_hat) - std::log(q));
  }
  if (p_hat < 1.0) {
    if (q == 1.0) return kInf;
    acc += (1.0 - p_hat) * (std::log1p(-p_hat) - std::log1p(-q));
  }
  return std::max(acc, 0.0);
}

/// Largest q in [p_hat, 1] with kl(p_hat || q) <= budget.
///
/// Bisects on s = -ln(1 - q), in which kl has bounded slope, so the answer
/// is resolved to double precision even when q sits close to 1.
inline double little_kl_inverse_upper(double p_hat, double budget) {
  detail::require(p_hat >= 0.0 && p_hat <= 1.0, "little_kl_inverse_upper: p_hat must lie in [0,1]");
  detail::require(budget >= 0.0 && !std::isnan(budget),
                  "little_kl_inverse_upper: budget must be >= 0");
  if (budget == 0.0) return p_hat;
  if (p_hat == 1.0) return 1.0;
  if (p_hat == 0.0) return -std::expm1(-budget);
  if (little_kl(p_hat, std::nextafter(1.0, 0.0)) <= budget) return 1.0;

  auto q_of = [](double s) { return -std::expm1(-s); };
  auto kl_of = [&](double s) {
    return p_hat * (std::log(p_hat) - std::log1p(-std::exp(-s))) +
           (1.0 - p_hat) * (std::log1p(-p_hat) + s);
  };
  double lo = -std::log1p(-p_hat);
  double hi = lo + 1.0;
  while (kl_of(hi) <= budget) hi = lo + 2.0 * (hi - lo);
  for (int it = 0; it < 400; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (kl_of(mid) <= budget ? lo : hi) = mid;
  }
  return std::clamp(q_of(lo), p_hat, 1.0);
}

/// 2 sqrt(2 tv kl) + sqrt(2 ln(1 + c)) tv.
inline double zcp_upper_bound_kl_tv(double kl, double tv, double c) {
  detail::require(kl >= 0.0 && tv >= 0.0 && tv <= 1.0 && c >= 0.0,
                  "zcp_upper_bound_kl_tv: need kl >= 0, tv in [0,1], c >= 0");
  return 2.0 * std::sqrt(2.0 * tv * kl) + std::sqrt(2.0 * std::log1p(c)) * tv;
}

/// zcp(c=1) + 2 sqrt(ln(2 + 2c)) tv.
inline double zcp_c_shift_bound(double zcp_at_1, double tv, double c) {
  detail::require(zcp_at_1 >= 0.0 && tv >= 0.0 && c >= 0.0,
                  "zcp_c_shift_bound: inputs must be >= 0");
  return zcp_at_1 + 2.0 * std::sqrt(std::log(2.0 + 2.0 * c)) * tv;
}

/// zcp(c=1) + 2 sqrt(ln(2 + 2c^2)) tv. The log factor of the divergence
/// carries c^2, so this is the shift obtained from
/// ln(1 + k x^2) <= ln(1 + x^2) + ln(2 + 2k) at k = c^2. Unlike
/// zcp_c_shift_bound it holds for every c >= 0.
inline double zcp_c_shift_bound_corrected(double zcp_at_1, double tv, double c) {
  detail::require(zcp_at_1 >= 0.0 && tv >= 0.0 && c >= 0.0,
                  "zcp_c_shift_bound_corrected: inputs must be >= 0");
  return zcp_at_1 + 2.0 * std::sqrt(std::log(2.0 + 2.0 * c * c)) * tv;
}

/// sqrt(8 tv kl), an upper bound on zcp at c = 1.
inline double zcp1_upper_bound_kl_tv(double kl, double tv) {
  detail::require(kl >= 0.0 && tv >= 0.0, "zcp1_upper_bound_kl_tv: inputs must be >= 0");
  return std::sqrt(8.0 * tv * kl);
}

}  // namespace zcp
