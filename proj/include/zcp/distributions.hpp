#pragma once

// Finite-support distributions, the two-atom and block-structured instance
// families where ZCP beats KL, and the Gaussian scale-mixture pair.
//
// Ratios in these families reach e^(d^1.5), so every discrete distribution
// carries its log-weights next to its weights. Divergences read ratios from
// the log-weights; an atom whose weight underflows to 0 keeps a finite
// log-weight and is not mistaken for a support hole.

#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "zcp/error.hpp"
#include "zcp/numeric.hpp"

namespace zcp {

class DiscreteDistribution {
 public:
  /// Normalizes nonnegative weights. Throws ValidationError on an empty
  /// vector, a negative or non-finite entry, or an all-zero vector.
  static DiscreteDistribution from_weights(std::vector<double> weights) {
    detail::require(!weights.empty(), "distribution needs at least one atom");
    double total = 0.0;
    for (double w : weights) {
      detail::require(std::isfinite(w), "weights must be finite");
      detail::require(w >= 0.0, "weights must be nonnegative");
      total += w;
    }
    detail::require(total > 0.0, "weights must not all be zero");
    std::vector<double> logs(weights.size());
    for (std::size_t i = 0; i < weights.size(); ++i) {
      weights[i] /= total;
      logs[i] = weights[i] > 0.0 ? std::log(weights[i]) : -kInf;
    }
    return DiscreteDistribution(std::move(weights), std::move(logs));
  }

  /// Builds from unnormalized log-weights (-inf marks a zero atom).
  static DiscreteDistribution from_log_weights(std::vector<double> log_weights) {
    detail::require(!log_weights.empty(), "distribution needs at least one atom");
    for (double lw : log_weights) {
      detail::require(!std::isnan(lw) && lw != kInf, "log-weights must be < +inf");
    }
    const double norm = log_sum_exp(log_weights);
    detail::require(norm != -kInf, "log-weights must not all be -inf");
    std::vector<double> weights(log_weights.size());
    for (std::size_t i = 0; i < log_weights.size(); ++i) {
      log_weights[i] -= norm;
      weights[i] = std::exp(log_weights[i]);
    }
    return DiscreteDistribution(std::move(weights), std::move(log_weights));
  }

  std::size_t size() const noexcept { return weights_.size(); }
  std::span<const double> weights() const noexcept { return weights_; }
  std::span<const double> log_weights() const noexcept { return log_weights_; }
  double operator[](std::size_t i) const { return weights_[i]; }

  friend bool operator==(const DiscreteDistribution& a, const DiscreteDistribution& b) {
    return a.log_weights_ == b.log_weights_;
  }

 private:
  DiscreteDistribution(std::vector<double> w, std::vector<double> lw)
      : weights_(std::move(w)), log_weights_(std::move(lw)) {}

  std::vector<double> weights_;
  std::vector<double> log_weights_;
};

using DistributionPair = std::pair<DiscreteDistribution, DiscreteDistribution>;

inline DiscreteDistribution make_discrete(std::vector<double> weights) {
  return DiscreteDistribution::from_weights(std::move(weights));
}

namespace detail {

// Two-block layout shared by the Bernoulli and multivariate instances:
// `half` atoms of weight p/a followed by `half` atoms sharing the rest.
// P is the same layout evaluated at log_a = 0, so a forced ln a = 0 yields
// bit-identical P and Q.
inline std::vector<double> block_log_weights(std::size_t half, double log_p, double log_a) {
  const double log_half = std::log(static_cast<double>(half));
  const double log_head = log_p - log_a;
  const double log_tail = std::log1p(-std::exp(log_head + log_half)) - log_half;
  std::vector<double> out(2 * half);
  for (std::size_t i = 0; i < half; ++i) {
    out[i] = log_head;
    out[half + i] = log_tail;
  }
  return out;
}

}  // namespace detail

/// P = (p, 1-p), Q = (p/a, 1-p/a) with a passed as ln(a) >= 0.
inline DistributionPair bernoulli_instance(double p, double log_a) {
  detail::require(p > 0.0 && p < 1.0, "bernoulli_instance: p must lie in (0,1)");
  detail::require(std::isfinite(log_a) && log_a >= 0.0,
                  "bernoulli_instance: ln(a) must be finite and >= 0");
  const double log_p = std::log(p);
  return {DiscreteDistribution::from_log_weights(detail::block_log_weights(1, log_p, 0.0)),
          DiscreteDistribution::from_log_weights(detail::block_log_weights(1, log_p, log_a))};
}

/// Support-d instance with p = d^(-1-u) and ln a = d^(1.5u). The first d/2
/// atoms carry p (resp. p/a); the remaining mass is spread evenly over the
/// last d/2. `log_a_override` replaces d^(1.5u), e.g. 0 to force P = Q.
inline DistributionPair multivariate_instance(int d, double u,
                                              std::optional<double> log_a_override = {}) {
  detail::require(d >= 2 && d % 2 == 0, "multivariate_instance: d must be even and >= 2");
  detail::require(std::isfinite(u) && u > 0.0, "multivariate_instance: u must be > 0");
  const double dd = static_cast<double>(d);
  const double log_p = -(1.0 + u) * std::log(dd);
  detail::require(std::exp(log_p) * dd / 2.0 < 1.0, "multivariate_instance: p*d/2 must be < 1");
  const double log_a = log_a_override.value_or(std::pow(dd, 1.5 * u));
  detail::require(std::isfinite(log_a) && log_a >= 0.0,
                  "multivariate_instance: ln(a) must be finite and >= 0");
  const auto half = static_cast<std::size_t>(d / 2);
  return {DiscreteDistribution::from_log_weights(detail::block_log_weights(half, log_p, 0.0)),
          DiscreteDistribution::from_log_weights(detail::block_log_weights(half, log_p, log_a))};
}

/// P = p N(mu, sigma1^2) + (1-p) N(mu, sigma2^2), Q = N(mu, sigma2^2).
struct GaussianMixturePair {
  double mu = 0.0;
  double sigma1 = 1.0;
  double sigma2 = 1.0;
  double p = 0.0;

  static GaussianMixturePair make(double mu, double sigma1, double sigma2, double p) {
    detail::require(std::isfinite(mu), "gaussian pair: mu must be finite");
    detail::require(std::isfinite(sigma1) && sigma1 > 0.0, "gaussian pair: sigma1 must be > 0");
    detail::require(std::isfinite(sigma2) && sigma2 > 0.0, "gaussian pair: sigma2 must be > 0");
    detail::require(p >= 0.0 && p <= 1.0, "gaussian pair: p must lie in [0,1]");
    return {mu, sigma1, sigma2, p};
  }
};

inline double log_normal_pdf(double x, double mu, double sigma) {
  const double z = (x - mu) / sigma;
  return -0.5 * z * z - std::log(sigma) - 0.5 * std::log(2.0 * std::numbers::pi);
}

/// sigma2 = sigma1 * p^exponent, mu = 0, exponent in {1, 0.75}.
inline GaussianMixturePair gaussian_instance(double p, double sigma1, double exponent) {
  detail::require(p > 0.0 && p < 1.0, "gaussian_instance: p must lie in (0,1)");
  detail::require(exponent == 1.0 || exponent == 0.75,
                  "gaussian_instance: exponent must be 1 or 0.75");
  return GaussianMixturePair::make(0.0, sigma1, sigma1 * std::pow(p, exponent), p);
}

inline double log_q_density(const GaussianMixturePair& g, double x) {
  return log_normal_pdf(x, g.mu, g.sigma2);
}

/// ln(dP/dQ)(x), assembled as ln(p * phi1/phi2 + (1-p)) with the component
/// ratio kept in log form.
inline double density_ratio_log(const GaussianMixturePair& g, double x) {
  detail::require(std::isfinite(x), "density_ratio_log: x must be finite");
  const double z = x - g.mu;
  const double log_component_ratio = std::log(g.sigma2 / g.sigma1) -
                                     0.5 * z * z / (g.sigma1 * g.sigma1) +
                                     0.5 * z * z / (g.sigma2 * g.sigma2);
  const double log_wide = g.p > 0.0 ? std::log(g.p) + log_component_ratio : -kInf;
  const double log_narrow = g.p < 1.0 ? std::log1p(-g.p) : -kInf;
  return log_add_exp(log_wide, log_narrow);
}

inline double log_p_density(const GaussianMixturePair& g, double x) {
  const double wide = g.p > 0.0 ? std::log(g.p) + log_normal_pdf(x, g.mu, g.sigma1) : -kInf;
  const double narrow = g.p < 1.0 ? std::log1p(-g.p) + log_normal_pdf(x, g.mu, g.sigma2) : -kInf;
  return log_add_exp(wide, narrow);
}

}  // namespace zcp
