#pragma once

// Monte Carlo and deterministic experiments over finite parameter sets:
// bound coverage, the multivariate scaling table, the Gaussian mixture
// check, Ville crossings, bound tightness, and the end-to-end self check.
//
// Trial t always draws from Stream(seed, t), so results do not depend on the
// number of worker threads or the order in which trials finish.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "zcp/betting.hpp"
#include "zcp/bounds.hpp"
#include "zcp/distributions.hpp"
#include "zcp/divergences.hpp"
#include "zcp/error.hpp"
#include "zcp/numeric.hpp"
#include "zcp/quadrature.hpp"
#include "zcp/stats.hpp"

namespace zcp {

/// Runs fn(i) for i in [0, count) on up to `threads` workers (0 = hardware
/// concurrency). The first exception thrown by any call is rethrown.
template <class F>
void parallel_for(std::int64_t count, unsigned threads, F&& fn) {
  if (count <= 0) return;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::int64_t>(threads, count));
  if (threads == 1) {
    for (std::int64_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto worker = [&] {
    for (;;) {
      const std::int64_t i = next.fetch_add(1);
      if (i >= count) return;
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(count);
        return;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

enum class LossKind { AbsDistance, Bernoulli };
enum class PosteriorKind { Fixed, Gibbs };

inline std::string to_string(LossKind k) { return k == LossKind::AbsDistance ? "abs" : "bernoulli"; }
inline std::string to_string(PosteriorKind k) { return k == PosteriorKind::Fixed ? "fixed" : "gibbs"; }

/// Finite parameter set theta = 0..m-1 with losses in [0,1].
///
/// AbsDistance: f(theta, x) = |theta/m - x| with x ~ U[0,1].
/// Bernoulli: f(theta, x) = 1{x < mu_theta} with one shared x ~ U[0,1] per
/// sample, so each column is Bernoulli(mu_theta).
struct LearningInstance {
  std::size_t m = 50;
  DiscreteDistribution prior = DiscreteDistribution::from_weights({1.0});
  LossKind loss_kind = LossKind::AbsDistance;
  std::vector<double> means;  // mu_theta, Bernoulli only
  PosteriorKind posterior_kind = PosteriorKind::Gibbs;
  double eta = 5.0;
  std::optional<DiscreteDistribution> fixed_posterior;  // defaults to the prior

  /// Uniform prior; Bernoulli means (theta + 1/2)/m.
  static LearningInstance make(std::size_t m, LossKind loss, PosteriorKind rule, double eta = 0.0) {
    detail::require(m >= 1 && m <= 10000, "learning instance: m must lie in [1, 10000]");
    LearningInstance inst;
    inst.m = m;
    inst.prior = DiscreteDistribution::from_weights(std::vector<double>(m, 1.0));
    inst.loss_kind = loss;
    inst.posterior_kind = rule;
    inst.eta = eta;
    if (loss == LossKind::Bernoulli) {
      inst.means.resize(m);
      for (std::size_t t = 0; t < m; ++t) {
        inst.means[t] = (static_cast<double>(t) + 0.5) / static_cast<double>(m);
      }
    }
    inst.validate();
    return inst;
  }

  void validate() const {
    detail::require(m >= 1 && m <= 10000, "learning instance: m must lie in [1, 10000]");
    detail::require(prior.size() == m, "learning instance: prior must have m atoms");
    if (loss_kind == LossKind::Bernoulli) {
      detail::require(means.size() == m, "learning instance: need one Bernoulli mean per atom");
      for (double mu : means) {
        detail::require(mu >= 0.0 && mu <= 1.0, "learning instance: Bernoulli means must lie in [0,1]");
      }
    }
    detail::require(std::isfinite(eta) && eta >= 0.0, "learning instance: eta must be >= 0");
    if (fixed_posterior) {
      detail::require(fixed_posterior->size() == m, "learning instance: posterior must have m atoms");
      for (std::size_t t = 0; t < m; ++t) {
        detail::require(!((*fixed_posterior)[t] > 0.0 && prior[t] == 0.0),
                        "learning instance: posterior must be absolutely continuous w.r.t. the prior");
      }
    }
  }

  double loss(std::size_t theta, double x) const {
    if (loss_kind == LossKind::AbsDistance) {
      return std::abs(static_cast<double>(theta) / static_cast<double>(m) - x);
    }
    return x < means[theta] ? 1.0 : 0.0;
  }

  /// E f(theta, X_1).
  double true_mean(std::size_t theta) const {
    if (loss_kind == LossKind::AbsDistance) {
      const double c = static_cast<double>(theta) / static_cast<double>(m);
      return c * c - c + 0.5;
    }
    return means[theta];
  }

  /// P_n from the empirical means; Gibbs: dP_n ∝ dP_0 exp(-eta n mu_hat).
  DiscreteDistribution posterior(std::span<const double> empirical_means, std::int64_t n) const {
    if (posterior_kind == PosteriorKind::Fixed) return fixed_posterior.value_or(prior);
    if (eta == 0.0) return prior;
    std::vector<double> lw(prior.log_weights().begin(), prior.log_weights().end());
    const double scale = eta * static_cast<double>(n);
    for (std::size_t t = 0; t < m; ++t) lw[t] -= scale * empirical_means[t];
    return DiscreteDistribution::from_log_weights(std::move(lw));
  }
};

struct BoundReport {
  double d_kl = 0.0;
  double d_tv = 0.0;
  double d_alpha = 0.0;
  double d_zcp_thm1 = 0.0;  // at c = sqrt(2n)/delta
  double d_zcp_thm2 = 0.0;  // at c = sqrt(2) n^2.5/delta
  double comp_n = 0.0;
  double hoeffding_zcp = 1.0;
  double mcallester = 1.0;
  double emp_bernstein = 1.0;
  double little_kl_bound = 1.0;
  double realized_gap = 0.0;  // int (mu_hat - mu) dP_n
  double v_hat = 0.0;
  double p_hat_mean = 0.0;
  double p_mean = 0.0;
};

/// Every bound of `report` computed from the given divergences and posterior statistics.
inline BoundReport assemble_bounds(BoundReport r, const BoundConfig& cfg) {
  r.comp_n = comp_n(r.d_alpha, r.d_zcp_thm2, cfg);
  r.hoeffding_zcp = hoeffding_zcp_bound(r.d_zcp_thm1, cfg);
  r.mcallester = mcallester_baseline(r.d_kl, cfg);
  r.emp_bernstein = empirical_bernstein_bound(r.comp_n, r.v_hat, cfg.n);
  r.little_kl_bound = little_kl_mean_bound(r.p_hat_mean, r.comp_n, cfg.n);
  return r;
}

/// Draws n samples from `stream` and evaluates every bound against the exact gap.
inline BoundReport evaluate_trial(const LearningInstance& inst, const BoundConfig& cfg, Stream& stream) {
  const auto n = static_cast<std::size_t>(cfg.n);
  const std::size_t m = inst.m;
  LossMatrix losses(n, m);
  std::vector<double> mu_hat(m, 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = stream.uniform();
    for (std::size_t t = 0; t < m; ++t) {
      const double f = inst.loss(t, x);
      losses.at(i, t) = f;
      mu_hat[t] += f;
    }
  }
  for (double& v : mu_hat) v /= static_cast<double>(n);

  const DiscreteDistribution post = inst.posterior(mu_hat, cfg.n);
  BoundReport r;
  for (std::size_t t = 0; t < m; ++t) {
    r.p_hat_mean += post[t] * mu_hat[t];
    r.p_mean += post[t] * inst.true_mean(t);
    r.realized_gap += post[t] * (mu_hat[t] - inst.true_mean(t));
  }
  r.d_kl = kl_discrete(post, inst.prior);
  r.d_tv = tv_discrete(post, inst.prior);
  r.d_alpha = renyi_discrete(post, inst.prior, cfg.alpha);
  r.d_zcp_thm1 = zcp_discrete(post, inst.prior, hoeffding_zcp_scale(cfg));
  r.d_zcp_thm2 = zcp_discrete(post, inst.prior, log_wealth_zcp_scale(cfg));
  r.v_hat = expected_sample_variance(losses, post);
  return assemble_bounds(r, cfg);
}

struct BoundCoverage {
  std::string name;
  std::int64_t failures = 0;
  double rate = 0.0;
  double wilson_upper_99 = 0.0;
};

struct CoverageReport {
  std::int64_t trials = 0;
  double delta_budget = 0.0;  // 2 delta
  std::vector<BoundCoverage> bounds;
  std::vector<std::pair<std::int64_t, BoundReport>> failure_events;  // (trial, report)
  std::vector<BoundReport> reports;                                  // by trial index

  const BoundCoverage& at(const std::string& name) const {
    for (const auto& b : bounds) {
      if (b.name == name) return b;
    }
    throw ValidationError("coverage report: unknown bound " + name);
  }
  bool passed(const std::string& name) const { return at(name).wilson_upper_99 <= delta_budget; }
  bool passed() const {
    return std::all_of(bounds.begin(), bounds.end(),
                       [&](const auto& b) { return b.wilson_upper_99 <= delta_budget; });
  }
};

inline const std::vector<std::string>& coverage_bound_names() {
  static const std::vector<std::string> names{"hoeffding_zcp", "mcallester", "emp_bernstein",
                                              "little_kl"};
  return names;
}

/// Failure flags in coverage_bound_names() order. The Hoeffding and KL
/// bounds are one-sided on the gap, the empirical-Bernstein bound controls
/// |gap|, and the kl bound is an upper bound on the posterior-averaged mean.
inline std::vector<bool> coverage_failures(const BoundReport& r) {
  return {r.realized_gap > r.hoeffding_zcp, r.realized_gap > r.mcallester,
          std::abs(r.realized_gap) > r.emp_bernstein, r.p_mean > r.little_kl_bound};
}

inline CoverageReport run_coverage(const LearningInstance& inst, const BoundConfig& cfg,
                                   std::int64_t trials, std::uint64_t seed, unsigned threads = 0) {
  inst.validate();
  cfg.validate(2);
  detail::require(trials >= 100, "run_coverage: trials must be >= 100");

  CoverageReport out;
  out.trials = trials;
  out.delta_budget = 2.0 * cfg.delta;
  out.reports.resize(static_cast<std::size_t>(trials));
  parallel_for(trials, threads, [&](std::int64_t t) {
    Stream stream(seed, static_cast<std::uint64_t>(t));
    out.reports[static_cast<std::size_t>(t)] = evaluate_trial(inst, cfg, stream);
  });

  const auto& names = coverage_bound_names();
  std::vector<std::int64_t> counts(names.size(), 0);
  for (std::int64_t t = 0; t < trials; ++t) {
    const auto& r = out.reports[static_cast<std::size_t>(t)];
    const auto flags = coverage_failures(r);
    bool any = false;
    for (std::size_t k = 0; k < flags.size(); ++k) {
      if (flags[k]) {
        ++counts[k];
        any = true;
      }
    }
    if (any) out.failure_events.emplace_back(t, r);
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    out.bounds.push_back({names[k], counts[k],
                          static_cast<double>(counts[k]) / static_cast<double>(trials),
                          wilson_upper(counts[k], trials)});
  }
  return out;
}

struct ScalingRow {
  int d = 0;
  double kl = 0.0;
  double tv = 0.0;
  double zcp1 = 0.0;
  double kl_ratio = 0.0;    // kl / d^(u/2)
  double tv_ratio = 0.0;    // tv / d^(-u)
  double zcp_ratio = 0.0;   // zcp1 / d^(-u/4)
  bool lemma_holds = true;  // zcp1 <= sqrt(8 tv kl)
};

struct ScalingTable {
  double u = 1.0;
  std::vector<ScalingRow> rows;
  double kl_slope = kNaN;
  double tv_slope = kNaN;
  double zcp_slope = kNaN;
  double slope_tolerance = 0.15;

  double expected_kl_slope() const { return u / 2.0; }
  double expected_tv_slope() const { return -u; }
  double expected_zcp_slope() const { return -u / 4.0; }
  bool slopes_pass() const {
    return std::abs(kl_slope - expected_kl_slope()) <= slope_tolerance &&
           std::abs(tv_slope - expected_tv_slope()) <= slope_tolerance &&
           std::abs(zcp_slope - expected_zcp_slope()) <= slope_tolerance;
  }
  bool passed() const {
    return slopes_pass() &&
           std::all_of(rows.begin(), rows.end(), [](const auto& r) { return r.lemma_holds; });
  }
};

namespace detail {

inline void require_d_grid(std::span<const int> d_values) {
  require(!d_values.empty(), "d grid must not be empty");
  for (std::size_t i = 0; i < d_values.size(); ++i) {
    require(d_values[i] >= 4 && d_values[i] % 2 == 0, "d values must be even and >= 4");
    require(i == 0 || d_values[i] > d_values[i - 1], "d values must be increasing");
  }
}

}  // namespace detail

/// Exact divergences of the support-d instance and log-log slopes fitted over
/// the upper half of the grid (indices size/2 onward).
inline ScalingTable divergence_scaling_table(double u, std::span<const int> d_values,
                                             std::optional<double> log_a_override = {}) {
  detail::require(std::isfinite(u) && u > 0.0, "scaling table: u must be > 0");
  detail::require_d_grid(d_values);
  ScalingTable table;
  table.u = u;
  for (int d : d_values) {
    const auto [p, q] = multivariate_instance(d, u, log_a_override);
    ScalingRow row;
    row.d = d;
    row.kl = kl_discrete(p, q);
    row.tv = tv_discrete(p, q);
    row.zcp1 = zcp_discrete(p, q, 1.0);
    const double dd = static_cast<double>(d);
    row.kl_ratio = row.kl / std::pow(dd, u / 2.0);
    row.tv_ratio = row.tv / std::pow(dd, -u);
    row.zcp_ratio = row.zcp1 / std::pow(dd, -u / 4.0);
    row.lemma_holds = row.zcp1 <= zcp1_upper_bound_kl_tv(row.kl, row.tv) * (1.0 + 1e-12) + 1e-300;
    table.rows.push_back(row);
  }
  const std::size_t start = table.rows.size() / 2;
  if (table.rows.size() - start >= 2) {
    std::vector<double> x, kl, tv, z;
    for (std::size_t i = start; i < table.rows.size(); ++i) {
      x.push_back(table.rows[i].d);
      kl.push_back(table.rows[i].kl);
      tv.push_back(table.rows[i].tv);
      z.push_back(table.rows[i].zcp1);
    }
    table.kl_slope = log_log_slope(x, kl);
    table.tv_slope = log_log_slope(x, tv);
    table.zcp_slope = log_log_slope(x, z);
  }
  return table;
}

struct GaussianCheckRow {
  double p = 0.0;
  double exponent = 1.0;
  double kl = 0.0;
  double kl_error = 0.0;
  double tv = 0.0;
  double tv_error = 0.0;
  double kl_lower = 0.0;  // 1/(2p) - 1.3, or 1/(2 sqrt p) - 1.22
  double product = 0.0;   // TV KL, or KL sqrt(TV)
  bool kl_lower_holds = false;
  bool product_holds = false;
  bool passed() const { return kl_lower_holds && product_holds; }
};

/// Quadrature KL and TV of the Gaussian mixture pair (sigma1 = 1) and the
/// two inequalities claimed for it at each p.
inline std::vector<GaussianCheckRow> gaussian_instance_check(std::span<const double> p_values,
                                                             double exponent,
                                                             const QuadratureConfig& cfg = {},
                                                             double sigma1 = 1.0) {
  detail::require(exponent == 1.0 || exponent == 0.75, "gaussian check: exponent must be 1 or 0.75");
  cfg.validate();
  std::vector<GaussianCheckRow> rows;
  for (double p : p_values) {
    detail::require(p > 0.005 && p < 0.5, "gaussian check: p must lie in (0.005, 0.5)");
    const auto g = gaussian_instance(p, sigma1, exponent);
    const auto kl = divergence_gaussian(g, DivergenceSpec::kl(), cfg);
    const auto tv = divergence_gaussian(g, DivergenceSpec::tv(), cfg);
    GaussianCheckRow row;
    row.p = p;
    row.exponent = exponent;
    row.kl = kl.value;
    row.kl_error = kl.abs_error;
    row.tv = tv.value;
    row.tv_error = tv.abs_error;
    if (exponent == 1.0) {
      row.kl_lower = 1.0 / (2.0 * p) - 1.3;
      row.product = row.tv * row.kl;
    } else {
      row.kl_lower = 1.0 / (2.0 * std::sqrt(p)) - 1.22;
      row.product = row.kl * std::sqrt(row.tv);
    }
    row.kl_lower_holds = row.kl >= row.kl_lower;
    row.product_holds = row.product <= 0.5;
    rows.push_back(row);
  }
  return rows;
}

struct VilleRow {
  double delta = 0.0;
  std::int64_t paths = 0;
  std::int64_t crossings = 0;
  double rate = 0.0;
  double wilson_upper_99 = 0.0;
  bool passed() const { return wilson_upper_99 <= delta; }
};

/// KT wealth on mean-zero coins c_t = s_t U_t * magnitude (s_t a fair sign,
/// U_t ~ U[0,1]); counts paths whose wealth ever reaches 1/delta.
inline std::vector<VilleRow> ville_experiment(std::int64_t n, std::span<const double> deltas,
                                              std::int64_t paths, std::uint64_t seed,
                                              double magnitude = 1.0, unsigned threads = 0) {
  detail::require(n >= 1, "ville: n must be >= 1");
  detail::require(paths >= 1000, "ville: paths must be >= 1000");
  detail::require(magnitude >= 0.0 && magnitude <= 1.0, "ville: magnitude must lie in [0,1]");
  detail::require(!deltas.empty(), "ville: need at least one delta");
  for (double d : deltas) detail::require(d > 0.0 && d < 1.0, "ville: delta must lie in (0,1)");

  // Peak ln W per path; a path crosses 1/delta iff its peak reaches -ln delta.
  std::vector<double> peak(static_cast<std::size_t>(paths), 0.0);
  parallel_for(paths, threads, [&](std::int64_t path) {
    Stream stream(seed, static_cast<std::uint64_t>(path));
    std::vector<double> coins(static_cast<std::size_t>(n));
    for (double& c : coins) {
      const double sign = (stream.bits() >> 63) ? 1.0 : -1.0;
      c = sign * stream.uniform() * magnitude;
    }
    const auto trace = kt_bettor(coins, false);
    peak[static_cast<std::size_t>(path)] =
        *std::max_element(trace.log_wealth.begin(), trace.log_wealth.end());
  });

  std::vector<VilleRow> rows;
  for (double delta : deltas) {
    const double threshold = -std::log(delta);
    VilleRow row;
    row.delta = delta;
    row.paths = paths;
    row.crossings = std::count_if(peak.begin(), peak.end(), [&](double v) { return v >= threshold; });
    row.rate = static_cast<double>(row.crossings) / static_cast<double>(paths);
    row.wilson_upper_99 = wilson_upper(row.crossings, paths);
    rows.push_back(row);
  }
  return rows;
}

struct TightnessRow {
  int d = 0;
  double d_kl = 0.0;
  double d_zcp = 0.0;  // at c = sqrt(2n)/delta
  double hoeffding_zcp = 1.0;
  double mcallester = 1.0;
  double ratio = 1.0;  // hoeffding_zcp / mcallester
};

/// Both bounds on the (posterior, prior) = (P, Q) pairs of the support-d instance.
inline std::vector<TightnessRow> tightness_comparison(double u, std::span<const int> d_values,
                                                      const BoundConfig& cfg,
                                                      std::optional<double> log_a_override = {}) {
  detail::require(std::isfinite(u) && u > 0.0, "tightness: u must be > 0");
  detail::require_d_grid(d_values);
  cfg.validate();
  std::vector<TightnessRow> rows;
  for (int d : d_values) {
    const auto [p, q] = multivariate_instance(d, u, log_a_override);
    TightnessRow row;
    row.d = d;
    row.d_kl = kl_discrete(p, q);
    row.d_zcp = zcp_discrete(p, q, hoeffding_zcp_scale(cfg));
    row.hoeffding_zcp = hoeffding_zcp_bound(row.d_zcp, cfg);
    row.mcallester = mcallester_baseline(row.d_kl, cfg);
    row.ratio = (is_vacuous(row.hoeffding_zcp) && is_vacuous(row.mcallester))
                    ? 1.0
                    : row.hoeffding_zcp / row.mcallester;
    rows.push_back(row);
  }
  return rows;
}

namespace fuzz {

/// A random pair on a common support of 1..max_support atoms. The second
/// member (the reference) is strictly positive; the first may have zeros,
/// be sharply peaked, or equal the reference exactly.
inline DistributionPair random_pair(Stream& s, std::size_t max_support = 64) {
  const std::size_t k = 1 + static_cast<std::size_t>(s.bits() % max_support);
  static constexpr double kScales[] = {0.0, 0.5, 2.0, 8.0, 30.0};
  auto draw = [&](double scale) {
    std::vector<double> lw(k);
    for (double& v : lw) v = scale * (2.0 * s.uniform() - 1.0);
    return lw;
  };
  const auto q_lw = draw(kScales[s.bits() % 5]);
  auto q = DiscreteDistribution::from_log_weights(q_lw);
  const auto mode = s.bits() % 10;
  if (mode == 0) return {q, q};
  auto p_lw = draw(kScales[s.bits() % 5]);
  if (mode == 1) {
    // Small perturbation of the reference.
    for (std::size_t i = 0; i < k; ++i) p_lw[i] = q_lw[i] + 1e-3 * (2.0 * s.uniform() - 1.0);
  }
  if (mode >= 7 && k > 1) {
    const std::size_t keep = s.bits() % k;
    for (std::size_t i = 0; i < k; ++i) {
      if (i != keep && s.uniform() < 0.5) p_lw[i] = -kInf;
    }
  }
  return {DiscreteDistribution::from_log_weights(std::move(p_lw)), std::move(q)};
}

/// A coin sequence of length 1..max_n in [-1,1]: uniform, biased, signs
/// only, constant, or sparse.
inline std::vector<double> random_coins(Stream& s, std::size_t max_n = 512) {
  const std::size_t n = 1 + static_cast<std::size_t>(s.bits() % max_n);
  const auto mode = s.bits() % 5;
  const double bias = 2.0 * s.uniform() - 1.0;
  std::vector<double> c(n);
  for (double& v : c) {
    switch (mode) {
      case 0: v = 2.0 * s.uniform() - 1.0; break;
      case 1: v = std::clamp(bias + 0.5 * (2.0 * s.uniform() - 1.0), -1.0, 1.0); break;
      case 2: v = s.uniform() < 0.5 * (1.0 + bias) ? 1.0 : -1.0; break;
      case 3: v = bias >= 0.0 ? 1.0 : -1.0; break;
      default: v = s.uniform() < 0.1 ? 2.0 * s.uniform() - 1.0 : 0.0; break;
    }
  }
  return c;
}

}  // namespace fuzz

/// The analytic lemmas plus the deterministic invariants end to end: the
/// finite-n asymptotics inequality, the ZCP(1) <= sqrt(8 TV KL) lemma,
/// regret ln(W*/W) <= ln(2 sqrt n) for the mixture bettor on [-1,1] coins and
/// for the KT fractions on +-1 coins, and the quadratic wealth lower bound.
/// `inject_fault` is forwarded to the analytic suite.
inline InequalitySuiteReport self_check(std::int64_t trials, std::uint64_t seed,
                                        bool inject_fault = false, double tol = 1e-9) {
  detail::require(trials >= 1, "self_check: trials must be >= 1");
  auto report = analytic_inequality_suite(trials, seed, tol, inject_fault);

  auto describe_pair = [](const DistributionPair& pq) {
    std::ostringstream os;
    os.precision(17);
    os << "p=[";
    for (std::size_t i = 0; i < pq.first.size(); ++i) os << (i ? "," : "") << pq.first[i];
    os << "] q=[";
    for (std::size_t i = 0; i < pq.second.size(); ++i) os << (i ? "," : "") << pq.second[i];
    os << "]";
    return os.str();
  };

  const std::int64_t pair_draws = std::min<std::int64_t>(trials, 1000);
  InequalityCheck asym{"asymptotics"}, lemma{"zcp1_kl_tv"};
  for (std::int64_t t = 0; t < pair_draws; ++t) {
    Stream s(seed ^ 0xA5A5A5A5ULL, static_cast<std::uint64_t>(t));
    const auto pq = fuzz::random_pair(s);
    for (std::int64_t n : {25, 100, 10000}) {
      const auto chk = asymptotics_inequality_check(pq.first, pq.second, n);
      if (std::isfinite(chk.a_value)) {
        asym.record(chk.b_over_l, chk.a_value, tol, describe_pair(pq) + " n=" + std::to_string(n));
      }
    }
    const double kl = kl_discrete(pq.first, pq.second);
    const double tv = tv_discrete(pq.first, pq.second);
    lemma.record(zcp_discrete(pq.first, pq.second, 1.0), zcp1_upper_bound_kl_tv(kl, tv), tol,
                 describe_pair(pq));
  }

  const std::int64_t coin_draws = std::min<std::int64_t>(trials, 1000);
  InequalityCheck regret{"mixture_regret"}, kt_binary{"kt_regret_binary"}, quad{"quadratic_wealth"};
  for (std::int64_t t = 0; t < coin_draws; ++t) {
    Stream s(seed ^ 0x5A5A5A5AULL, static_cast<std::uint64_t>(t));
    auto coins = fuzz::random_coins(s);
    const auto trace = mixture_bettor(coins);
    const double limit = std::log(2.0 * std::sqrt(static_cast<double>(coins.size())));
    const std::string input = "n=" + std::to_string(coins.size()) + " seed_index=" + std::to_string(t);
    regret.record(trace.log_regret(), limit, tol, input);
    quad.record(wealth_quadratic_lower(coins), trace.log_wealth_star, tol, input);
    for (double& c : coins) c = c >= 0.0 ? 1.0 : -1.0;
    kt_binary.record(kt_bettor(coins).log_regret(), limit, tol, input + " binary");
  }

  for (auto* c : {&asym, &lemma, &regret, &kt_binary, &quad}) report.checks.push_back(std::move(*c));
  return report;
}

}  // namespace zcp
