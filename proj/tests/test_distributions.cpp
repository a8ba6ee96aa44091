#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "zcp/distributions.hpp"
#include "zcp/divergences.hpp"
#include "zcp/quadrature.hpp"

namespace {

void expect_weights(const zcp::DiscreteDistribution& d, const std::vector<double>& want, double tol = 1e-15) {
  ASSERT_EQ(d.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) EXPECT_NEAR(d[i], want[i], tol) << "atom " << i;
}

TEST(MakeDiscrete, Normalizes) {
  expect_weights(zcp::make_discrete({1, 1}), {0.5, 0.5});
  expect_weights(zcp::make_discrete({2, 0, 2}), {0.5, 0.0, 0.5});
  expect_weights(zcp::make_discrete({0.2, 0.3, 0.5}), {0.2, 0.3, 0.5});
}

TEST(MakeDiscrete, RejectsBadInput) {
  EXPECT_THROW(zcp::make_discrete({}), zcp::ValidationError);
  EXPECT_THROW(zcp::make_discrete({0.5, -0.1}), zcp::ValidationError);
  EXPECT_THROW(zcp::make_discrete({0.0, 0.0}), zcp::ValidationError);
  EXPECT_THROW(zcp::make_discrete({1.0, std::numeric_limits<double>::infinity()}), zcp::ValidationError);
}

TEST(MakeDiscrete, FuzzSumsToOne) {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int trial = 0; trial < 2000; ++trial) {
    const std::size_t k = 1 + gen() % 64;
    std::vector<double> w(k);
    const double scale = std::pow(10.0, 12.0 * unit(gen) - 6.0);
    for (double& v : w) v = unit(gen) < 0.2 ? 0.0 : scale * unit(gen);
    w[gen() % k] += scale;
    const auto d = zcp::make_discrete(w);
    double sum = 0.0;
    for (double v : d.weights()) {
      EXPECT_GE(v, 0.0);
      sum += v;
    }
    ASSERT_NEAR(sum, 1.0, 1e-12);
  }
}

TEST(LogWeights, ZeroMassAllowedAsMinusInfinity) {
  const auto d = zcp::DiscreteDistribution::from_log_weights({0.0, -std::numeric_limits<double>::infinity()});
  expect_weights(d, {1.0, 0.0});
  EXPECT_EQ(d.log_weights()[1], -zcp::kInf);
}

TEST(BernoulliInstance, HugeRatioStaysRepresentable) {
  const auto [p, q] = zcp::bernoulli_instance(0.1, 100.0);
  expect_weights(p, {0.1, 0.9});
  EXPECT_NEAR(q[0] / (0.1 * std::exp(-100.0)), 1.0, 1e-12);
  EXPECT_NEAR(q[1], 1.0 - 0.1 * std::exp(-100.0), 1e-15);
  EXPECT_NEAR(zcp::tv_discrete(p, q), 0.1 * (1.0 - std::exp(-100.0)), 1e-15);
}

TEST(BernoulliInstance, UnitRatioGivesIdenticalPair) {
  const auto [p, q] = zcp::bernoulli_instance(0.5, 0.0);
  expect_weights(p, {0.5, 0.5});
  expect_weights(q, {0.5, 0.5});
  EXPECT_EQ(zcp::kl_discrete(p, q), 0.0);
  EXPECT_EQ(zcp::tv_discrete(p, q), 0.0);
  EXPECT_EQ(zcp::zcp_discrete(p, q, 10.0), 0.0);
}

TEST(BernoulliInstance, KlSandwich) {
  const auto [p, q] = zcp::bernoulli_instance(0.2, 5.0);
  const double kl = zcp::kl_discrete(p, q);
  EXPECT_GE(kl, 0.2 * 5.0 - std::exp(-1.0));
  EXPECT_LE(kl, 0.2 * 5.0);
}

TEST(BernoulliInstance, RejectsOutOfRange) {
  EXPECT_THROW(zcp::bernoulli_instance(0.0, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::bernoulli_instance(1.0, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::bernoulli_instance(0.3, -0.1), zcp::ValidationError);
  EXPECT_THROW(zcp::bernoulli_instance(0.3, std::numeric_limits<double>::infinity()), zcp::ValidationError);
}

TEST(MultivariateInstance, SmallSupports) {
  {
    const auto [p, q] = zcp::multivariate_instance(2, 1.0);
    expect_weights(p, {0.25, 0.75});
    EXPECT_NEAR(std::log(p[0] / q[0]), std::pow(2.0, 1.5), 1e-12);
  }
  {
    const auto [p, q] = zcp::multivariate_instance(4, 1.0);
    expect_weights(p, {0.0625, 0.0625, 0.4375, 0.4375});
    const double a = std::exp(std::pow(4.0, 1.5));
    expect_weights(q, {0.0625 / a, 0.0625 / a, (1 - 0.125 / a) / 2, (1 - 0.125 / a) / 2}, 1e-15);
  }
}

TEST(MultivariateInstance, ZeroLogRatioOverrideIsExactlyEqual) {
  for (int d : {2, 8, 64, 1024}) {
    for (double u : {0.25, 1.0, 2.0}) {
      const auto [p, q] = zcp::multivariate_instance(d, u, 0.0);
      for (std::size_t i = 0; i < p.size(); ++i) ASSERT_EQ(p[i], q[i]);
    }
  }
}

TEST(MultivariateInstance, OutputsAreDistributions) {
  for (int d = 2; d <= 4096; d *= 2) {
    for (double u : {0.1, 0.5, 1.0, 3.0}) {
      const auto [p, q] = zcp::multivariate_instance(d, u);
      double sp = 0.0, sq = 0.0;
      for (std::size_t i = 0; i < p.size(); ++i) {
        ASSERT_GE(p[i], 0.0);
        ASSERT_GE(q[i], 0.0);
        sp += p[i];
        sq += q[i];
      }
      EXPECT_NEAR(sp, 1.0, 1e-12);
      EXPECT_NEAR(sq, 1.0, 1e-12);
    }
  }
}

TEST(MultivariateInstance, RejectsBadShape) {
  EXPECT_THROW(zcp::multivariate_instance(3, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::multivariate_instance(0, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::multivariate_instance(4, 0.0), zcp::ValidationError);
  EXPECT_THROW(zcp::multivariate_instance(4, -1.0), zcp::ValidationError);
}

TEST(GaussianInstance, NarrowWidth) {
  EXPECT_NEAR(zcp::gaussian_instance(0.1, 1.0, 1.0).sigma2, 0.1, 1e-15);
  EXPECT_NEAR(zcp::gaussian_instance(0.25, 1.0, 0.75).sigma2, 0.35355339059327373, 1e-15);
  EXPECT_NEAR(zcp::gaussian_instance(0.25, 3.0, 0.75).sigma2, 3.0 * std::pow(0.25, 0.75), 1e-14);
  EXPECT_EQ(zcp::gaussian_instance(0.3, 1.0, 1.0).mu, 0.0);
}

TEST(GaussianInstance, RejectsBadParameters) {
  EXPECT_THROW(zcp::gaussian_instance(0.0, 1.0, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::gaussian_instance(1.0, 1.0, 1.0), zcp::ValidationError);
  EXPECT_THROW(zcp::gaussian_instance(0.1, 1.0, 0.5), zcp::ValidationError);
  EXPECT_THROW(zcp::GaussianMixturePair::make(0.0, -1.0, 1.0, 0.5), zcp::ValidationError);
}

TEST(DensityRatio, IdenticalComponentsGiveZero) {
  auto g = zcp::gaussian_instance(0.3, 1.0, 1.0);
  g.sigma2 = g.sigma1;
  for (double x : {-50.0, -1.0, 0.0, 0.7, 19.0}) EXPECT_NEAR(zcp::density_ratio_log(g, x), 0.0, 1e-15);
}

TEST(DensityRatio, CenterValue) {
  const auto g = zcp::GaussianMixturePair::make(0.0, 2.0, 1.0, 0.5);
  EXPECT_NEAR(zcp::density_ratio_log(g, 0.0), std::log(0.75), 1e-15);
}

TEST(DensityRatio, TailAsymptote) {
  const double p = 0.1, s1 = 1.0, s2 = 0.01;
  const auto g = zcp::GaussianMixturePair::make(0.0, s1, s2, p);
  for (double x : {20.0 * s1, -20.0 * s1}) {
    const double asym = std::log(p) + std::log(s2 / s1) + x * x * (1.0 / (2 * s2 * s2) - 1.0 / (2 * s1 * s1));
    const double got = zcp::density_ratio_log(g, x);
    EXPECT_TRUE(std::isfinite(got));
    EXPECT_NEAR(got / asym, 1.0, 1e-6);
  }
}

TEST(DensityRatio, RejectsNonFinite) {
  const auto g = zcp::gaussian_instance(0.1, 1.0, 1.0);
  EXPECT_THROW(zcp::density_ratio_log(g, std::nan("")), zcp::ValidationError);
  EXPECT_THROW(zcp::density_ratio_log(g, zcp::kInf), zcp::ValidationError);
}

TEST(DensityRatio, IntegratesToOneAgainstQ) {
  for (double p : {0.02, 0.1, 0.4}) {
    for (double exponent : {1.0, 0.75}) {
      const auto g = zcp::gaussian_instance(p, 1.0, exponent);
      const auto bps = zcp::gaussian_breakpoints(g, 20.0);
      const auto r = zcp::integrate_adaptive(
          [&](double x) { return std::exp(zcp::log_q_density(g, x) + zcp::density_ratio_log(g, x)); }, bps, 1e-10,
          60);
      EXPECT_NEAR(r.value, 1.0, 1e-6) << "p=" << p << " exponent=" << exponent;
    }
  }
}

TEST(Densities, QIntegratesToOne) {
  const auto g = zcp::gaussian_instance(0.05, 1.0, 1.0);
  const auto bps = zcp::gaussian_breakpoints(g, 20.0);
  const auto r = zcp::integrate_adaptive([&](double x) { return std::exp(zcp::log_q_density(g, x)); }, bps, 1e-10, 60);
  EXPECT_NEAR(r.value, 1.0, 1e-8);
}

}  // namespace
