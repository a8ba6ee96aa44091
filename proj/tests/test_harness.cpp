#include <gtest/gtest.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <vector>

#include "zcp/harness.hpp"

namespace {

using zcp::LossKind;
using zcp::PosteriorKind;

TEST(ParallelFor, VisitsEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  zcp::parallel_for(1000, 4, [&](std::int64_t i) { hits[static_cast<std::size_t>(i)]++; });
  for (const auto& h : hits) ASSERT_EQ(h.load(), 1);
}

TEST(ParallelFor, PropagatesExceptions) {
  EXPECT_THROW(zcp::parallel_for(100, 3,
                                 [](std::int64_t i) {
                                   if (i == 57) throw zcp::ValidationError("boom");
                                 }),
               zcp::ValidationError);
}

TEST(LearningInstance, ClosedFormMeans) {
  const auto abs = zcp::LearningInstance::make(10, LossKind::AbsDistance, PosteriorKind::Fixed);
  for (std::size_t t = 0; t < 10; ++t) {
    // Midpoint rule on 1e5 cells of int_0^1 |c - x| dx.
    const double c = t / 10.0;
    double acc = 0.0;
    for (int i = 0; i < 100000; ++i) acc += std::abs(c - (i + 0.5) / 100000.0);
    EXPECT_NEAR(abs.true_mean(t), acc / 100000.0, 1e-9);
  }
  const auto ber = zcp::LearningInstance::make(4, LossKind::Bernoulli, PosteriorKind::Fixed);
  EXPECT_NEAR(ber.true_mean(0), 0.125, 1e-15);
  EXPECT_NEAR(ber.true_mean(3), 0.875, 1e-15);
  EXPECT_EQ(ber.loss(0, 0.1), 1.0);
  EXPECT_EQ(ber.loss(0, 0.2), 0.0);
}

TEST(LearningInstance, Validation) {
  EXPECT_THROW(zcp::LearningInstance::make(0, LossKind::AbsDistance, PosteriorKind::Gibbs), zcp::ValidationError);
  EXPECT_THROW(zcp::LearningInstance::make(5, LossKind::AbsDistance, PosteriorKind::Gibbs, -1.0),
               zcp::ValidationError);
  auto inst = zcp::LearningInstance::make(3, LossKind::AbsDistance, PosteriorKind::Fixed);
  inst.prior = zcp::make_discrete({1, 1, 0});
  inst.fixed_posterior = zcp::make_discrete({1, 1, 1});
  EXPECT_THROW(inst.validate(), zcp::ValidationError);
}

TEST(LearningInstance, GibbsPosterior) {
  const auto inst = zcp::LearningInstance::make(3, LossKind::AbsDistance, PosteriorKind::Gibbs, 2.0);
  const std::vector<double> mu{0.1, 0.2, 0.4};
  const auto post = inst.posterior(mu, 10);
  double z = 0.0;
  for (double m : mu) z += std::exp(-20.0 * m);
  for (std::size_t t = 0; t < 3; ++t) EXPECT_NEAR(post[t], std::exp(-20.0 * mu[t]) / z, 1e-15);
}

TEST(LearningInstance, ZeroTemperatureReturnsPrior) {
  const auto inst = zcp::LearningInstance::make(20, LossKind::AbsDistance, PosteriorKind::Gibbs, 0.0);
  zcp::Stream s(1, 0);
  const auto r = zcp::evaluate_trial(inst, {200, 0.05, 2.0}, s);
  EXPECT_EQ(r.d_kl, 0.0);
  EXPECT_EQ(r.d_tv, 0.0);
  EXPECT_EQ(r.d_alpha, 0.0);
  EXPECT_EQ(r.d_zcp_thm1, 0.0);
  EXPECT_EQ(r.d_zcp_thm2, 0.0);
}

TEST(EvaluateTrial, FieldsAreConsistent) {
  const auto inst = zcp::LearningInstance::make(30, LossKind::Bernoulli, PosteriorKind::Gibbs, 3.0);
  const zcp::BoundConfig cfg{500, 0.05, 2.0};
  zcp::Stream s(9, 3);
  const auto r = zcp::evaluate_trial(inst, cfg, s);
  EXPECT_NEAR(r.realized_gap, r.p_hat_mean - r.p_mean, 1e-14);
  EXPECT_GT(r.d_kl, 0.0);
  EXPECT_LE(r.d_tv, 1.0);
  EXPECT_GE(r.d_zcp_thm2, r.d_zcp_thm1);
  EXPECT_NEAR(r.hoeffding_zcp, zcp::hoeffding_zcp_bound(r.d_zcp_thm1, cfg), 1e-15);
  EXPECT_NEAR(r.mcallester, zcp::mcallester_baseline(r.d_kl, cfg), 1e-15);
  EXPECT_NEAR(r.comp_n, zcp::comp_n(r.d_alpha, r.d_zcp_thm2, cfg), 1e-12);
  EXPECT_NEAR(r.little_kl_bound, zcp::little_kl_mean_bound(r.p_hat_mean, r.comp_n, cfg.n), 1e-15);
  EXPECT_GE(r.little_kl_bound, r.p_hat_mean);
}

TEST(Coverage, FixedPriorPosteriorHoeffding) {
  const auto inst = zcp::LearningInstance::make(50, LossKind::AbsDistance, PosteriorKind::Fixed);
  const auto rep = zcp::run_coverage(inst, {500, 0.05, 2.0}, 2000, 17);
  EXPECT_EQ(rep.trials, 2000);
  EXPECT_DOUBLE_EQ(rep.delta_budget, 0.1);
  EXPECT_TRUE(rep.passed("hoeffding_zcp")) << rep.at("hoeffding_zcp").wilson_upper_99;
  for (const auto& r : rep.reports) {
    ASSERT_EQ(r.d_kl, 0.0);
    ASSERT_EQ(r.d_zcp_thm1, 0.0);
  }
}

TEST(Coverage, GibbsAllBoundsPass) {
  for (auto loss : {LossKind::AbsDistance, LossKind::Bernoulli}) {
    const auto inst = zcp::LearningInstance::make(50, loss, PosteriorKind::Gibbs, 5.0);
    const auto rep = zcp::run_coverage(inst, {1000, 0.05, 2.0}, 2000, 23);
    for (const auto& name : zcp::coverage_bound_names()) {
      EXPECT_TRUE(rep.passed(name)) << zcp::to_string(loss) << " " << name << " wilson "
                                    << rep.at(name).wilson_upper_99;
      EXPECT_LE(rep.at(name).failures, rep.trials);
    }
  }
}

TEST(Coverage, FailureEventsMatchCounts) {
  // A tiny sample makes the empirical-Bernstein bound vacuous but keeps the
  // rest informative enough that some trials may fail; counts must agree.
  const auto inst = zcp::LearningInstance::make(8, LossKind::Bernoulli, PosteriorKind::Gibbs, 50.0);
  const auto rep = zcp::run_coverage(inst, {20, 0.4, 2.0}, 500, 5);
  std::vector<std::int64_t> counts(4, 0);
  for (const auto& [t, r] : rep.failure_events) {
    const auto flags = zcp::coverage_failures(r);
    ASSERT_TRUE(std::any_of(flags.begin(), flags.end(), [](bool b) { return b; }));
    for (std::size_t k = 0; k < 4; ++k) counts[k] += flags[k];
  }
  for (std::size_t k = 0; k < 4; ++k) EXPECT_EQ(counts[k], rep.bounds[k].failures);
}

TEST(Coverage, DeterministicAcrossThreadCounts) {
  const auto inst = zcp::LearningInstance::make(40, LossKind::AbsDistance, PosteriorKind::Gibbs, 5.0);
  const zcp::BoundConfig cfg{300, 0.05, 2.0};
  const auto a = zcp::run_coverage(inst, cfg, 300, 99, 1);
  const auto b = zcp::run_coverage(inst, cfg, 300, 99, 4);
  ASSERT_EQ(a.reports.size(), b.reports.size());
  for (std::size_t t = 0; t < a.reports.size(); ++t) {
    ASSERT_EQ(a.reports[t].realized_gap, b.reports[t].realized_gap);
    ASSERT_EQ(a.reports[t].d_kl, b.reports[t].d_kl);
    ASSERT_EQ(a.reports[t].little_kl_bound, b.reports[t].little_kl_bound);
  }
  for (std::size_t k = 0; k < a.bounds.size(); ++k) EXPECT_EQ(a.bounds[k].failures, b.bounds[k].failures);
}

TEST(Coverage, RejectsTooFewTrials) {
  const auto inst = zcp::LearningInstance::make(10, LossKind::AbsDistance, PosteriorKind::Gibbs, 1.0);
  EXPECT_THROW(zcp::run_coverage(inst, {100, 0.05, 2.0}, 0, 1), zcp::ValidationError);
  EXPECT_THROW(zcp::run_coverage(inst, {100, 0.05, 2.0}, 99, 1), zcp::ValidationError);
}

TEST(Scaling, SlopesMatchOrders) {
  std::vector<int> d;
  for (int k = 4; k <= 12; ++k) d.push_back(1 << k);
  const auto t = zcp::divergence_scaling_table(1.0, d);
  EXPECT_NEAR(t.kl_slope, 0.5, 0.15);
  EXPECT_NEAR(t.tv_slope, -1.0, 0.15);
  EXPECT_NEAR(t.zcp_slope, -0.25, 0.15);
  EXPECT_TRUE(t.passed());
  for (const auto& row : t.rows) EXPECT_TRUE(row.lemma_holds) << "d=" << row.d;
}

TEST(Scaling, UnitRatioOverrideGivesZeros) {
  const std::vector<int> d{4, 16, 64};
  const auto t = zcp::divergence_scaling_table(1.0, d, 0.0);
  for (const auto& row : t.rows) {
    EXPECT_EQ(row.kl, 0.0);
    EXPECT_EQ(row.tv, 0.0);
    EXPECT_EQ(row.zcp1, 0.0);
  }
}

TEST(Scaling, RejectsBadGrid) {
  const std::vector<int> odd{4, 7}, small{2, 4}, unsorted{8, 4};
  EXPECT_THROW(zcp::divergence_scaling_table(1.0, odd), zcp::ValidationError);
  EXPECT_THROW(zcp::divergence_scaling_table(1.0, small), zcp::ValidationError);
  EXPECT_THROW(zcp::divergence_scaling_table(1.0, unsorted), zcp::ValidationError);
}

TEST(GaussianCheck, InequalitiesHold) {
  const std::vector<double> ps{0.2, 0.1, 0.05, 0.02};
  for (double exponent : {1.0, 0.75}) {
    for (const auto& row : zcp::gaussian_instance_check(ps, exponent)) {
      EXPECT_TRUE(row.passed()) << "p=" << row.p << " exponent=" << exponent << " kl=" << row.kl;
    }
  }
  const std::vector<double> extra{0.04};
  const auto row = zcp::gaussian_instance_check(extra, 0.75).front();
  EXPECT_NEAR(row.kl_lower, 1.28, 1e-12);
  EXPECT_TRUE(row.passed());
  const std::vector<double> weak{0.49};
  EXPECT_TRUE(zcp::gaussian_instance_check(weak, 1.0).front().passed());
}

TEST(GaussianCheck, RejectsOutOfRange) {
  const std::vector<double> bad{0.001};
  EXPECT_THROW(zcp::gaussian_instance_check(bad, 1.0), zcp::ValidationError);
  const std::vector<double> ok{0.1};
  EXPECT_THROW(zcp::gaussian_instance_check(ok, 0.5), zcp::ValidationError);
}

TEST(Ville, MeanZeroCoinsStayBelowBoundary) {
  const std::vector<double> deltas{0.1, 0.05};
  const auto rows = zcp::ville_experiment(1000, deltas, 10000, 7);
  for (const auto& r : rows) {
    EXPECT_TRUE(r.passed()) << "delta=" << r.delta << " wilson=" << r.wilson_upper_99;
    EXPECT_LE(r.crossings, r.paths);
  }
  EXPECT_LE(rows[1].crossings, rows[0].crossings);
}

TEST(Ville, ZeroMagnitudeNeverCrosses) {
  const std::vector<double> deltas{0.9999, 0.5};
  for (const auto& r : zcp::ville_experiment(200, deltas, 1000, 3, 0.0)) EXPECT_EQ(r.crossings, 0);
}

TEST(Ville, Validation) {
  const std::vector<double> deltas{0.1};
  EXPECT_THROW(zcp::ville_experiment(100, deltas, 999, 1), zcp::ValidationError);
  const std::vector<double> bad{1.0};
  EXPECT_THROW(zcp::ville_experiment(100, bad, 1000, 1), zcp::ValidationError);
}

TEST(Tightness, RatioFallsWithSupport) {
  std::vector<int> d;
  for (int k = 6; k <= 12; ++k) d.push_back(1 << k);
  const auto rows = zcp::tightness_comparison(1.0, d, {1000000, 0.05, 2.0});
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].ratio, rows[i - 1].ratio) << "d=" << rows[i].d;
}

TEST(Tightness, ZcpBoundWinsAtLargeSupport) {
  const std::vector<int> d{1 << 14};
  const auto rows = zcp::tightness_comparison(1.0, d, {1000000, 0.05, 2.0});
  EXPECT_LT(rows[0].ratio, 1.0);
}

TEST(Tightness, IdenticalPairFavorsKlBaseline) {
  const std::vector<int> d{64};
  const auto row = zcp::tightness_comparison(1.0, d, {1000000, 0.05, 2.0}, 0.0).front();
  EXPECT_LT(row.mcallester, row.hoeffding_zcp);
}

TEST(Tightness, BothVacuousGivesUnitRatio) {
  const std::vector<int> d{64};
  const auto row = zcp::tightness_comparison(1.0, d, {4, 0.05, 2.0}).front();
  EXPECT_EQ(row.hoeffding_zcp, 1.0);
  EXPECT_EQ(row.mcallester, 1.0);
  EXPECT_EQ(row.ratio, 1.0);
}

TEST(SelfCheck, PassesAndDetectsFault) {
  const auto rep = zcp::self_check(2000, 11);
  for (const auto& c : rep.checks) {
    EXPECT_TRUE(c.passed()) << c.name << " worst " << c.worst_input;
    EXPECT_GE(c.worst_slack, -1e-9) << c.name;
  }
  EXPECT_FALSE(zcp::self_check(200, 11, true).passed());
}

TEST(Fuzz, GeneratorsRespectContracts) {
  for (int i = 0; i < 500; ++i) {
    zcp::Stream s(4, static_cast<std::uint64_t>(i));
    const auto [p, q] = zcp::fuzz::random_pair(s, 64);
    ASSERT_EQ(p.size(), q.size());
    ASSERT_LE(p.size(), 64u);
    for (std::size_t k = 0; k < q.size(); ++k) ASSERT_GT(q[k], 0.0);
    const auto coins = zcp::fuzz::random_coins(s, 512);
    ASSERT_GE(coins.size(), 1u);
    ASSERT_LE(coins.size(), 512u);
    for (double c : coins) ASSERT_LE(std::abs(c), 1.0);
  }
}

}  // namespace
