#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "iic/errors.hpp"
#include "iic/estimator.hpp"

using namespace iic;

namespace {

// Frozen from a separate exact-rational enumeration of Ball(2).
constexpr double kTv112 = 60988.0 / 5315835.0;
constexpr double kArm1 = 63.0 / 64.0;
constexpr double kArm2 = 253135.0 / 262144.0;
constexpr double kDual12 = 4095.0 / 4096.0;

void expect_within_sigmas(const ArmStats& s, double truth, double sigmas) {
  const double sd = std::sqrt(truth * (1.0 - truth) / static_cast<double>(s.trials));
  EXPECT_LE(std::abs(s.p_hat() - truth), sigmas * sd + 1e-15) << s.hits << "/" << s.trials;
}

}  // namespace

TEST(Estimator, WhiteCrossingOneTwo) {
  expect_within_sigmas(estimate_arm(Color::White, 1, 2, 200000, 0.5, 1), kDual12, 4.0);
}

TEST(Estimator, BlackArmZeroOne) {
  expect_within_sigmas(estimate_arm(Color::Black, 0, 1, 200000, 0.5, 2), kArm1, 4.0);
  expect_within_sigmas(estimate_arm(Color::Black, 0, 2, 200000, 0.5, 3), kArm2, 4.0);
}

TEST(Estimator, AllBlackHasNoWhiteCrossing) {
  const auto s = estimate_arm(Color::White, 0, 5, 1000, 1.0, 4);
  EXPECT_EQ(s.hits, 0U);
  EXPECT_EQ(s.p_hat(), 0.0);
}

TEST(Estimator, ArmStatsMergeAndWorkers) {
  const auto serial = estimate_arm(Color::White, 1, 12, 3000, 0.5, 5, 0, 1);
  const auto parallel = estimate_arm(Color::White, 1, 12, 3000, 0.5, 5, 0, 3);
  EXPECT_EQ(serial.hits, parallel.hits);
  ArmStats a{Color::White, 1, 2, 10, 3}, b{Color::White, 1, 2, 20, 7}, c{Color::White, 1, 2, 5, 5};
  ArmStats ab = a;
  ab += b;
  ab += c;
  ArmStats cb = c;
  cb += b;
  cb += a;
  EXPECT_EQ(ab.trials, 35U);
  EXPECT_EQ(ab.hits, 15U);
  EXPECT_EQ(cb.trials, ab.trials);
  EXPECT_EQ(cb.hits, ab.hits);
  ArmStats other{Color::Black, 1, 2, 1, 1};
  EXPECT_THROW(ab += other, std::invalid_argument);
}

TEST(Estimator, DualArmMonotoneInOuterRadius) {
  ArmStats prev;
  for (int m : {2, 4, 8, 16, 32}) {
    const auto s = estimate_arm(Color::White, 1, m, 20000, 0.5, 6, static_cast<std::uint64_t>(m));
    if (prev.trials > 0) {
      EXPECT_LE(s.p_hat() - s.ci_halfwidth(), prev.p_hat() + prev.ci_halfwidth()) << m;
    }
    prev = s;
  }
}

TEST(Estimator, ExactTvOverAllSmallTriples) {
  bool positive = false;
  for (int k = 0; k <= 2; ++k) {
    for (int m = k; m <= 2; ++m) {
      for (int n = m; n <= 2; ++n) {
        const auto r = exact_tv(k, m, n, 0.5);
        EXPECT_LE(r.tv, r.bound) << k << m << n;
        EXPECT_FALSE(r.samples.has_value());
        const double expected = (k == 1 && m == 1 && n == 2) ? kTv112 : 0.0;
        EXPECT_NEAR(r.tv, expected, 1e-12) << k << m << n;
        if (m == n) EXPECT_EQ(r.tv, 0.0);
        positive = positive || r.tv > 0.0;
      }
    }
  }
  EXPECT_TRUE(positive);
}

TEST(Estimator, ExactTvBounds) {
  EXPECT_EQ(exact_tv(1, 2, 2, 0.5).bound, kDual12);
  EXPECT_EQ(exact_tv(0, 1, 2, 0.5).bound, kArm1);
  EXPECT_EQ(exact_tv(1, 1, 2, 0.5).bound, 1.0);
}

TEST(Estimator, RingOneRegionAtZeroOneTwo) {
  const auto r = exact_tv(0, 1, 2, 0.5, TvRegion::Ring1);
  EXPECT_NEAR(r.tv, kTv112, 1e-12);
  EXPECT_LT(r.tv, r.bound);
  EXPECT_EQ(exact_tv(0, 1, 2, 0.5, TvRegion::Ball).tv, 0.0);
}

TEST(Estimator, ExactTvCapacity) {
  EXPECT_THROW(exact_tv(1, 2, 3, 0.5), CapacityExceeded);
  EXPECT_THROW(exact_tv(2, 1, 3, 0.5), std::invalid_argument);
}

TEST(Estimator, EmpiricalTvIdenticalMeasures) {
  const auto r = empirical_tv(1, 2, 2, 1'000'000, 0.5, 7);
  EXPECT_LE(r.tv, 0.01);
  EXPECT_EQ(r.samples.value(), 1'000'000U);
  EXPECT_TRUE(r.bound_sigma.has_value());
}

TEST(Estimator, HistogramCountsSumToSamples) {
  const auto counts = rejection_histogram(Ball(1).sites(), 3, 12345, 0.5, 8, 0);
  EXPECT_EQ(counts.size(), 128U);
  EXPECT_EQ(std::accumulate(counts.begin(), counts.end(), std::uint64_t{0}), 12345U);
}

TEST(Estimator, TotalVariationHelpers) {
  const std::vector<double> a{0.5, 0.5, 0.0}, b{0.25, 0.25, 0.5};
  EXPECT_DOUBLE_EQ(total_variation(a, b), 0.5);
  const std::vector<std::uint64_t> ca{2, 2, 0}, cb{1, 1, 2};
  EXPECT_DOUBLE_EQ(total_variation_counts(ca, cb), 0.5);
}

TEST(Estimator, SyntheticFits) {
  std::vector<ScalePoint> flat, power;
  for (int m : {8, 16, 32, 64, 128}) {
    flat.push_back({m, 0.3, 0});
    power.push_back({m, std::pow(static_cast<double>(m), -0.5), 0});
  }
  EXPECT_NEAR(fit_loglog(flat).slope, 0.0, 1e-12);
  const auto f = fit_loglog(power);
  EXPECT_NEAR(f.slope, -0.5, 1e-6);
  EXPECT_NEAR(f.exponent, 0.5, 1e-6);
  EXPECT_NEAR(f.stderr_, 0.0, 1e-9);
  // Weights do not bias exact log-linear input.
  for (auto& pt : power) pt.trials = 1000;
  EXPECT_NEAR(fit_loglog(power).exponent, 0.5, 1e-6);
}

TEST(Estimator, DegenerateFits) {
  std::vector<ScalePoint> zero{{8, 0.2, 0}, {16, 0.0, 0}};
  EXPECT_THROW(fit_loglog(zero), DegenerateFit);
  std::vector<ScalePoint> single{{8, 0.2, 0}};
  EXPECT_THROW(fit_loglog(single), DegenerateFit);
  const std::vector<int> few{8, 16, 32};
  EXPECT_THROW(fit_exponent(1, few, 10, 1), std::invalid_argument);
}

TEST(Estimator, SmallExponentFitIsPlausible) {
  const std::vector<int> scales{4, 8, 16, 32};
  std::vector<ArmStats> per_scale;
  const auto fit = fit_exponent(1, scales, 20000, 9, 1, &per_scale);
  ASSERT_EQ(per_scale.size(), 4U);
  EXPECT_GT(fit.exponent, 0.0);
  EXPECT_LT(fit.exponent, 0.3);
  EXPECT_GT(fit.stderr_, 0.0);
}

TEST(Estimator, RegionNames) {
  EXPECT_EQ(region_from_string("ball"), TvRegion::Ball);
  EXPECT_EQ(region_from_string("ring1"), TvRegion::Ring1);
  EXPECT_THROW(region_from_string("disk"), std::invalid_argument);
  EXPECT_EQ(tv_region_sites(TvRegion::Ring1, 0).size(), 6U);
  EXPECT_EQ(tv_region_sites(TvRegion::Ball, 1).size(), 7U);
}
