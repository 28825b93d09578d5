#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "iic/connectivity.hpp"
#include "iic/errors.hpp"
#include "iic/estimator.hpp"
#include "iic/numeric.hpp"
#include "iic/oracle.hpp"

using namespace iic;

namespace {

// Frozen values from a separate exhaustive enumeration (2^19 colourings of
// Ball(2), exact rational arithmetic).
constexpr double kArm1 = 63.0 / 64.0;
constexpr double kArm2 = 253135.0 / 262144.0;
constexpr double kDual12 = 4095.0 / 4096.0;

// Conditional probability by listing every completion; no pruning, no cache.
double brute_cond(const PartialConfig& eta, Site target, int n, double p) {
  std::vector<std::size_t> free;
  for (std::size_t i = 0; i < eta.size(); ++i) {
    if (!eta.revealed(i)) free.push_back(i);
  }
  long double num = 0.0, den = 0.0;
  PartialConfig c = eta;
  const std::size_t t = eta.ball().index_unchecked(target);
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << free.size()); ++j) {
    int blacks = 0;
    for (std::size_t b = 0; b < free.size(); ++b) {
      const bool black = (j >> b) & 1U;
      blacks += black;
      c.set(free[b], black ? State::Black : State::White);
    }
    if (!one_arm(c, n)) continue;
    const long double w = std::pow(static_cast<long double>(p), blacks) *
                          std::pow(1.0L - p, static_cast<long double>(free.size()) - blacks);
    den += w;
    if (c.at(t) == State::Black) num += w;
  }
  return static_cast<double>(num / den);
}

PartialConfig random_compatible(int n, std::mt19937_64& rng, double reveal) {
  std::uniform_real_distribution<double> u;
  for (;;) {
    PartialConfig c(shared_ball(n));
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (u(rng) < reveal) c.set(i, u(rng) < 0.5 ? State::Black : State::White);
    }
    if (compatible_with_arm(c, n)) return c;
  }
}

std::vector<Site> unrevealed_sites(const PartialConfig& c) {
  std::vector<Site> out;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (!c.revealed(i)) out.push_back(c.ball().site(i));
  }
  return out;
}

// Radius 3 with few revealed sites goes past the default enumeration limit.
const OracleBackend kExact{BackendMode::Exact, 36};

}  // namespace

TEST(Oracle, ExactEnumerationsMatchFrozenValues) {
  EXPECT_EQ(exact_one_arm_probability(0, 0.5), 1.0);
  EXPECT_EQ(exact_one_arm_probability(1, 0.5), kArm1);
  EXPECT_EQ(exact_one_arm_probability(2, 0.5), kArm2);
  EXPECT_EQ(exact_dual_arm_probability(1, 2, 0.5), kDual12);
  EXPECT_EQ(exact_dual_arm_probability(0, 1, 0.5), kArm1);
  EXPECT_EQ(exact_dual_arm_probability(0, 2, 0.5), kArm2);  // colour symmetry at p = 1/2
  EXPECT_EQ(exact_dual_arm_probability(2, 2, 0.5), 1.0);
}

TEST(Oracle, ArmProbabilityFromEmptyConditioning) {
  ConditionalOracle oracle(0.5);
  EXPECT_EQ(oracle.arm_probability(PartialConfig(shared_ball(1)), 1), kArm1);
  EXPECT_EQ(oracle.arm_probability(PartialConfig(shared_ball(2)), 2), kArm2);
  EXPECT_NEAR(oracle.arm_probability(PartialConfig(shared_ball(2)), 2),
              exact_one_arm_probability(2, 0.5), 1e-15);
}

TEST(Oracle, RingOneThresholdIs32Over63) {
  ConditionalOracle oracle(0.5);
  const PartialConfig empty(shared_ball(1));
  const auto r = oracle.cond_prob({Site{1, 0}, empty, 1}, kExact);
  EXPECT_TRUE(r.exact);
  EXPECT_EQ(r.probability, 32.0 / 63.0);
  // Origin is irrelevant to the event.
  EXPECT_EQ(oracle.cond_prob({Site{0, 0}, empty, 1}, kExact).probability, 0.5);
}

TEST(Oracle, ExactMatchesBruteForce) {
  std::mt19937_64 rng(21);
  for (double p : {0.3, 0.5, 0.7}) {
    ConditionalOracle oracle(p);
    for (int trial = 0; trial < 30; ++trial) {
      const int n = 1 + trial % 2;
      const auto eta = random_compatible(n, rng, 0.4);
      for (Site target : unrevealed_sites(eta)) {
        const double got = oracle.cond_prob({target, eta, n}, kExact).probability;
        ASSERT_NEAR(got, brute_cond(eta, target, n, p), 1e-12);
      }
    }
  }
}

TEST(Oracle, FkgLowerBoundOnEveryThreshold) {
  std::mt19937_64 rng(22);
  for (double p : {0.2, 0.5, 0.8}) {
    ConditionalOracle oracle(p);
    for (int trial = 0; trial < 200; ++trial) {
      const int n = 1 + trial % 3;
      const auto eta = random_compatible(n, rng, n == 3 ? 0.5 : 0.3);
      for (Site target : unrevealed_sites(eta)) {
        ASSERT_GE(oracle.cond_prob({target, eta, n}, kExact).probability, p);
      }
    }
    EXPECT_GT(oracle.exact_thresholds(), 0U);
  }
}

TEST(Oracle, MartingaleIdentity) {
  // P(arm | eta) = p P(arm | eta, x Black) + (1 - p) P(arm | eta, x White).
  std::mt19937_64 rng(23);
  ConditionalOracle oracle(0.5);
  for (int trial = 0; trial < 1000; ++trial) {
    const int n = 1 + trial % 3;
    const auto eta = random_compatible(n, rng, n == 3 ? 0.6 : 0.35);
    const auto free = unrevealed_sites(eta);
    if (free.empty()) continue;
    const Site x = free[static_cast<std::size_t>(trial) % free.size()];
    auto black = eta, white = eta;
    black.set(x, State::Black);
    white.set(x, State::White);
    const double lhs = oracle.arm_probability(eta, n);
    const double rhs = 0.5 * oracle.arm_probability(black, n) + 0.5 * oracle.arm_probability(white, n);
    ASSERT_NEAR(lhs, rhs, 1e-14);
    const double thr = oracle.cond_prob({x, eta, n}, kExact).probability;
    ASSERT_NEAR(thr * lhs, 0.5 * oracle.arm_probability(black, n), 1e-14);
  }
}

TEST(Oracle, CacheIsConsistentAcrossRepeats) {
  std::mt19937_64 rng(24);
  ConditionalOracle a(0.5), b(0.5);
  const auto eta = random_compatible(3, rng, 0.5);
  const auto free = unrevealed_sites(eta);
  std::vector<double> first;
  for (Site s : free) first.push_back(a.cond_prob({s, eta, 3}, kExact).probability);
  for (std::size_t i = free.size(); i-- > 0;) {
    EXPECT_EQ(b.cond_prob({free[i], eta, 3}, kExact).probability, first[i]);
    EXPECT_EQ(a.cond_prob({free[i], eta, 3}, kExact).probability, first[i]);
  }
  EXPECT_GT(a.cache_entries(), 0U);
}

TEST(Oracle, MonteCarloWithinFourSigmaOfExact) {
  std::mt19937_64 rng(25);
  ConditionalOracle oracle(0.5);
  const OracleBackend mc{BackendMode::MonteCarlo, 25, 2e-3, 5'000'000, 1000};
  int checked = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 2;
    const auto eta = random_compatible(n, rng, 0.3);
    const auto free = unrevealed_sites(eta);
    const Site x = free[free.size() / 2];
    const double exact = oracle.cond_prob({x, eta, n}, kExact).probability;
    StreamRng stream(77, static_cast<std::uint64_t>(trial));
    const auto est = oracle.cond_prob({x, eta, n}, mc, &stream);
    EXPECT_FALSE(est.exact);
    EXPECT_GE(est.probability, 0.5);
    const double sigma = est.ci_halfwidth / kZ95;
    EXPECT_LE(std::abs(est.probability - exact), 4.0 * sigma + 1e-12) << trial;
    ++checked;
  }
  EXPECT_EQ(checked, 12);
}

TEST(Oracle, AutoFallsBackToMonteCarloAboveLimits) {
  ConditionalOracle oracle(0.5);
  const PartialConfig empty(shared_ball(5));
  StreamRng stream(1, 2);
  const OracleBackend automatic{BackendMode::Auto, 25, 2e-2, 2'000'000, 500};
  const auto r = oracle.cond_prob({Site{1, 0}, empty, 5}, automatic, &stream);
  EXPECT_FALSE(r.exact);
  EXPECT_THROW(oracle.cond_prob({Site{1, 0}, empty, 5}, kExact), CapacityExceeded);
  OracleBackend tight = kExact;
  tight.exact_limit = 5;
  EXPECT_THROW(oracle.cond_prob({Site{1, 0}, PartialConfig(shared_ball(2)), 2}, tight),
               CapacityExceeded);
}

TEST(Oracle, IncompatibleConditioningIsReported) {
  ConditionalOracle oracle(0.5);
  PartialConfig eta(shared_ball(2));
  for (std::size_t i : eta.ball().ring(1)) eta.set(i, State::White);
  EXPECT_EQ(oracle.arm_probability(eta, 2), 0.0);
  EXPECT_THROW(oracle.cond_prob({Site{2, 0}, eta, 2}, kExact), IncompatibleConditioning);
  PartialConfig revealed(shared_ball(1));
  revealed.set(Site{1, 0}, State::Black);
  EXPECT_THROW(oracle.cond_prob({Site{1, 0}, revealed, 1}, kExact), std::invalid_argument);
}

TEST(Oracle, MarginalSumsToOneAndMatchesArm) {
  const auto ring = ring_sites(1);
  const auto t = exact_conditioned_marginal(ring, 1, 0.5);
  ASSERT_EQ(t.probs.size(), 64U);
  EXPECT_EQ(t.probs[0], 0.0);  // all-White ring 1 has no arm
  for (std::size_t a = 1; a < 64; ++a) EXPECT_DOUBLE_EQ(t.probs[a], 1.0 / 63.0);
  EXPECT_THROW(exact_conditioned_marginal(ring, 3, 0.5), CapacityExceeded);
}

TEST(Oracle, RejectionAcceptanceRate) {
  StreamRng rng(3, 4);
  std::uint64_t attempts = 0;
  const int samples = 100000;
  for (int i = 0; i < samples; ++i) {
    const auto s = sample_conditioned_rejection(1, 0.5, rng);
    ASSERT_TRUE(one_arm(s.config, 1));
    attempts += s.attempts;
  }
  const double rate = static_cast<double>(samples) / static_cast<double>(attempts);
  const double sigma = std::sqrt(kArm1 * (1 - kArm1) / static_cast<double>(attempts));
  EXPECT_NEAR(rate, kArm1, 4 * sigma);
}

TEST(Oracle, RejectionMarginalMatchesExact) {
  const auto ring = ring_sites(1);
  const auto exact = exact_conditioned_marginal(ring, 2, 0.5);
  const auto counts = rejection_histogram(ring, 2, 1'000'000, 0.5, 2024, 0);
  std::vector<double> empirical(counts.size());
  for (std::size_t a = 0; a < counts.size(); ++a) empirical[a] = static_cast<double>(counts[a]) / 1e6;
  EXPECT_LE(total_variation(exact.probs, empirical), 0.005);
}

TEST(Oracle, BackendNames) {
  EXPECT_EQ(backend_from_string("exact"), BackendMode::Exact);
  EXPECT_EQ(backend_from_string("mc"), BackendMode::MonteCarlo);
  EXPECT_EQ(backend_from_string("auto"), BackendMode::Auto);
  EXPECT_THROW(backend_from_string("fast"), std::invalid_argument);
}
