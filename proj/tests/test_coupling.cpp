#include <gtest/gtest.h>

#include <sstream>

#include "iic/connectivity.hpp"
#include "iic/coupling.hpp"
#include "iic/errors.hpp"
#include "iic/estimator.hpp"
#include "iic/numeric.hpp"
#include "json.hpp"

using namespace iic;

namespace {

const OracleBackend kExact{BackendMode::Exact};

}  // namespace

TEST(Coupling, FirstStepsFollowCanonicalRingOrder) {
  ConditionalOracle oracle(0.5);
  ExplorationState s(2, 2, 0.5, UniformField(1, 0));
  // Initially the frontier is ring m, so the first site is its smallest one.
  const auto ring = ring_sites(2);
  EXPECT_EQ(s.next_site(), ring.front());
  s.reveal_step(oracle, kExact);
  EXPECT_EQ(s.order().front(), ring.front());
  EXPECT_EQ(s.trace().front().step, 1U);
}

TEST(Coupling, DominationAndTauOnEveryReplica) {
  ConditionalOracle oracle(0.5);
  for (std::uint64_t r = 0; r < 2000; ++r) {
    const auto out = run_coupling(1, 2, 2, UniformField(9, r), oracle, kExact);
    ASSERT_TRUE(dominated_by(out.omega, out.omega_m));
    ASSERT_TRUE(dominated_by(out.omega, out.omega_n));
    ASSERT_EQ(out.omega_m, out.omega_n);  // m == n: same thresholds, same uniforms
    ASSERT_EQ(out.hit, out.dual);
    ASSERT_GE(out.tau, 1U);
    ASSERT_EQ(out.order.size(), out.omega.size());
    ASSERT_TRUE(one_arm(out.omega_m, 2));
  }
}

TEST(Coupling, OmegaIsUnconditionedField) {
  ConditionalOracle oracle(0.5);
  const UniformField field(4, 17);
  const auto out = run_coupling(0, 1, 2, field, oracle, kExact);
  EXPECT_EQ(out.omega, full_random(shared_ball(1), 0.5, field));
}

TEST(Coupling, EventsAndAgreementAtZeroOneTwo) {
  ConditionalOracle oracle(0.5);
  CouplingBatch batch{0, 1, 2, 123, 0, 20000, kExact, {}};
  const auto s = run_coupling_batch(batch, oracle, 1);
  EXPECT_EQ(s.replicas, 20000U);
  EXPECT_EQ(s.event_mismatches, 0U);
  EXPECT_EQ(s.violations, 0U);
  EXPECT_EQ(s.circuits, s.replicas - s.hits);
  EXPECT_EQ(s.markov_mismatches, 0U);
  EXPECT_EQ(s.approximate_replicas, 0U);
  EXPECT_FALSE(s.first_bad_replica.has_value());
  // Hit rate estimates P(Lambda_0 <-*> dLambda_1) = 63/64.
  const auto ci = wilson_interval(s.hits, s.replicas, 4.0);
  EXPECT_LE(ci.lo, 63.0 / 64.0);
  EXPECT_GE(ci.hi, 63.0 / 64.0);
}

TEST(Coupling, NonHitReplicasCarryABlackCircuit) {
  ConditionalOracle oracle(0.5);
  int circuits = 0;
  for (std::uint64_t r = 0; r < 3000; ++r) {
    const auto out = run_coupling(0, 1, 2, UniformField(31, r), oracle, kExact);
    if (out.hit) continue;
    ASSERT_TRUE(out.gamma.has_value());
    const Circuit& g = *out.gamma;
    for (Site x : g.sites) {
      ASSERT_EQ(out.omega.at(x), State::Black);
      ASSERT_EQ(out.omega_m.at(x), State::Black);
      ASSERT_EQ(out.omega_n.at(x), State::Black);
    }
    ASSERT_TRUE(circles_around(g, Ball(0).sites()));
    ASSERT_TRUE(out.agree);
    ++circuits;
  }
  // Non-hit means ring 1 all Black: probability 1/64.
  EXPECT_GT(circuits, 20);
}

TEST(Coupling, AllBlackFieldGivesRingCircuit) {
  ConditionalOracle oracle(1.0);
  const OracleBackend exact_any{BackendMode::Exact, 64};
  for (int m = 1; m <= 3; ++m) {
    const auto out = run_coupling(0, m, m, UniformField(0, 0), oracle, exact_any);
    EXPECT_EQ(out.tau, static_cast<std::size_t>(6 * m));
    EXPECT_FALSE(out.hit);
    ASSERT_TRUE(out.gamma.has_value());
    EXPECT_EQ(out.gamma->sites, ring_sites(m));
  }
}

TEST(Coupling, HitIffDualWithCircuitsAtZeroTwoTwo) {
  ConditionalOracle oracle(0.5);
  std::uint64_t non_hit = 0;
  for (std::uint64_t r = 0; r < 5000; ++r) {
    const auto out = run_coupling(0, 2, 2, UniformField(77, r), oracle, kExact);
    ASSERT_EQ(out.hit, out.dual) << r;
    if (!out.hit) {
      ++non_hit;
      ASSERT_TRUE(out.gamma.has_value());
      ASSERT_TRUE(out.gamma->in_interior(Site{0, 0}));
    }
  }
  // P(no white crossing of Lambda_2 \ Lambda_0) ~ 3.4%.
  EXPECT_GT(non_hit, 100U);
}

TEST(Coupling, BallOneLawMatchesExactMarginal) {
  ConditionalOracle oracle(0.5);
  const auto ring = ring_sites(1);
  CouplingBatch batch{0, 1, 1, 5, 0, 1'000'000, kExact, ring};
  const auto s = run_coupling_batch(batch, oracle, 1);
  const auto exact = exact_conditioned_marginal(ring, 1, 0.5);
  std::vector<double> empirical(s.omega_m_atoms.size());
  for (std::size_t a = 0; a < empirical.size(); ++a) {
    empirical[a] = static_cast<double>(s.omega_m_atoms[a]) / static_cast<double>(s.replicas);
  }
  EXPECT_LE(total_variation(exact.probs, empirical), 0.005);
  EXPECT_EQ(s.omega_m_atoms, s.omega_n_atoms);
}

TEST(Coupling, BatchIsIndependentOfWorkerCount) {
  ConditionalOracle oracle(0.5);
  CouplingBatch batch{0, 1, 2, 99, 10, 5000, kExact, ring_sites(1)};
  const auto one = run_coupling_batch(batch, oracle, 1);
  const auto four = run_coupling_batch(batch, oracle, 4);
  EXPECT_EQ(one.hits, four.hits);
  EXPECT_EQ(one.duals, four.duals);
  EXPECT_EQ(one.agrees, four.agrees);
  EXPECT_EQ(one.omega_n_atoms, four.omega_n_atoms);
  EXPECT_EQ(one.markov_checked, four.markov_checked);
}

TEST(Coupling, MergeIsCommutative) {
  CouplingSummary a, b;
  a.replicas = 3;
  a.hits = 1;
  a.omega_atoms = {1, 2};
  a.first_bad_replica = 7;
  b.replicas = 5;
  b.hits = 4;
  b.omega_atoms = {3, 0, 1};
  b.first_bad_replica = 2;
  CouplingSummary ab = a, ba = b;
  ab.merge(b);
  ba.merge(a);
  EXPECT_EQ(ab.replicas, ba.replicas);
  EXPECT_EQ(ab.hits, ba.hits);
  EXPECT_EQ(ab.omega_atoms, ba.omega_atoms);
  EXPECT_EQ(ab.first_bad_replica, ba.first_bad_replica);
  EXPECT_EQ(*ab.first_bad_replica, 2U);
}

TEST(Coupling, DeterministicTrace) {
  ConditionalOracle first(0.5), second(0.5);
  const auto a = run_coupling(1, 2, 2, UniformField(8, 3), first, kExact);
  const auto b = run_coupling(1, 2, 2, UniformField(8, 3), second, kExact);
  std::ostringstream ja, jb;
  write_trace_jsonl(ja, 3, a.trace);
  write_trace_jsonl(jb, 3, b.trace);
  EXPECT_EQ(ja.str(), jb.str());

  std::istringstream lines(ja.str());
  std::string line;
  std::size_t count = 0;
  while (std::getline(lines, line)) {
    const auto j = nlohmann::json::parse(line);
    EXPECT_EQ(j["replica"], 3);
    EXPECT_EQ(j["step"], count + 1);
    EXPECT_EQ(j["site"].size(), 2U);
    EXPECT_GE(j["thr_m"].get<double>(), 0.5);
    EXPECT_TRUE(j.contains("omega_n"));
    ++count;
  }
  EXPECT_EQ(count, a.trace.size());
}

TEST(Coupling, ExhaustedStateThrows) {
  ConditionalOracle oracle(0.5);
  ExplorationState s(1, 1, 0.5, UniformField(2, 2));
  while (!s.exhausted()) s.reveal_step(oracle, kExact);
  EXPECT_THROW(s.next_site(), Exhausted);
  EXPECT_THROW(run_coupling(2, 1, 2, UniformField(0, 0), oracle, kExact), std::invalid_argument);
}

TEST(Coupling, MonteCarloBackendMarksApproximate) {
  ConditionalOracle oracle(0.5);
  const OracleBackend mc{BackendMode::MonteCarlo, 25, 2e-2, 200'000, 500};
  const auto out = run_coupling(0, 1, 2, UniformField(6, 6), oracle, mc);
  EXPECT_TRUE(out.approximate);
  EXPECT_TRUE(dominated_by(out.omega, out.omega_n));
  const auto again = run_coupling(0, 1, 2, UniformField(6, 6), oracle, mc);
  EXPECT_EQ(out.omega_n, again.omega_n);
}
