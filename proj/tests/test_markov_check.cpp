#include <gtest/gtest.h>

#include <algorithm>
#include <map>

#include "iic/errors.hpp"
#include "iic/markov_check.hpp"

using namespace iic;

TEST(MarkovCheck, CircuitsInBallOne) {
  const auto circuits = enumerate_circuits(1);
  ASSERT_EQ(circuits.size(), 1U);
  EXPECT_EQ(circuits[0].sites, ring_sites(1));
}

TEST(MarkovCheck, CircuitsInBallTwo) {
  // Counts by interior size, frozen from a separate flood-fill enumeration.
  const std::map<std::size_t, std::size_t> expected{{1, 4096}, {2, 3072}, {3, 1344}, {4, 400},
                                                    {5, 84},   {6, 12},   {7, 1}};
  std::map<std::size_t, std::size_t> got;
  const auto circuits = enumerate_circuits(2);
  for (const Circuit& c : circuits) {
    ++got[c.interior.size()];
    EXPECT_TRUE(c.in_interior(Site{0, 0}));
  }
  EXPECT_EQ(circuits.size(), 9009U);
  EXPECT_EQ(got, expected);
  EXPECT_THROW(enumerate_circuits(3), CapacityExceeded);
}

TEST(MarkovCheck, SampledTriplesSatisfyBothEqualities) {
  const auto circuits = enumerate_circuits(2);
  StreamRng rng(12, 0);
  const auto triples = sample_markov_triples(circuits, 2, 200, rng);
  ASSERT_EQ(triples.size(), 200U);
  for (const auto& t : triples) {
    for (Site s : t.gamma.sites) ASSERT_EQ(t.eta.at(s), State::Black);
    ASSERT_TRUE(compatible_with_arm(t.eta, 2));
    for (double p : {0.5, 0.3}) {
      const auto r = check_markov_triple(t, p);
      ASSERT_LE(r.tv_arm_vs_circuit, 1e-12);
      ASSERT_LE(r.tv_circuit_vs_interior, 1e-12);
      ASSERT_EQ(r.atoms, std::size_t{1} << t.gamma.interior.size());
    }
  }
}

TEST(MarkovCheck, StratifiedSamplingReachesLargeInteriors) {
  const auto circuits = enumerate_circuits(2);
  StreamRng rng(13, 0);
  std::map<std::size_t, int> sizes;
  for (const auto& t : sample_markov_triples(circuits, 2, 500, rng)) ++sizes[t.gamma.interior.size()];
  EXPECT_EQ(sizes.size(), 7U);
  EXPECT_GT(sizes[7], 0);
}

TEST(MarkovCheck, RejectsInvalidTriples) {
  const auto circuits = enumerate_circuits(2);
  MarkovTriple t{2, circuits.front(), PartialConfig(shared_ball(2))};
  EXPECT_THROW(check_markov_triple(t, 0.5), std::invalid_argument);  // Gamma not Black
  for (Site s : t.gamma.sites) t.eta.set(s, State::Black);
  EXPECT_NO_THROW(check_markov_triple(t, 0.5));
  MarkovTriple wrong_ball{2, circuits.front(), PartialConfig(shared_ball(1))};
  EXPECT_THROW(check_markov_triple(wrong_ball, 0.5), std::invalid_argument);
}

// Negative control: three ring-1 sites do not separate the origin, so the
// arm conditioning still biases the "interior" and the check must see it.
TEST(MarkovCheck, DetectsNonSeparatingSet) {
  Circuit fake;
  fake.sites = {Site{-1, 1}, Site{0, 1}, Site{1, 0}};
  std::sort(fake.sites.begin(), fake.sites.end());
  fake.interior = {Site{1, -1}, Site{0, 0}};
  std::sort(fake.interior.begin(), fake.interior.end());
  fake.window_radius = 3;
  PartialConfig eta(shared_ball(2));
  for (Site s : fake.sites) eta.set(s, State::Black);
  const auto r = check_markov_triple(MarkovTriple{2, fake, eta}, 0.5);
  EXPECT_GT(r.tv_arm_vs_circuit, 1e-6);
}
