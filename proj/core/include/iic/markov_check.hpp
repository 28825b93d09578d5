#pragma once

#include <cstdint>
#include <vector>

#include "iic/configuration.hpp"
#include "iic/lattice.hpp"
#include "iic/uniform_field.hpp"

namespace iic {

/// Brute-force check of the spatial Markov property of the one-arm measure
/// with respect to a Black circuit Gamma around the origin: for eta on
/// S ⊇ Gamma with Gamma Black and eta compatible with {0 <-> dLambda_n}, the
/// law of the configuration inside Gamma is the same under
///   (1) eps_S = eta, 0 <-> dLambda_n
///   (2) eps_S = eta, 0 <-> Gamma
///   (3) eps_{S ∩ int} = eta_{S ∩ int}, 0 <-> Gamma.
/// Laws are compared as full atom tables over int(Gamma), so the reported
/// total variation bounds the difference for every event inside Gamma.

struct MarkovTriple {
  int n = 0;
  Circuit gamma;
  PartialConfig eta;  // on Ball(n); revealed sites are S
};

struct MarkovCheck {
  double tv_arm_vs_circuit = 0.0;       // (1) vs (2)
  double tv_circuit_vs_interior = 0.0;  // (2) vs (3)
  double max_atom_diff = 0.0;
  std::size_t atoms = 0;
};

/// Every connected site set Gamma ⊆ Lambda_n \ {0} that passes
/// verify_circuit with the origin inside. n <= 2.
std::vector<Circuit> enumerate_circuits(int n);

MarkovCheck check_markov_triple(const MarkovTriple& t, double p);

/// Draws triples: circuit chosen uniformly within a uniformly chosen
/// interior size, S = Gamma plus each other site with probability 1/2, eta
/// Black on Gamma and fair coin flips elsewhere, rejected unless compatible.
std::vector<MarkovTriple> sample_markov_triples(const std::vector<Circuit>& circuits, int n,
                                                std::size_t count, StreamRng& rng);

}  // namespace iic
