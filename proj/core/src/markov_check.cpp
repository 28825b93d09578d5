#include "iic/markov_check.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <map>
#include <stdexcept>

#include "iic/arm_masks.hpp"
#include "iic/errors.hpp"
#include "iic/numeric.hpp"

namespace iic {

namespace {

bool set_connected(const MaskBall& mb, std::uint64_t set) {
  if (set == 0) return false;
  std::uint64_t reach = set & (~set + 1);
  std::uint64_t frontier = reach;
  while (frontier) {
    const std::uint64_t grow = mb.dilate(frontier) & set & ~reach;
    reach |= grow;
    frontier = grow;
  }
  return reach == set;
}

std::vector<double> normalised(std::vector<KahanSum>& acc) {
  KahanSum total;
  for (auto& a : acc) total.add(a.value());
  const double z = total.value();
  if (!(z > 0.0)) throw IncompatibleConditioning("conditioning event has probability zero");
  std::vector<double> out(acc.size());
  for (std::size_t i = 0; i < acc.size(); ++i) out[i] = acc[i].value() / z;
  return out;
}

double half_l1(const std::vector<double>& a, const std::vector<double>& b, double& max_diff) {
  KahanSum s;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = std::abs(a[i] - b[i]);
    max_diff = std::max(max_diff, d);
    s.add(d);
  }
  return 0.5 * s.value();
}

}  // namespace

std::vector<Circuit> enumerate_circuits(int n) {
  if (n < 1) return {};
  if (n > 2) throw CapacityExceeded("circuit enumeration supports n <= 2");
  const MaskBall& mb = shared_mask_ball(n);
  const std::uint64_t origin = mb.bit(Site{0, 0});
  const std::uint64_t candidates = mb.all() & ~origin;
  const std::uint64_t outer_ring = mb.ring(n);
  std::vector<Circuit> out;
  const int free_bits = std::popcount(candidates);
  for (std::uint64_t j = 1; j < (std::uint64_t{1} << free_bits); ++j) {
    const std::uint64_t gamma = deposit_bits(j, candidates);
    // The origin's side must stay away from the free part of the outer ring,
    // which touches the outside of the ball.
    std::uint64_t reach = origin;
    std::uint64_t frontier = origin;
    const std::uint64_t open = mb.all() & ~gamma;
    while (frontier) {
      const std::uint64_t grow = mb.dilate(frontier) & open & ~reach;
      reach |= grow;
      frontier = grow;
    }
    if (reach & outer_ring) continue;
    if (!set_connected(mb, gamma)) continue;
    std::vector<Site> sites;
    for (std::uint64_t g = gamma; g; g &= g - 1) {
      sites.push_back(mb.ball().site(static_cast<std::size_t>(std::countr_zero(g))));
    }
    try {
      Circuit c = verify_circuit(sites, n + 2);
      if (c.in_interior(Site{0, 0})) out.push_back(std::move(c));
    } catch (const NotACircuit&) {
    }
  }
  return out;
}

MarkovCheck check_markov_triple(const MarkovTriple& t, double p) {
  const int n = t.n;
  const MaskBall& mb = shared_mask_ball(n);
  if (t.eta.ball().radius() != n) throw std::invalid_argument("eta must live on Ball(n)");
  const auto [eta_black, eta_white] = mb.pack(t.eta);
  const std::uint64_t revealed = eta_black | eta_white;
  const std::uint64_t gamma = mb.mask_of(t.gamma.sites);
  const std::uint64_t inside = mb.mask_of(t.gamma.interior);
  const std::uint64_t origin = mb.bit(Site{0, 0});
  if ((gamma & ~eta_black) != 0) throw std::invalid_argument("circuit must be Black in eta");
  if (!mb.one_arm(mb.all() & ~eta_white, n)) {
    throw std::invalid_argument("eta incompatible with the one-arm event");
  }

  std::vector<int> inside_bits;
  for (std::uint64_t m = inside; m; m &= m - 1) inside_bits.push_back(std::countr_zero(m));
  auto atom = [&](std::uint64_t cfg) {
    std::size_t a = 0;
    for (std::size_t j = 0; j < inside_bits.size(); ++j) {
      if ((cfg >> inside_bits[j]) & 1U) a |= std::size_t{1} << j;
    }
    return a;
  };
  auto to_gamma = [&](std::uint64_t cfg) { return mb.connects(cfg, origin, gamma, mb.all()); };
  auto weight = [&](std::uint64_t black_bits, std::uint64_t free_count) {
    const auto b = static_cast<double>(std::popcount(black_bits));
    return std::pow(p, b) * std::pow(1.0 - p, static_cast<double>(free_count) - b);
  };

  const std::size_t atoms = std::size_t{1} << inside_bits.size();
  std::vector<KahanSum> arm(atoms), circuit(atoms), interior(atoms);

  // (1), (2): completions of every unrevealed site of the ball.
  const std::uint64_t open = mb.all() & ~revealed;
  const int open_count = std::popcount(open);
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << open_count); ++j) {
    const std::uint64_t fill = deposit_bits(j, open);
    const std::uint64_t cfg = eta_black | fill;
    const double w = weight(fill, static_cast<std::uint64_t>(open_count));
    if (mb.one_arm(cfg, n)) arm[atom(cfg)].add(w);
    if (to_gamma(cfg)) circuit[atom(cfg)].add(w);
  }
  // (3): only the interior is random; S outside the circuit is forgotten and
  // the exterior is irrelevant to {0 <-> Gamma}.
  const std::uint64_t inner_open = inside & ~revealed;
  const int inner_count = std::popcount(inner_open);
  const std::uint64_t inner_fixed = (eta_black & inside) | gamma;
  for (std::uint64_t j = 0; j < (std::uint64_t{1} << inner_count); ++j) {
    const std::uint64_t fill = deposit_bits(j, inner_open);
    const std::uint64_t cfg = inner_fixed | fill;
    if (to_gamma(cfg)) {
      interior[atom(cfg)].add(weight(fill, static_cast<std::uint64_t>(inner_count)));
    }
  }

  const auto t1 = normalised(arm);
  const auto t2 = normalised(circuit);
  const auto t3 = normalised(interior);
  MarkovCheck out;
  out.atoms = atoms;
  out.tv_arm_vs_circuit = half_l1(t1, t2, out.max_atom_diff);
  out.tv_circuit_vs_interior = half_l1(t2, t3, out.max_atom_diff);
  return out;
}

std::vector<MarkovTriple> sample_markov_triples(const std::vector<Circuit>& circuits, int n,
                                                std::size_t count, StreamRng& rng) {
  if (circuits.empty()) throw std::invalid_argument("no circuits to sample from");
  std::map<std::size_t, std::vector<const Circuit*>> by_interior;
  for (const Circuit& c : circuits) by_interior[c.interior.size()].push_back(&c);
  std::vector<const std::vector<const Circuit*>*> classes;
  for (const auto& [size, group] : by_interior) classes.push_back(&group);

  const MaskBall& mb = shared_mask_ball(n);
  std::vector<MarkovTriple> out;
  while (out.size() < count) {
    const auto& group = *classes[rng() % classes.size()];
    const Circuit& c = *group[rng() % group.size()];
    PartialConfig eta(mb.ball_ptr());
    for (std::size_t i = 0; i < eta.size(); ++i) {
      const Site s = mb.ball().site(i);
      if (c.on_circuit(s)) {
        eta.set(i, State::Black);
      } else if (rng() & 1U) {
        eta.set(i, (rng() & 1U) ? State::Black : State::White);
      }
    }
    if (!compatible_with_arm(eta, n)) continue;
    out.push_back(MarkovTriple{n, c, std::move(eta)});
  }
  return out;
}

}  // namespace iic
