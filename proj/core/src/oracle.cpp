#include "iic/oracle.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <stdexcept>
#include <string>

#include "iic/connectivity.hpp"
#include "iic/errors.hpp"
#include "iic/numeric.hpp"

namespace iic {

const char* to_string(BackendMode mode) {
  switch (mode) {
    case BackendMode::Exact:
      return "exact";
    case BackendMode::MonteCarlo:
      return "mc";
    case BackendMode::Auto:
      return "auto";
  }
  return "?";
}

BackendMode backend_from_string(std::string_view text) {
  if (text == "exact") return BackendMode::Exact;
  if (text == "mc") return BackendMode::MonteCarlo;
  if (text == "auto") return BackendMode::Auto;
  throw std::invalid_argument("unknown backend '" + std::string(text) + "'");
}

std::size_t MarginalTable::atom_of(const PartialConfig& c) const {
  std::size_t atom = 0;
  for (std::size_t j = 0; j < region.size(); ++j) {
    const State s = c.at(region[j]);
    if (s == State::Unrevealed) throw std::invalid_argument("region site unrevealed");
    if (s == State::Black) atom |= std::size_t{1} << j;
  }
  return atom;
}

std::size_t ConditionalOracle::KeyHash::operator()(const Key& k) const noexcept {
  return static_cast<std::size_t>(
      hash3(k.black, k.free, static_cast<std::uint64_t>(k.radius)));
}

ConditionalOracle::ConditionalOracle(double p) : p_(p) {
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("conditional oracle needs p in (0, 1]");
  for (int n = 0; n <= MaskBall::kMaxRadius; ++n) {
    const Ball& ball = shared_mask_ball(n).ball();
    auto& order = branch_order_[static_cast<std::size_t>(n)];
    for (std::size_t i = 0; i < ball.size(); ++i) {
      if (ball.distance(i) > 0) order.push_back(static_cast<int>(i));
    }
    // Inner rings first: they decide the arm soonest.
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return ball.distance(static_cast<std::size_t>(a)) < ball.distance(static_cast<std::size_t>(b));
    });
  }
}

std::uint64_t ConditionalOracle::cache_entries() const {
  std::uint64_t total = 0;
  for (auto& shard : shards_) {
    std::lock_guard lock(shard.mu);
    total += shard.map.size();
  }
  return total;
}

double ConditionalOracle::branch(const MaskBall& mb, int n, std::uint64_t black,
                                 std::uint64_t free, std::uint64_t& nodes) const {
  ++nodes;
  if (!mb.one_arm(black | free, n)) return 0.0;
  if (mb.one_arm(black, n)) return 1.0;
  // Grow the Black cluster of ring 1: only free sites on its outer boundary
  // can extend it, so branching elsewhere first would only multiply leaves.
  std::uint64_t cluster = black & mb.ring(1);
  for (std::uint64_t grow = cluster; grow;) {
    grow = mb.dilate(grow) & black & ~cluster;
    cluster |= grow;
  }
  const std::uint64_t boundary = (mb.ring(1) | mb.dilate(cluster)) & free;
  const std::uint64_t candidates = boundary ? boundary : free;
  std::uint64_t pick = 0;
  for (int i : branch_order_[static_cast<std::size_t>(n)]) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    if (candidates & bit) {
      pick = bit;
      break;
    }
  }
  const std::uint64_t rest = free & ~pick;
  const double z_black = p_ > 0.0 ? branch(mb, n, black | pick, rest, nodes) : 0.0;
  const double z_white = p_ < 1.0 ? branch(mb, n, black, rest, nodes) : 0.0;
  return p_ * z_black + (1.0 - p_) * z_white;
}

double ConditionalOracle::memo_z(const MaskBall& mb, int n, std::uint64_t black,
                                 std::uint64_t free) {
  const Key key{black, free, n};
  Shard& shard = shards_[KeyHash{}(key) % kShards];
  {
    std::lock_guard lock(shard.mu);
    auto it = shard.map.find(key);
    if (it != shard.map.end()) return it->second;
  }
  std::uint64_t nodes = 0;
  const double z = branch(mb, n, black, free, nodes);
  nodes_.fetch_add(nodes, std::memory_order_relaxed);
  std::lock_guard lock(shard.mu);
  shard.map.emplace(key, z);
  return z;
}

double ConditionalOracle::arm_probability(const PartialConfig& eta, int n) {
  if (eta.ball().radius() > n) throw std::invalid_argument("revealed ball larger than arm radius");
  const MaskBall& mb = shared_mask_ball(n);
  const PartialConfig emb = eta.ball().radius() == n ? eta : eta.embed(mb.ball_ptr());
  auto [black, white] = mb.pack(emb);
  const std::uint64_t origin = mb.bit(Site{0, 0});
  black &= ~origin;
  const std::uint64_t free = mb.all() & ~(black | white) & ~origin;
  return memo_z(mb, n, black, free);
}

CondResult ConditionalOracle::cond_prob(const CondQuery& q, const OracleBackend& backend,
                                        StreamRng* rng) {
  const int n = q.arm_radius;
  if (n < 0) throw std::invalid_argument("negative arm radius");
  if (q.revealed.ball().radius() > n) {
    throw std::invalid_argument("revealed configuration extends beyond Lambda_n");
  }
  if (norm(q.target) > n) throw std::invalid_argument("target outside Lambda_n");
  if (q.revealed.at(q.target) != State::Unrevealed) {
    throw std::invalid_argument("target site already revealed");
  }
  const auto ball = shared_ball(n);
  const PartialConfig eta = q.revealed.ball().radius() == n ? q.revealed : q.revealed.embed(ball);
  const std::size_t unrevealed = eta.unrevealed_count();
  const bool fits = n <= MaskBall::kMaxRadius && unrevealed <= backend.exact_limit;

  bool use_exact = false;
  switch (backend.mode) {
    case BackendMode::Exact:
      if (!fits) {
        throw CapacityExceeded("exact oracle: " + std::to_string(unrevealed) +
                               " unrevealed sites at radius " + std::to_string(n) +
                               " (limit " + std::to_string(backend.exact_limit) + ", radius <= " +
                               std::to_string(MaskBall::kMaxRadius) + ")");
      }
      use_exact = true;
      break;
    case BackendMode::MonteCarlo:
      break;
    case BackendMode::Auto:
      use_exact = fits;
      break;
  }
  if (use_exact) return exact(shared_mask_ball(n), n, eta, q.target);
  if (rng == nullptr) throw std::invalid_argument("Monte Carlo backend needs a random stream");
  return monte_carlo(n, eta, q.target, backend, *rng);
}

CondResult ConditionalOracle::exact(const MaskBall& mb, int n, const PartialConfig& eta,
                                    Site target) {
  auto [black, white] = mb.pack(eta);
  const std::uint64_t origin = mb.bit(Site{0, 0});
  black &= ~origin;
  const std::uint64_t free = mb.all() & ~(black | white) & ~origin;
  const double z = memo_z(mb, n, black, free);
  if (!(z > 0.0)) throw IncompatibleConditioning("revealed sites exclude the one-arm event");

  double threshold = p_;
  if (target != Site{0, 0}) {
    const std::uint64_t t = mb.bit(target);
    const double z_black = memo_z(mb, n, black | t, free & ~t);
    threshold = p_ * z_black / z;
  }
  exact_thresholds_.fetch_add(1, std::memory_order_relaxed);
  // Rounding can put an equality case a few ulps below p; anything further
  // off is a real violation.
  if (!(threshold >= p_ - kFkgSlack) || threshold > 1.0 + kFkgSlack) {
    throw InvariantViolation("exact threshold " + std::to_string(threshold) +
                             " outside [p, 1] (FKG lower bound)");
  }
  threshold = std::clamp(threshold, p_, 1.0);
  return CondResult{threshold, true, 0.0, 0, 0};
}

CondResult ConditionalOracle::monte_carlo(int n, const PartialConfig& eta, Site target,
                                          const OracleBackend& backend, StreamRng& rng) {
  if (!compatible_with_arm(eta, n)) {
    throw IncompatibleConditioning("revealed sites exclude the one-arm event");
  }
  std::uint64_t accepted = 0;
  std::uint64_t hits = 0;
  std::uint64_t attempts = 0;
  auto converged = [&] {
    return accepted >= backend.mc_min_accepted &&
           wilson_interval(hits, accepted).halfwidth() <= backend.mc_tolerance;
  };

  if (n <= MaskBall::kMaxRadius) {
    const MaskBall& mb = shared_mask_ball(n);
    const auto [black, white] = mb.pack(eta);
    const std::uint64_t free = mb.all() & ~(black | white);
    const std::uint64_t t = mb.bit(target);
    while (attempts < backend.mc_max_samples) {
      std::uint64_t sample = black;
      if (p_ == 0.5) {
        sample |= rng() & free;
      } else {
        for (std::uint64_t f = free; f; f &= f - 1) {
          if (rng.uniform() <= p_) sample |= f & (~f + 1);
        }
      }
      ++attempts;
      if (mb.one_arm(sample, n)) {
        ++accepted;
        if (sample & t) ++hits;
      }
      if ((attempts & 255U) == 0 && converged()) break;
    }
  } else {
    PartialConfig sample = eta;
    const auto free = [&] {
      std::vector<std::size_t> out;
      for (std::size_t i = 0; i < eta.size(); ++i) {
        if (!eta.revealed(i)) out.push_back(i);
      }
      return out;
    }();
    const std::size_t t = eta.ball().index_unchecked(target);
    while (attempts < backend.mc_max_samples) {
      for (std::size_t i : free) sample.set(i, rng.uniform() <= p_ ? State::Black : State::White);
      ++attempts;
      if (one_arm(sample, n)) {
        ++accepted;
        if (sample.at(t) == State::Black) ++hits;
      }
      if ((attempts & 255U) == 0 && converged()) break;
    }
  }
  if (accepted == 0) {
    throw RetryLimitExceeded("no accepted completion in " + std::to_string(attempts) + " draws");
  }
  const double estimate = static_cast<double>(hits) / static_cast<double>(accepted);
  CondResult out;
  // The true value is at least p (FKG), so project the estimate onto [p, 1].
  out.probability = std::max(estimate, p_);
  out.exact = false;
  out.ci_halfwidth = wilson_interval(hits, accepted).halfwidth();
  out.accepted = accepted;
  out.attempts = attempts;
  return out;
}

namespace {

const MaskBall& enumerable_ball(int radius) {
  if (radius > 2) {
    throw CapacityExceeded("exact enumeration supports Ball(2) (2^19 states); radius " +
                           std::to_string(radius) + " requested");
  }
  return shared_mask_ball(radius);
}

std::vector<double> popcount_weights(std::size_t sites, double p) {
  std::vector<double> w(sites + 1);
  for (std::size_t b = 0; b <= sites; ++b) {
    w[b] = std::pow(p, static_cast<double>(b)) * std::pow(1.0 - p, static_cast<double>(sites - b));
  }
  return w;
}

template <class Event>
double enumerate_probability(const MaskBall& mb, double p, Event&& event) {
  const auto weights = popcount_weights(mb.size(), p);
  KahanSum total;
  const std::uint64_t states = std::uint64_t{1} << mb.size();
  for (std::uint64_t cfg = 0; cfg < states; ++cfg) {
    if (event(cfg)) total.add(weights[static_cast<std::size_t>(std::popcount(cfg))]);
  }
  return total.value();
}

}  // namespace

MarginalTable exact_conditioned_marginal(std::span<const Site> region, int n, double p) {
  if (n < 0) throw std::invalid_argument("negative arm radius");
  MarginalTable table;
  table.region.assign(region.begin(), region.end());
  std::sort(table.region.begin(), table.region.end());
  table.region.erase(std::unique(table.region.begin(), table.region.end()), table.region.end());
  int reach = n;
  for (const Site& s : table.region) reach = std::max(reach, norm(s));
  const MaskBall& mb = enumerable_ball(reach);

  std::vector<int> bits;
  for (const Site& s : table.region) bits.push_back(static_cast<int>(mb.ball().index_unchecked(s)));
  const auto weights = popcount_weights(mb.size(), p);
  std::vector<KahanSum> atoms(std::size_t{1} << bits.size());
  KahanSum total;
  const std::uint64_t states = std::uint64_t{1} << mb.size();
  for (std::uint64_t cfg = 0; cfg < states; ++cfg) {
    if (!mb.one_arm(cfg, n)) continue;
    const double w = weights[static_cast<std::size_t>(std::popcount(cfg))];
    std::size_t atom = 0;
    for (std::size_t j = 0; j < bits.size(); ++j) {
      if ((cfg >> bits[j]) & 1U) atom |= std::size_t{1} << j;
    }
    atoms[atom].add(w);
    total.add(w);
  }
  const double z = total.value();
  if (!(z > 0.0)) throw IncompatibleConditioning("one-arm event has probability zero");
  table.probs.resize(atoms.size());
  for (std::size_t a = 0; a < atoms.size(); ++a) table.probs[a] = atoms[a].value() / z;
  return table;
}

double exact_dual_arm_probability(int k, int m, double p) {
  if (k < 0 || k > m) throw std::invalid_argument("need 0 <= k <= m");
  if (k == m) return 1.0;
  const MaskBall& mb = enumerable_ball(m);
  return enumerate_probability(mb, p, [&](std::uint64_t cfg) {
    return mb.dual_arm(mb.all() & ~cfg, k, m);
  });
}

double exact_one_arm_probability(int n, double p) {
  if (n < 0) throw std::invalid_argument("negative radius");
  if (n == 0) return 1.0;
  const MaskBall& mb = enumerable_ball(n);
  return enumerate_probability(mb, p, [&](std::uint64_t cfg) { return mb.one_arm(cfg, n); });
}

RejectionSample sample_conditioned_rejection(int n, double p, StreamRng& rng,
                                             std::uint64_t max_attempts) {
  if (n < 0) throw std::invalid_argument("negative radius");
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("p must lie in [0, 1]");
  const auto ball = shared_ball(n);
  PartialConfig config(ball);
  for (std::uint64_t attempt = 1; attempt <= max_attempts; ++attempt) {
    if (n <= MaskBall::kMaxRadius) {
      const MaskBall& mb = shared_mask_ball(n);
      std::uint64_t cfg = 0;
      if (p == 0.5) {
        cfg = rng() & mb.all();
      } else {
        for (std::size_t i = 0; i < mb.size(); ++i) {
          if (rng.uniform() <= p) cfg |= std::uint64_t{1} << i;
        }
      }
      if (!mb.one_arm(cfg, n)) continue;
      for (std::size_t i = 0; i < mb.size(); ++i) {
        config.set(i, (cfg >> i) & 1U ? State::Black : State::White);
      }
      return RejectionSample{std::move(config), attempt};
    }
    for (std::size_t i = 0; i < config.size(); ++i) {
      config.set(i, rng.uniform() <= p ? State::Black : State::White);
    }
    if (one_arm(config, n)) return RejectionSample{std::move(config), attempt};
  }
  throw RetryLimitExceeded("no one-arm configuration at radius " + std::to_string(n) + " in " +
                           std::to_string(max_attempts) + " attempts");
}

}  // namespace iic
