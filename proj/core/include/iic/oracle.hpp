#pragma once

#include <array>
#include <atomic>
#include <cstdint>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "iic/arm_masks.hpp"
#include "iic/configuration.hpp"
#include "iic/lattice.hpp"
#include "iic/uniform_field.hpp"

namespace iic {

enum class BackendMode { Exact, MonteCarlo, Auto };

const char* to_string(BackendMode mode);
BackendMode backend_from_string(std::string_view text);

struct OracleBackend {
  BackendMode mode = BackendMode::Auto;
  /// Exact enumeration is refused above this many Unrevealed sites.
  std::size_t exact_limit = 25;
  /// Target Wilson 95% half-width for Monte Carlo estimates.
  double mc_tolerance = 1e-3;
  std::uint64_t mc_max_samples = 20'000'000;
  std::uint64_t mc_min_accepted = 1'000;
};

/// P(eps_target = Black | eps_S = revealed, 0 <-> dLambda_n) at parameter p.
struct CondQuery {
  Site target;
  const PartialConfig& revealed;  // ball radius <= arm_radius
  int arm_radius;
};

struct CondResult {
  double probability = 0.0;
  bool exact = true;
  double ci_halfwidth = 0.0;
  std::uint64_t accepted = 0;
  std::uint64_t attempts = 0;
};

/// Exact distribution of eps_region under P(. | 0 <-> dLambda_n). Atom j has
/// bit b set iff region[b] is Black.
struct MarginalTable {
  std::vector<Site> region;  // canonical order
  std::vector<double> probs;

  std::size_t atom_of(const PartialConfig& c) const;
};

struct RejectionSample {
  PartialConfig config;
  std::uint64_t attempts = 0;
};

/// Conditional laws of the one-arm-conditioned measure at a fixed p.
///
/// Exact answers come from branch-and-bound enumeration of completions: a
/// subtree is cut as soon as its all-Black completion misses the arm (mass 0)
/// or its all-White completion already has it (mass 1). Results are memoised
/// per (radius, revealed configuration); the cache is shared by all threads
/// and its contents never depend on call order.
///
/// Every exact threshold is checked against the FKG lower bound p; a failure
/// throws InvariantViolation.
class ConditionalOracle {
 public:
  /// Rounding allowance of the FKG check; thresholds are clamped to [p, 1].
  static constexpr double kFkgSlack = 1e-12;

  explicit ConditionalOracle(double p);

  double p() const { return p_; }

  /// P(0 <-> dLambda_n | eps_S = eta) for eta given on Ball(r), r <= n.
  double arm_probability(const PartialConfig& eta, int n);

  CondResult cond_prob(const CondQuery& q, const OracleBackend& backend, StreamRng* rng = nullptr);

  /// Number of exact thresholds computed (each one FKG-checked).
  std::uint64_t exact_thresholds() const { return exact_thresholds_.load(); }
  std::uint64_t cache_entries() const;

  /// Branch-and-bound leaves and cuts visited so far.
  std::uint64_t nodes_visited() const { return nodes_.load(); }

 private:
  struct Key {
    std::uint64_t black;
    std::uint64_t free;
    int radius;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  struct Shard {
    std::mutex mu;
    std::unordered_map<Key, double, KeyHash> map;
  };
  static constexpr std::size_t kShards = 64;

  double memo_z(const MaskBall& mb, int n, std::uint64_t black, std::uint64_t free);
  double branch(const MaskBall& mb, int n, std::uint64_t black, std::uint64_t free,
                std::uint64_t& nodes) const;
  CondResult exact(const MaskBall& mb, int n, const PartialConfig& eta, Site target);
  CondResult monte_carlo(int n, const PartialConfig& eta, Site target,
                         const OracleBackend& backend, StreamRng& rng);

  double p_;
  mutable std::array<Shard, kShards> shards_;
  std::array<std::vector<int>, MaskBall::kMaxRadius + 1> branch_order_;
  std::atomic<std::uint64_t> exact_thresholds_{0};
  std::atomic<std::uint64_t> nodes_{0};
};

/// Enumerates Ball(R), R = max(n, radius of region); requires |Ball(R)| <= 19.
MarginalTable exact_conditioned_marginal(std::span<const Site> region, int n, double p);

/// Exact P(Lambda_k <-*> dLambda_m) by enumeration of Ball(m), m <= 2.
double exact_dual_arm_probability(int k, int m, double p);
/// Exact P(0 <-> dLambda_n) by enumeration of Ball(n), n <= 2.
double exact_one_arm_probability(int n, double p);

/// Draw unconditioned configurations on Ball(n) until one has the one-arm.
RejectionSample sample_conditioned_rejection(int n, double p, StreamRng& rng,
                                             std::uint64_t max_attempts = 10'000'000);

}  // namespace iic
