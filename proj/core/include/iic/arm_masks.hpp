#pragma once

#include <bit>
#include <cstdint>
#include <memory>
#include <vector>

#include "iic/configuration.hpp"
#include "iic/lattice.hpp"

namespace iic {

/// A ball of at most 64 sites with every site set held in one machine word.
/// Bit i is the site with canonical index i. Used by the exact enumerators,
/// where the same connection query runs millions of times.
class MaskBall {
 public:
  static constexpr int kMaxRadius = 4;  // |Ball(4)| = 61

  explicit MaskBall(int radius);

  int radius() const { return ball_->radius(); }
  std::size_t size() const { return ball_->size(); }
  const Ball& ball() const { return *ball_; }
  const std::shared_ptr<const Ball>& ball_ptr() const { return ball_; }

  std::uint64_t all() const { return all_; }
  std::uint64_t ring(int d) const { return ring_[static_cast<std::size_t>(d)]; }
  /// Lambda_d as a mask.
  std::uint64_t disk(int d) const { return disk_[static_cast<std::size_t>(d)]; }
  std::uint64_t bit(Site s) const { return std::uint64_t{1} << ball_->index_unchecked(s); }
  std::uint64_t mask_of(std::span<const Site> sites) const;

  std::uint64_t dilate(std::uint64_t set) const {
    std::uint64_t out = 0;
    while (set) {
      out |= neighbors_[static_cast<std::size_t>(std::countr_zero(set))];
      set &= set - 1;
    }
    return out;
  }

  /// Generic {S <-> T} restricted to `allowed` sites, with the adjacency
  /// convention. `colored` is the set of sites carrying the path colour.
  bool connects(std::uint64_t colored, std::uint64_t from, std::uint64_t to,
                std::uint64_t allowed) const;

  /// {0 <-> dLambda_n} for the Black set `black`, n <= radius.
  bool one_arm(std::uint64_t black, int n) const;
  /// {Lambda_k <-*> dLambda_m} for the White set `white`, k <= m <= radius.
  bool dual_arm(std::uint64_t white, int k, int m) const;

  /// Pack a partial configuration on this ball: {black, white} masks.
  std::pair<std::uint64_t, std::uint64_t> pack(const PartialConfig& c) const;

 private:
  bool crossing(std::uint64_t colored, int inner, int outer) const;

  std::shared_ptr<const Ball> ball_;
  std::uint64_t all_ = 0;
  std::vector<std::uint64_t> ring_;
  std::vector<std::uint64_t> disk_;
  std::vector<std::uint64_t> neighbors_;
};

/// Process-wide cache, radius <= MaskBall::kMaxRadius.
const MaskBall& shared_mask_ball(int radius);

/// Scatter the low bits of `value` into the set bits of `mask` (software pdep).
inline std::uint64_t deposit_bits(std::uint64_t value, std::uint64_t mask) {
  std::uint64_t out = 0;
  while (mask) {
    const std::uint64_t low = mask & (~mask + 1);
    if (value & 1U) out |= low;
    value >>= 1;
    mask &= mask - 1;
  }
  return out;
}

}  // namespace iic
