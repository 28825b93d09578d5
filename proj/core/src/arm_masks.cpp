#include "iic/arm_masks.hpp"

#include <array>
#include <mutex>
#include <stdexcept>

#include "iic/errors.hpp"

namespace iic {

MaskBall::MaskBall(int radius) {
  if (radius < 0 || radius > kMaxRadius) {
    throw CapacityExceeded("bit-mask ball supports radius <= " + std::to_string(kMaxRadius));
  }
  ball_ = shared_ball(radius);
  const Ball& b = *ball_;
  ring_.assign(static_cast<std::size_t>(radius) + 1, 0);
  disk_.assign(static_cast<std::size_t>(radius) + 1, 0);
  neighbors_.assign(b.size(), 0);
  for (std::size_t i = 0; i < b.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << i;
    all_ |= bit;
    ring_[static_cast<std::size_t>(b.distance(i))] |= bit;
    for (std::int32_t j : b.neighbor_indices(i)) {
      if (j != Ball::kOutside) neighbors_[i] |= std::uint64_t{1} << j;
    }
  }
  std::uint64_t acc = 0;
  for (int d = 0; d <= radius; ++d) {
    acc |= ring_[static_cast<std::size_t>(d)];
    disk_[static_cast<std::size_t>(d)] = acc;
  }
}

std::uint64_t MaskBall::mask_of(std::span<const Site> sites) const {
  std::uint64_t out = 0;
  for (const Site& s : sites) {
    if (!ball_->contains(s)) throw std::out_of_range("site outside mask ball");
    out |= bit(s);
  }
  return out;
}

bool MaskBall::connects(std::uint64_t colored, std::uint64_t from, std::uint64_t to,
                        std::uint64_t allowed) const {
  if ((from & to) || (dilate(from) & to)) return true;
  const std::uint64_t goal = dilate(to) & ~to;
  const std::uint64_t usable = colored & allowed;
  std::uint64_t reach = dilate(from) & ~from & usable;
  std::uint64_t frontier = reach;
  while (frontier) {
    if (reach & goal) return true;
    const std::uint64_t grow = dilate(frontier) & usable & ~reach;
    reach |= grow;
    frontier = grow;
  }
  return (reach & goal) != 0;
}

bool MaskBall::crossing(std::uint64_t colored, int inner, int outer) const {
  const std::uint64_t usable = colored & all_ & ~disk(inner);
  const std::uint64_t goal = ring(outer);
  std::uint64_t reach = ring(inner + 1) & usable;
  std::uint64_t frontier = reach;
  while (frontier) {
    if (reach & goal) return true;
    const std::uint64_t grow = dilate(frontier) & usable & ~reach & disk(outer);
    reach |= grow;
    frontier = grow;
  }
  return (reach & goal) != 0;
}

bool MaskBall::one_arm(std::uint64_t black, int n) const {
  if (n < 0 || n > radius()) throw std::invalid_argument("arm radius outside mask ball");
  if (n == 0) return true;
  return crossing(black, 0, n);
}

bool MaskBall::dual_arm(std::uint64_t white, int k, int m) const {
  if (k > m || m > radius()) throw std::invalid_argument("need k <= m <= radius");
  if (k == m) return true;
  return crossing(white, k, m);
}

std::pair<std::uint64_t, std::uint64_t> MaskBall::pack(const PartialConfig& c) const {
  if (c.ball().radius() != radius()) throw std::invalid_argument("configuration on another ball");
  std::uint64_t black = 0;
  std::uint64_t white = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (c.at(i) == State::Black) black |= std::uint64_t{1} << i;
    if (c.at(i) == State::White) white |= std::uint64_t{1} << i;
  }
  return {black, white};
}

const MaskBall& shared_mask_ball(int radius) {
  static std::once_flag once;
  static std::array<std::unique_ptr<MaskBall>, MaskBall::kMaxRadius + 1> balls;
  if (radius < 0 || radius > MaskBall::kMaxRadius) {
    throw CapacityExceeded("bit-mask ball supports radius <= " +
                           std::to_string(MaskBall::kMaxRadius));
  }
  std::call_once(once, [] {
    for (int r = 0; r <= MaskBall::kMaxRadius; ++r) {
      balls[static_cast<std::size_t>(r)] = std::make_unique<MaskBall>(r);
    }
  });
  return *balls[static_cast<std::size_t>(radius)];
}

}  // namespace iic
