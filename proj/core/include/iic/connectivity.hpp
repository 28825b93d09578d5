#pragma once

#include <array>
#include <bit>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "iic/configuration.hpp"
#include "iic/lattice.hpp"
#include "iic/union_find.hpp"

namespace iic {

enum class Color { Black, White };

inline State state_of(Color c) { return c == Color::Black ? State::Black : State::White; }

/// {S <-> S2} for the given colour: a neighbour-to-neighbour path x_1..x_k of
/// sites with that colour, x_1 in dS and x_k in dS2, optionally confined to
/// `within`. Certain when S and S2 intersect or are adjacent. Unrevealed sites
/// and sites outside the configuration's ball never carry a colour.
///
/// Reference implementation on sets of sites; the radius-specific functions
/// below are the fast paths.
bool connected(const PartialConfig& c, std::span<const Site> from, std::span<const Site> to,
               Color color, std::optional<std::span<const Site>> within = std::nullopt);

/// {0 <-> dLambda_n}: Black path inside Lambda_n from ring 1 to ring n. The
/// origin's own state never matters.
bool one_arm(const PartialConfig& c, int n);

/// {Lambda_k <-*> dLambda_m}: White path in Lambda_m \ Lambda_k from ring
/// k + 1 to ring m. Certain when k == m.
bool dual_arm(const PartialConfig& c, int k, int m);

/// Unrevealed sites of Lambda_m that are white-connected to dLambda_m through
/// revealed White sites; ring-m sites always count. Canonical order (indices
/// into c.ball()).
std::vector<std::size_t> white_reachable_unrevealed(const PartialConfig& c, int m);

/// Bit-packed colouring: one bit per site for Black and one for White.
struct PackedConfig {
  std::vector<std::uint64_t> black;
  std::vector<std::uint64_t> white;

  static PackedConfig pack(const PartialConfig& c);
  bool is(std::size_t i, Color color) const {
    const auto& words = color == Color::Black ? black : white;
    return (words[i >> 6] >> (i & 63)) & 1U;
  }
};

/// Union-find cluster engine over a packed colouring of a ball. Answers the
/// same arm queries as the BFS functions above.
class UnionFindConnectivity {
 public:
  explicit UnionFindConnectivity(std::shared_ptr<const Ball> ball);

  bool one_arm(const PackedConfig& c, int n);
  bool dual_arm(const PackedConfig& c, int k, int m);

 private:
  bool annulus_crossing(const PackedConfig& c, Color color, int inner, int outer);

  std::shared_ptr<const Ball> ball_;
  UnionFind uf_;
};

/// Radial union-find sweep for crossing events of an annulus.
///
/// Sites are added ring by ring from ring k + 1 outwards and merged with
/// their already-added same-colour neighbours; after ring r the sweep knows
/// whether {ring k + 1 <-> ring r} holds in that colour. Once it fails it
/// fails for every larger radius, so the sweep stops there.
///
/// Only two rings are live at a time (Hoshen-Kopelman style). Sites of a
/// ring go in cyclic order, so a run of coloured sites along the ring is one
/// union-find node, and the inner neighbours of a run form a contiguous arc
/// of the previous ring. Clusters of the previous ring are carried as
/// labelled runs with a flag saying whether they touch ring k + 1.
class RadialSweep {
 public:
  RadialSweep(int k, int max_radius);

  int k() const { return k_; }
  int max_radius() const { return max_radius_; }
  std::size_t site_count() const { return sites_.size(); }
  /// Sites in sweep order: ring by ring, cyclically inside a ring.
  const Site& site(std::size_t i) const { return sites_[i]; }

  /// Largest r in [k, max_radius] with a crossing from ring k + 1 to ring r.
  /// `has_color(i)` reports whether sweep-ordered site i carries the colour;
  /// it is called in increasing i and never past the ring where the sweep
  /// stops.
  template <class HasColor>
  int reach(HasColor&& has_color);

  /// Same, with the colours supplied a ring at a time: `fill(words, begin,
  /// width)` writes the colours of sites [begin, begin + width) as bits
  /// into zeroed words, bit j of the ring in words[j / 64]. Rings are
  /// requested in order.
  template <class FillRing>
  int reach_bits(FillRing&& fill);

  /// Site j of ring r in cyclic order, starting from the corner (r, 0).
  static Site ring_site(int r, int j);

 private:
  struct Run {
    std::int32_t begin;
    std::int32_t end;  // inclusive
    std::int32_t label;
  };

  // Merges the runs of ring r (already in runs_) and labels them; returns
  // whether any of them is connected to ring k + 1.
  bool merge_ring(int r);

  int k_;
  int max_radius_;
  std::vector<Site> sites_;
  std::vector<std::size_t> ring_begin_;  // per radius, into sites_

  // Scratch reused between calls.
  UnionFind uf_;
  std::vector<std::uint64_t> bits_;
  std::vector<Run> runs_;
  std::vector<Run> prev_runs_;
  std::vector<std::uint8_t> label_source_;
  std::vector<std::uint8_t> root_source_;
  std::vector<std::int32_t> relabel_;
  std::vector<std::uint8_t> next_source_;
};

template <class HasColor>
int RadialSweep::reach(HasColor&& has_color) {
  return reach_bits([&](std::span<std::uint64_t> words, std::size_t begin, std::size_t width) {
    for (std::size_t j = 0; j < width; ++j) {
      words[j >> 6] |= static_cast<std::uint64_t>(has_color(begin + j) ? 1 : 0) << (j & 63);
    }
  });
}

template <class FillRing>
int RadialSweep::reach_bits(FillRing&& fill) {
  if (k_ == max_radius_) return max_radius_;
  int reached = k_;
  label_source_.clear();
  prev_runs_.clear();
  for (int r = k_ + 1; r <= max_radius_; ++r) {
    const std::size_t begin = ring_begin_[static_cast<std::size_t>(r - k_ - 1)];
    const auto width = static_cast<std::size_t>(6 * r);
    const std::size_t words = (width + 63) / 64;
    bits_.assign(words + 1, 0);  // trailing zero word ends the last run
    fill(std::span<std::uint64_t>(bits_.data(), words), begin, width);
    runs_.clear();
    std::size_t pos = 0;
    while (true) {
      // Next set bit at or after pos, then the next clear bit after it.
      std::size_t w = pos >> 6;
      if (w >= words) break;
      std::uint64_t x = bits_[w] & (~std::uint64_t{0} << (pos & 63));
      while (x == 0 && ++w < words) x = bits_[w];
      if (w >= words) break;
      const std::size_t start = w * 64 + static_cast<std::size_t>(std::countr_zero(x));
      std::uint64_t y = ~bits_[w] & (~std::uint64_t{0} << (start & 63));
      while (y == 0) y = ~bits_[++w];
      pos = w * 64 + static_cast<std::size_t>(std::countr_zero(y));
      runs_.push_back(Run{static_cast<std::int32_t>(start), static_cast<std::int32_t>(pos - 1), -1});
    }
    if (!merge_ring(r)) break;
    reached = r;
  }
  return reached;
}

}  // namespace iic
