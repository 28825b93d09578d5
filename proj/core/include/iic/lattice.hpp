#pragma once

#include <array>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <vector>

namespace iic {

/// Vertex of the triangular lattice in axial coordinates.
///
/// Embedded in the plane at q*(1,0) + r*(1/2, sqrt(3)/2), so the six axial
/// neighbours sit at Euclidean distance one. The ordering is the canonical
/// total order used for every tie-break: lexicographic by (r, q).
struct Site {
  int q = 0;
  int r = 0;

  friend constexpr bool operator==(Site, Site) = default;
  friend constexpr std::strong_ordering operator<=>(Site a, Site b) {
    if (auto c = a.r <=> b.r; c != 0) return c;
    return a.q <=> b.q;
  }
};

struct SiteHash {
  std::size_t operator()(Site s) const noexcept {
    auto k = (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.q)) << 32) |
             static_cast<std::uint32_t>(s.r);
    k ^= k >> 33;
    k *= 0xff51afd7ed558ccdULL;
    k ^= k >> 33;
    return static_cast<std::size_t>(k);
  }
};

inline constexpr std::array<Site, 6> kNeighborOffsets{
    Site{1, 0}, Site{-1, 0}, Site{0, 1}, Site{0, -1}, Site{1, -1}, Site{-1, 1}};

constexpr std::array<Site, 6> neighbors(Site s) {
  std::array<Site, 6> out{};
  for (std::size_t i = 0; i < 6; ++i) {
    out[i] = Site{s.q + kNeighborOffsets[i].q, s.r + kNeighborOffsets[i].r};
  }
  return out;
}

constexpr int abs_int(int v) { return v < 0 ? -v : v; }

/// Graph distance to the origin.
constexpr int norm(Site s) {
  return (abs_int(s.q) + abs_int(s.r) + abs_int(s.q + s.r)) / 2;
}

constexpr int graph_distance(Site a, Site b) {
  return norm(Site{a.q - b.q, a.r - b.r});
}

constexpr bool adjacent(Site a, Site b) { return graph_distance(a, b) == 1; }

/// Rotation by 60 degrees about the origin.
constexpr Site rotate60(Site s) { return Site{-s.r, s.q + s.r}; }

/// Stable 64-bit key of a site, independent of any ball it is viewed in.
constexpr std::uint64_t site_key(Site s) {
  return (static_cast<std::uint64_t>(static_cast<std::uint32_t>(s.q)) << 32) |
         static_cast<std::uint32_t>(s.r);
}

inline constexpr int kMaxBallRadius = 100000;

/// The graph-distance ball of radius n around the origin.
///
/// Sites are stored in canonical order, so a site's index doubles as its rank
/// in that order. Index lookup is O(1) through per-row offsets. Immutable after
/// construction.
class Ball {
 public:
  static constexpr std::int32_t kOutside = -1;

  explicit Ball(int radius);

  int radius() const { return radius_; }
  std::size_t size() const { return sites_.size(); }
  std::span<const Site> sites() const { return sites_; }
  /// Sites at distance exactly radius + 1, in canonical order.
  std::span<const Site> boundary() const { return boundary_; }
  const Site& site(std::size_t i) const { return sites_[i]; }
  int distance(std::size_t i) const { return distance_[i]; }

  bool contains(Site s) const { return norm(s) <= radius_; }
  std::optional<std::size_t> index_of(Site s) const;
  /// Index of a site known to be inside the ball.
  std::size_t index_unchecked(Site s) const {
    return static_cast<std::size_t>(row_offset_[s.r + radius_] + (s.q - row_qmin(s.r)));
  }

  /// The 6 neighbour indices of site i, `kOutside` for neighbours outside.
  std::span<const std::int32_t, 6> neighbor_indices(std::size_t i) const {
    return std::span<const std::int32_t, 6>(neighbor_index_.data() + 6 * i, 6);
  }

  /// Indices of the sites at distance exactly d (d <= radius), canonical order.
  std::vector<std::size_t> ring(int d) const;
  std::size_t origin_index() const { return index_unchecked(Site{0, 0}); }

 private:
  int row_qmin(int r) const { return r >= 0 ? -radius_ : -radius_ - r; }

  int radius_;
  std::vector<Site> sites_;
  std::vector<Site> boundary_;
  std::vector<int> distance_;
  std::vector<std::int64_t> row_offset_;
  std::vector<std::int32_t> neighbor_index_;
};

/// Process-wide cache of balls; balls are immutable so sharing is free.
std::shared_ptr<const Ball> shared_ball(int radius);

/// Sites on the ring at distance d, canonical order (d = 0 gives the origin).
std::vector<Site> ring_sites(int d);

/// A set of sites whose complement has exactly two components.
struct Circuit {
  std::vector<Site> sites;     // canonical order
  std::vector<Site> interior;  // bounded component, canonical order
  int window_radius = 0;       // exterior = window minus sites minus interior

  bool in_interior(Site s) const;
  bool on_circuit(Site s) const;
};

/// Flood-fills the complement of gamma inside Ball(window_radius); everything
/// touching the window edge is merged into the outer region. Throws
/// NotACircuit unless exactly one bounded component remains.
Circuit verify_circuit(std::span<const Site> gamma, int window_radius);

/// Window radius that is always large enough for gamma.
int default_window(std::span<const Site> gamma);

bool circles_around(const Circuit& c, std::span<const Site> region);

}  // namespace iic
