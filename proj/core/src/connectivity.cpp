#include "iic/connectivity.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace iic {

namespace {

using SiteSet = std::unordered_set<Site, SiteHash>;

SiteSet outer_boundary(const SiteSet& set) {
  SiteSet out;
  for (const Site& s : set) {
    for (const Site& t : neighbors(s)) {
      if (!set.contains(t)) out.insert(t);
    }
  }
  return out;
}

void require_radius(const PartialConfig& c, int radius) {
  if (radius < 0 || radius > c.ball().radius()) {
    throw std::invalid_argument("radius " + std::to_string(radius) +
                                " outside configuration ball of radius " +
                                std::to_string(c.ball().radius()));
  }
}

// BFS over ball indices: start from `color` sites at distance `inner + 1`,
// move through `color` sites with inner < distance <= outer, succeed on
// reaching distance `outer`.
bool annulus_bfs(const PartialConfig& c, State color, int inner, int outer) {
  const Ball& ball = c.ball();
  std::vector<char> seen(ball.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i : ball.ring(inner + 1)) {
    if (c.at(i) != color) continue;
    if (inner + 1 == outer) return true;
    seen[i] = 1;
    stack.push_back(i);
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::int32_t j : ball.neighbor_indices(i)) {
      if (j == Ball::kOutside) continue;
      const auto ju = static_cast<std::size_t>(j);
      const int d = ball.distance(ju);
      if (seen[ju] || d <= inner || d > outer || c.at(ju) != color) continue;
      if (d == outer) return true;
      seen[ju] = 1;
      stack.push_back(ju);
    }
  }
  return false;
}

}  // namespace

bool connected(const PartialConfig& c, std::span<const Site> from, std::span<const Site> to,
               Color color, std::optional<std::span<const Site>> within) {
  const SiteSet source(from.begin(), from.end());
  const SiteSet target(to.begin(), to.end());
  for (const Site& s : source) {
    if (target.contains(s)) return true;
    for (const Site& t : neighbors(s)) {
      if (target.contains(t)) return true;
    }
  }
  std::optional<SiteSet> region;
  if (within) region.emplace(within->begin(), within->end());
  const State want = state_of(color);
  auto usable = [&](Site s) { return c.at(s) == want && (!region || region->contains(s)); };

  const SiteSet goal = outer_boundary(target);
  SiteSet seen;
  std::vector<Site> stack;
  for (const Site& s : outer_boundary(source)) {
    if (!usable(s)) continue;
    seen.insert(s);
    stack.push_back(s);
  }
  while (!stack.empty()) {
    const Site s = stack.back();
    stack.pop_back();
    if (goal.contains(s)) return true;
    for (const Site& t : neighbors(s)) {
      if (seen.contains(t) || !usable(t)) continue;
      seen.insert(t);
      stack.push_back(t);
    }
  }
  return false;
}

bool one_arm(const PartialConfig& c, int n) {
  require_radius(c, n);
  if (n == 0) return true;
  return annulus_bfs(c, State::Black, 0, n);
}

bool dual_arm(const PartialConfig& c, int k, int m) {
  if (k > m) throw std::invalid_argument("dual arm needs k <= m");
  require_radius(c, m);
  if (k == m) return true;
  return annulus_bfs(c, State::White, k, m);
}

std::vector<std::size_t> white_reachable_unrevealed(const PartialConfig& c, int m) {
  require_radius(c, m);
  const Ball& ball = c.ball();
  std::vector<char> in_cluster(ball.size(), 0);
  std::vector<std::size_t> stack;
  for (std::size_t i : ball.ring(m)) {
    if (c.at(i) == State::White) {
      in_cluster[i] = 1;
      stack.push_back(i);
    }
  }
  std::vector<char> mark(ball.size(), 0);
  for (std::size_t i : ball.ring(m)) {
    if (!c.revealed(i)) mark[i] = 1;
  }
  while (!stack.empty()) {
    const std::size_t i = stack.back();
    stack.pop_back();
    for (std::int32_t j : ball.neighbor_indices(i)) {
      if (j == Ball::kOutside) continue;
      const auto ju = static_cast<std::size_t>(j);
      if (ball.distance(ju) > m) continue;
      if (!c.revealed(ju)) {
        mark[ju] = 1;
      } else if (c.at(ju) == State::White && !in_cluster[ju]) {
        in_cluster[ju] = 1;
        stack.push_back(ju);
      }
    }
  }
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < ball.size(); ++i) {
    if (mark[i]) out.push_back(i);
  }
  return out;
}

PackedConfig PackedConfig::pack(const PartialConfig& c) {
  PackedConfig out;
  const std::size_t words = (c.size() + 63) / 64;
  out.black.assign(words, 0);
  out.white.assign(words, 0);
  for (std::size_t i = 0; i < c.size(); ++i) {
    const std::uint64_t bit = std::uint64_t{1} << (i & 63);
    if (c.at(i) == State::Black) out.black[i >> 6] |= bit;
    if (c.at(i) == State::White) out.white[i >> 6] |= bit;
  }
  return out;
}

UnionFindConnectivity::UnionFindConnectivity(std::shared_ptr<const Ball> ball)
    : ball_(std::move(ball)) {}

bool UnionFindConnectivity::one_arm(const PackedConfig& c, int n) {
  if (n < 0 || n > ball_->radius()) throw std::invalid_argument("radius outside ball");
  if (n == 0) return true;
  return annulus_crossing(c, Color::Black, 0, n);
}

bool UnionFindConnectivity::dual_arm(const PackedConfig& c, int k, int m) {
  if (k > m || m > ball_->radius()) throw std::invalid_argument("need k <= m <= ball radius");
  if (k == m) return true;
  return annulus_crossing(c, Color::White, k, m);
}

bool UnionFindConnectivity::annulus_crossing(const PackedConfig& c, Color color, int inner,
                                             int outer) {
  const Ball& ball = *ball_;
  const auto source = static_cast<std::uint32_t>(ball.size());
  const std::uint32_t sink = source + 1;
  uf_.reset(ball.size() + 2);
  for (std::size_t i = 0; i < ball.size(); ++i) {
    const int d = ball.distance(i);
    if (d <= inner || d > outer || !c.is(i, color)) continue;
    const auto iu = static_cast<std::uint32_t>(i);
    if (d == inner + 1) uf_.unite(iu, source);
    if (d == outer) uf_.unite(iu, sink);
    for (std::int32_t j : ball.neighbor_indices(i)) {
      if (j == Ball::kOutside || static_cast<std::size_t>(j) > i) continue;
      const auto ju = static_cast<std::size_t>(j);
      const int dj = ball.distance(ju);
      if (dj <= inner || dj > outer || !c.is(ju, color)) continue;
      uf_.unite(iu, static_cast<std::uint32_t>(j));
    }
  }
  return uf_.same(source, sink);
}

Site RadialSweep::ring_site(int r, int j) {
  // Corners r * d[s] in cyclic order; side s runs towards corner s + 1.
  static constexpr std::array<Site, 6> d{Site{1, 0}, Site{1, -1}, Site{0, -1},
                                         Site{-1, 0}, Site{-1, 1}, Site{0, 1}};
  if (r == 0) return Site{0, 0};
  const int side = j / r;
  const int t = j % r;
  const Site c = d[static_cast<std::size_t>(side)];
  const Site step = d[static_cast<std::size_t>((side + 2) % 6)];
  return Site{r * c.q + t * step.q, r * c.r + t * step.r};
}

RadialSweep::RadialSweep(int k, int max_radius) : k_(k), max_radius_(max_radius) {
  if (k < 0 || k > max_radius) throw std::invalid_argument("sweep needs 0 <= k <= max radius");
  if (max_radius > kMaxBallRadius) throw std::invalid_argument("sweep radius too large");
  ring_begin_.push_back(0);
  for (int r = k + 1; r <= max_radius; ++r) {
    for (int j = 0; j < 6 * r; ++j) {
      const Site x = ring_site(r, j);
      // reach() relies on this layout: consecutive sites adjacent, and the
      // inner neighbours of (side, t) at (side, t - 1) and (side, t).
      const Site next = ring_site(r, (j + 1) % (6 * r));
      bool ok = norm(x) == r && graph_distance(x, next) == 1;
      if (r > 1) {
        const int side = j / r, t = j % r, w = 6 * (r - 1);
        const Site a = ring_site(r - 1, t == 0 ? side * (r - 1) : side * (r - 1) + t - 1);
        const Site b = ring_site(r - 1, (side * (r - 1) + t) % w);
        int inner = 0;
        for (const Site& y : neighbors(x)) inner += norm(y) == r - 1;
        ok = ok && graph_distance(x, a) == 1 && inner == (t == 0 ? 1 : 2) &&
             (t == 0 || graph_distance(x, b) == 1);
      }
      if (!ok) throw std::logic_error("ring layout broken at radius " + std::to_string(r));
      sites_.push_back(x);
    }
    ring_begin_.push_back(sites_.size());
  }
}

bool RadialSweep::merge_ring(int r) {
  // Nodes [0, old) are the previous ring's labels, then one per run.
  const auto old = static_cast<std::uint32_t>(label_source_.size());
  const auto runs = static_cast<std::uint32_t>(runs_.size());
  uf_.resize(old + runs);
  for (std::uint32_t c = 0; c < old + runs; ++c) uf_.make_singleton(c);
  const bool first = r == k_ + 1;
  if (!first) {
    // Inner neighbours of (side, t) are (side, t - 1) and (side, t) on ring
    // r - 1, the latter wrapping to 0 at the very end.
    const std::int32_t inner_width = 6 * (r - 1);
    std::size_t p = 0;
    std::int32_t s0 = 0, s1 = 0;  // sides of the run's ends; runs only move forward
    for (std::uint32_t x = 0; x < runs; ++x) {
      const Run& run = runs_[x];
      while (run.begin >= (s0 + 1) * r) ++s0;
      while (run.end >= (s1 + 1) * r) ++s1;
      const std::int32_t t0 = run.begin - s0 * r;
      const std::int32_t lo = run.begin - s0 - (t0 > 0 ? 1 : 0);
      const std::int32_t hi = run.end - s1;
      const std::int32_t hi_in = std::min(hi, inner_width - 1);
      while (p < prev_runs_.size() && prev_runs_[p].end < lo) ++p;
      std::int32_t last = -1;
      for (std::size_t q = p; q < prev_runs_.size() && prev_runs_[q].begin <= hi_in; ++q) {
        if (prev_runs_[q].label != last) {
          last = prev_runs_[q].label;
          uf_.unite(old + x, static_cast<std::uint32_t>(last));
        }
      }
      if (hi == inner_width && !prev_runs_.empty() && prev_runs_.front().begin == 0) {
        uf_.unite(old + x, static_cast<std::uint32_t>(prev_runs_.front().label));
      }
    }
  }
  if (runs > 1 && runs_.front().begin == 0 && runs_.back().end == 6 * r - 1) {
    uf_.unite(old, old + runs - 1);
  }

  root_source_.assign(old + runs, 0);
  if (first) {
    std::fill(root_source_.begin(), root_source_.end(), 1);
  } else {
    for (std::uint32_t c = 0; c < old; ++c) {
      if (label_source_[c]) root_source_[uf_.find(c)] = 1;
    }
  }
  relabel_.assign(old + runs, -1);
  next_source_.clear();
  bool touched = false;
  for (std::uint32_t x = 0; x < runs; ++x) {
    const std::uint32_t root = uf_.find(old + x);
    if (relabel_[root] < 0) {
      relabel_[root] = static_cast<std::int32_t>(next_source_.size());
      next_source_.push_back(root_source_[root]);
      touched = touched || root_source_[root];
    }
    runs_[x].label = relabel_[root];
  }
  prev_runs_.swap(runs_);
  label_source_.swap(next_source_);
  return touched;
}

}  // namespace iic
