#include "iic/lattice.hpp"

#include <algorithm>
#include <map>
#include <mutex>
#include <string>
#include <unordered_set>

#include "iic/errors.hpp"

namespace iic {

Ball::Ball(int radius) : radius_(radius) {
  if (radius < 0) throw std::invalid_argument("ball radius must be non-negative");
  if (radius > kMaxBallRadius) {
    throw CapacityExceeded("ball radius " + std::to_string(radius) + " exceeds " +
                           std::to_string(kMaxBallRadius));
  }
  const std::int64_t n = radius;
  sites_.reserve(static_cast<std::size_t>(3 * n * (n + 1) + 1));
  row_offset_.resize(static_cast<std::size_t>(2 * n + 1));
  for (int r = -radius; r <= radius; ++r) {
    row_offset_[static_cast<std::size_t>(r + radius)] = static_cast<std::int64_t>(sites_.size());
    const int qmin = row_qmin(r);
    const int qmax = r >= 0 ? radius - r : radius;
    for (int q = qmin; q <= qmax; ++q) sites_.push_back(Site{q, r});
  }
  distance_.resize(sites_.size());
  neighbor_index_.resize(6 * sites_.size());
  for (std::size_t i = 0; i < sites_.size(); ++i) {
    distance_[i] = norm(sites_[i]);
    const auto nb = neighbors(sites_[i]);
    for (std::size_t j = 0; j < 6; ++j) {
      neighbor_index_[6 * i + j] =
          contains(nb[j]) ? static_cast<std::int32_t>(index_unchecked(nb[j])) : kOutside;
    }
  }
  boundary_ = ring_sites(radius + 1);
}

std::optional<std::size_t> Ball::index_of(Site s) const {
  if (!contains(s)) return std::nullopt;
  return index_unchecked(s);
}

std::vector<std::size_t> Ball::ring(int d) const {
  std::vector<std::size_t> out;
  if (d < 0 || d > radius_) return out;
  for (const Site& s : ring_sites(d)) out.push_back(index_unchecked(s));
  return out;
}

std::shared_ptr<const Ball> shared_ball(int radius) {
  static std::mutex mu;
  static std::map<int, std::shared_ptr<const Ball>> cache;
  std::lock_guard lock(mu);
  auto it = cache.find(radius);
  if (it != cache.end()) return it->second;
  auto ball = std::make_shared<const Ball>(radius);
  cache.emplace(radius, ball);
  return ball;
}

std::vector<Site> ring_sites(int d) {
  std::vector<Site> out;
  if (d < 0) return out;
  if (d == 0) return {Site{0, 0}};
  out.reserve(static_cast<std::size_t>(6 * d));
  for (int r = -d; r <= d; ++r) {
    const int qmin = r >= 0 ? -d : -d - r;
    const int qmax = r >= 0 ? d - r : d;
    if (r == -d || r == d) {
      for (int q = qmin; q <= qmax; ++q) out.push_back(Site{q, r});
    } else {
      out.push_back(Site{qmin, r});
      out.push_back(Site{qmax, r});
    }
  }
  return out;
}

bool Circuit::in_interior(Site s) const {
  return std::binary_search(interior.begin(), interior.end(), s);
}

bool Circuit::on_circuit(Site s) const {
  return std::binary_search(sites.begin(), sites.end(), s);
}

int default_window(std::span<const Site> gamma) {
  int reach = 0;
  for (const Site& s : gamma) reach = std::max(reach, norm(s));
  return reach + 2;
}

Circuit verify_circuit(std::span<const Site> gamma, int window_radius) {
  if (window_radius < default_window(gamma)) {
    throw std::invalid_argument("verification window too small for circuit");
  }
  const Ball window(window_radius);
  std::vector<char> blocked(window.size(), 0);
  for (const Site& s : gamma) blocked[window.index_unchecked(s)] = 1;

  // Complement components that never reach the window edge are bounded.
  std::vector<char> seen(window.size(), 0);
  std::vector<std::size_t> stack;
  std::vector<std::vector<std::size_t>> inner;
  for (std::size_t start = 0; start < window.size(); ++start) {
    if (blocked[start] || seen[start]) continue;
    std::vector<std::size_t> members;
    bool touches_edge = false;
    seen[start] = 1;
    stack.push_back(start);
    while (!stack.empty()) {
      const std::size_t i = stack.back();
      stack.pop_back();
      members.push_back(i);
      for (std::int32_t j : window.neighbor_indices(i)) {
        if (j == Ball::kOutside) {
          touches_edge = true;
          continue;
        }
        const auto ju = static_cast<std::size_t>(j);
        if (blocked[ju] || seen[ju]) continue;
        seen[ju] = 1;
        stack.push_back(ju);
      }
    }
    if (!touches_edge) inner.push_back(std::move(members));
  }

  // Plus one for the unbounded region, which always exists.
  const std::size_t components = inner.size() + 1;
  if (components != 2) {
    throw NotACircuit("complement has " + std::to_string(components) + " components");
  }
  Circuit c;
  c.window_radius = window_radius;
  c.sites.assign(gamma.begin(), gamma.end());
  std::sort(c.sites.begin(), c.sites.end());
  c.sites.erase(std::unique(c.sites.begin(), c.sites.end()), c.sites.end());
  for (std::size_t i : inner.front()) c.interior.push_back(window.site(i));
  std::sort(c.interior.begin(), c.interior.end());
  return c;
}

bool circles_around(const Circuit& c, std::span<const Site> region) {
  return std::all_of(region.begin(), region.end(), [&](Site s) { return c.in_interior(s); });
}

}  // namespace iic
