#pragma once

#include <cstdint>
#include <limits>

#include "iic/lattice.hpp"

namespace iic {

// SplitMix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Counter-based hash of a (key, stream, counter) triple.
constexpr std::uint64_t hash3(std::uint64_t key, std::uint64_t stream, std::uint64_t counter) {
  return mix64(mix64(mix64(key) ^ stream) ^ counter);
}

/// 53-bit uniform in [0, 1).
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Lazily evaluated iid uniforms attached to lattice sites.
///
/// U_x is a pure function of (seed, replica, x), so any worker can evaluate
/// any replica and results do not depend on scheduling.
class UniformField {
 public:
  UniformField(std::uint64_t seed, std::uint64_t replica) : seed_(seed), replica_(replica) {}

  double operator()(Site s) const { return to_unit(hash3(seed_, replica_, site_key(s))); }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica() const { return replica_; }

 private:
  std::uint64_t seed_;
  std::uint64_t replica_;
};

/// Sequential generator over a counter-based stream. Satisfies
/// UniformRandomBitGenerator.
class StreamRng {
 public:
  using result_type = std::uint64_t;

  StreamRng(std::uint64_t seed, std::uint64_t stream) : key_(mix64(seed)), stream_(stream) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() { return mix64(mix64(key_ ^ stream_) ^ counter_++); }
  double uniform() { return to_unit((*this)()); }

  /// Derived independent stream, e.g. one per replica or per query.
  StreamRng split(std::uint64_t tag) const {
    return StreamRng(key_ ^ mix64(stream_ + 0x632be59bd9b4e019ULL), tag);
  }

 private:
  std::uint64_t key_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace iic
