#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace iic {

/// Worker threads to use: $IIC_WORKERS when set, else hardware concurrency.
int worker_count();

/// Runs fn(begin, end) over fixed-size shards of [0, count) on `workers`
/// threads and returns the per-shard results in shard order. The shard plan
/// depends only on count and shard_size, so merged results do not depend on
/// the number of workers. The exception of the lowest failing shard is
/// rethrown.
template <class Result, class Fn>
std::vector<Result> run_sharded(std::uint64_t count, std::uint64_t shard_size, int workers, Fn&& fn) {
  if (shard_size == 0) shard_size = 1;
  const std::uint64_t shards = (count + shard_size - 1) / shard_size;
  std::vector<Result> results(shards);
  std::vector<std::exception_ptr> errors(shards);
  std::atomic<std::uint64_t> next{0};
  auto work = [&] {
    for (;;) {
      const std::uint64_t s = next.fetch_add(1);
      if (s >= shards) return;
      const std::uint64_t begin = s * shard_size;
      const std::uint64_t end = std::min(count, begin + shard_size);
      try {
        results[s] = fn(begin, end);
      } catch (...) {
        errors[s] = std::current_exception();
      }
    }
  };
  const auto threads = static_cast<std::uint64_t>(workers < 1 ? 1 : workers);
  if (threads == 1 || shards <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (std::uint64_t t = 0; t < std::min(threads, shards); ++t) pool.emplace_back(work);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
  return results;
}

}  // namespace iic
