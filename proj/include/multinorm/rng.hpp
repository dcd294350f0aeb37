#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <string_view>
#include <vector>

namespace multinorm {

using Engine = std::mt19937_64;

/// Identifies one reproducible random stream.
///
/// A stream is the pair (seed, stream_id). Work that fans out over tasks
/// derives one child stream per task index with `child(i)`; the child id is a
/// SplitMix64 mix of the parent id and the index, so distinct tasks never
/// share a generator and results do not depend on how tasks are scheduled.
struct RngStream {
  std::uint64_t seed = 42;
  std::uint64_t stream_id = 0;

  [[nodiscard]] RngStream child(std::uint64_t task) const;
  [[nodiscard]] Engine engine() const;

  friend bool operator==(const RngStream&, const RngStream&) = default;
};

std::uint64_t splitmix64(std::uint64_t x);

/// FNV-1a hash of a string, used to key streams by a stable name such as a
/// grid point, so adding grid points does not move the streams of others.
std::uint64_t fnv1a64(std::string_view text);

inline RngStream keyed_child(const RngStream& rng, std::string_view key) { return rng.child(fnv1a64(key)); }

// Worker pool size used by every estimator. Defaults to 1.
void set_thread_count(unsigned threads);
unsigned thread_count();

/// Runs body(i) for i in [0, n_tasks) on up to thread_count() workers.
/// Exceptions thrown by a task are rethrown on the calling thread.
void parallel_for(std::size_t n_tasks, const std::function<void(std::size_t)>& body);

// Samples per task for chunked Monte Carlo loops. Part of the reproducibility
// contract: changing it changes every estimate.
inline constexpr std::size_t kChunkSize = 4096;

inline std::size_t chunk_count(std::size_t n) { return (n + kChunkSize - 1) / kChunkSize; }

/// Fills `out[i]` for i < out.size() chunk by chunk. Chunk c owns the engine
/// of rng.child(c) and calls fill(engine, begin, end).
template <typename Fill>
void fill_chunked(std::size_t n, const RngStream& rng, Fill&& fill) {
  parallel_for(chunk_count(n), [&](std::size_t c) {
    Engine eng = rng.child(c).engine();
    const std::size_t begin = c * kChunkSize;
    const std::size_t end = std::min(n, begin + kChunkSize);
    fill(eng, begin, end);
  });
}

}  // namespace multinorm
