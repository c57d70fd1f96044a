#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <functional>
#include <mutex>
#include <optional>
#include <thread>
#include <vector>

namespace gsbound {

// Replicates per work unit. Fixed so that chunk contents, and therefore
// results, do not depend on the number of workers.
inline constexpr std::int64_t kChunkSize = 1024;

inline int resolve_workers(int hint, std::int64_t chunks) {
  int w = hint > 0 ? hint : static_cast<int>(std::thread::hardware_concurrency());
  w = std::max(w, 1);
  return static_cast<int>(std::min<std::int64_t>(w, std::max<std::int64_t>(chunks, 1)));
}

// Splits [0, count) into fixed chunks, runs body(begin, end, acc) on each
// chunk with a fresh accumulator, then merges chunk accumulators in chunk
// order. Acc needs merge(const Acc&).
template <class Acc>
Acc parallel_reduce(std::int64_t count, int workers, const std::function<Acc()>& make,
                    const std::function<void(std::int64_t, std::int64_t, Acc&)>& body) {
  const std::int64_t chunks = (count + kChunkSize - 1) / kChunkSize;
  std::vector<std::optional<Acc>> parts(static_cast<std::size_t>(chunks));
  std::atomic<std::int64_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;

  auto work = [&] {
    for (;;) {
      const std::int64_t c = next.fetch_add(1);
      if (c >= chunks) return;
      try {
        Acc acc = make();
        body(c * kChunkSize, std::min(count, (c + 1) * kChunkSize), acc);
        parts[static_cast<std::size_t>(c)].emplace(std::move(acc));
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next.store(chunks);
        return;
      }
    }
  };

  const int w = resolve_workers(workers, chunks);
  std::vector<std::thread> threads;
  for (int i = 1; i < w; ++i) threads.emplace_back(work);
  work();
  for (auto& t : threads) t.join();
  if (error) std::rethrow_exception(error);

  Acc total = make();
  for (auto& p : parts) total.merge(*p);
  return total;
}

}  // namespace gsbound
