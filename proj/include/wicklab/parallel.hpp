#ifndef WICKLAB_PARALLEL_HPP
#define WICKLAB_PARALLEL_HPP

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace wicklab {

/// Worker count used when a caller passes 0: $WICKLAB_THREADS if set and
/// positive, otherwise the hardware concurrency.
inline unsigned default_workers() {
  if (const char* env = std::getenv("WICKLAB_THREADS")) {
    try {
      const long v = std::stol(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

/// Evaluates `fn(chunk)` for chunk in [0, chunks) on up to `workers` threads.
/// Results come back indexed by chunk, so any reduction the caller performs
/// over them is independent of the worker count.
template <class T, class Fn>
std::vector<T> map_chunks(std::size_t chunks, unsigned workers, Fn&& fn) {
  std::vector<T> out(chunks);
  if (workers == 0) workers = default_workers();
  const std::size_t threads = std::min<std::size_t>(workers, chunks);
  if (threads <= 1) {
    for (std::size_t c = 0; c < chunks; ++c) out[c] = fn(c);
    return out;
  }

  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto work = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        out[c] = fn(c);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = chunks;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads - 1);
  for (std::size_t t = 1; t < threads; ++t) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
  return out;
}

}  // namespace wicklab

#endif  // WICKLAB_PARALLEL_HPP
