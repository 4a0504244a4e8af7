#pragma once

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace casimir {

// Worker count from CASIMIR_LAB_THREADS (0, negative or unset = hardware
// concurrency; capped at 256).
inline unsigned thread_count_from_env() {
  long n = 0;
  if (const char* env = std::getenv("CASIMIR_LAB_THREADS")) n = std::strtol(env, nullptr, 10);
  if (n <= 0) return std::max(1u, std::thread::hardware_concurrency());
  return static_cast<unsigned>(std::min(n, 256L));
}

// out[i] = fn(in[i]). Each element is computed by exactly one worker with no
// shared accumulation, so results do not depend on the thread count. The
// first exception thrown by any worker is rethrown.
template <class In, class Fn>
auto parallel_map(const std::vector<In>& in, Fn fn, unsigned threads)
    -> std::vector<decltype(fn(in.front()))> {
  using Out = decltype(fn(in.front()));
  std::vector<Out> out(in.size());
  threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(in.size())));
  if (threads <= 1) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = fn(in[i]);
    return out;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 0; t < threads; ++t) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < in.size(); i = next++) {
          try {
            out[i] = fn(in[i]);
          } catch (...) {
            std::lock_guard lock(error_mutex);
            if (!error) error = std::current_exception();
            next = in.size();
          }
        }
      });
    }
  }
  if (error) std::rethrow_exception(error);
  return out;
}

}  // namespace casimir
