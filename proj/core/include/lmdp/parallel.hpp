#pragma once

#include <cstddef>
#include <exception>
#include <functional>
#include <thread>
#include <vector>

namespace lmdp {

// Resolves a worker count: explicit positive value, else LMDP_NPG_WORKERS, else 1.
int resolve_workers(int requested);

// Splits [0, count) into contiguous chunks, one per worker. fn(begin, end).
// Results must be written by index so the outcome does not depend on workers.
template <class Fn>
void parallel_for(std::size_t count, int workers, Fn&& fn) {
  if (count == 0) return;
  std::size_t w = workers < 1 ? 1 : static_cast<std::size_t>(workers);
  if (w > count) w = count;
  if (w == 1) {
    fn(std::size_t{0}, count);
    return;
  }
  std::vector<std::thread> threads;
  std::vector<std::exception_ptr> errors(w);
  std::size_t chunk = (count + w - 1) / w;
  for (std::size_t k = 0; k < w; ++k) {
    std::size_t begin = k * chunk;
    std::size_t end = begin + chunk < count ? begin + chunk : count;
    if (begin >= end) break;
    threads.emplace_back([&, k, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[k] = std::current_exception();
      }
    });
  }
  for (auto& t : threads) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace lmdp
