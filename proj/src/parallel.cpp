#include "netcoh/parallel.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <string>
#include <thread>
#include <vector>

namespace netcoh {
namespace {

int initial_threads() {
  if (const char* env = std::getenv("NETCOH_THREADS")) {
    try {
      int v = std::stoi(env);
      if (v > 0) return v;
    } catch (const std::exception&) {
    }
  }
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

std::atomic<int>& global_threads() {
  static std::atomic<int> value{initial_threads()};
  return value;
}

thread_local bool in_worker = false;

}  // namespace

int thread_count() { return global_threads().load(); }

void set_thread_count(int n) { global_threads().store(std::max(1, n)); }

void parallel_for(std::size_t count, const std::function<void(std::size_t)>& body,
                  int threads) {
  if (threads <= 0) threads = thread_count();
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(threads), count);
  if (workers <= 1 || in_worker) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }

  std::atomic<std::size_t> next{0};
  std::vector<std::exception_ptr> errors(count);
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        in_worker = true;
        for (std::size_t i = next.fetch_add(1); i < count; i = next.fetch_add(1)) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
        in_worker = false;
      });
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace netcoh
