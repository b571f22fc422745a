#include "wavezar/support.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <exception>
#include <iostream>
#include <mutex>
#include <thread>
#include <vector>

namespace wavezar {

namespace {
std::mutex sink_mutex;
WarningSink& sink() {
  static WarningSink s;
  return s;
}
}  // namespace

void set_warning_sink(WarningSink s) {
  std::lock_guard lock(sink_mutex);
  sink() = std::move(s);
}

void warn(const std::string& message) {
  std::lock_guard lock(sink_mutex);
  if (sink())
    sink()(message);
  else
    std::cerr << "warning: " << message << '\n';
}

std::size_t worker_count() {
  if (const char* env = std::getenv("WAVEZAR_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<std::size_t>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& body) {
  const std::size_t workers = std::min(worker_count(), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (error) std::rethrow_exception(error);
}

}  // namespace wavezar
