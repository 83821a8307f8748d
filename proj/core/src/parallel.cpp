#include "projsum/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace projsum {
namespace {

std::atomic<std::size_t> g_limit{0};

std::size_t env_limit() {
  const char* raw = std::getenv("PROJSUM_THREADS");
  if (raw == nullptr || *raw == '\0') return 0;
  try {
    const long v = std::stol(raw);
    return v > 0 ? static_cast<std::size_t>(v) : 0;
  } catch (...) {
    return 0;
  }
}

}  // namespace

std::size_t thread_count() {
  if (const std::size_t forced = g_limit.load(); forced > 0) return forced;
  std::size_t n = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  if (const std::size_t cap = env_limit(); cap > 0) n = std::min(n, cap);
  return n;
}

void set_thread_limit(std::size_t limit) { g_limit.store(limit); }

}  // namespace projsum
