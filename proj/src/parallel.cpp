#include "slicing/parallel.hpp"

#include <atomic>
#include <cstdlib>
#include <string>

namespace slicing {
namespace {

unsigned default_threads() {
  if (const char* env = std::getenv("SLICING_LAB_THREADS")) {
    try {
      const int v = std::stoi(env);
      if (v > 0) return static_cast<unsigned>(v);
    } catch (...) {
    }
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

std::atomic<unsigned>& threads_setting() {
  static std::atomic<unsigned> value{default_threads()};
  return value;
}

}  // namespace

unsigned thread_count() { return threads_setting().load(); }

void set_thread_count(unsigned threads) { threads_setting().store(threads == 0 ? default_threads() : threads); }

}  // namespace slicing
