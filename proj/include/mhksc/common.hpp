#pragma once

#include <cstdint>
#include <mutex>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace mhksc {

// Failure classes surfaced through the C API and mapped to distinct CLI exit
// codes: bad configuration / inconsistent inputs, file problems, numerical
// trouble, and feasibility-cap violations.
enum class errc { invalid = 1, io = 2, numeric = 3, cap = 4 };

class Error : public std::runtime_error {
public:
  Error(errc kind, std::string msg) : std::runtime_error(std::move(msg)), kind_(kind) {}
  errc kind() const noexcept { return kind_; }

private:
  errc kind_;
};

[[noreturn]] inline void fail(errc kind, const std::string& msg) { throw Error(kind, msg); }

inline unsigned resolve_threads(unsigned requested) {
  if (requested != 0) return requested;
  unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : hw;
}

// Splits [0,n) into one contiguous block per worker and runs body(lo, hi, worker).
// Block boundaries depend only on n and the worker count, so any numeric routine
// whose per-element work is independent of its block produces identical results
// at every thread count. Worker exceptions are rethrown on the calling thread.
template <class F>
void parallel_for(size_t n, unsigned threads, F&& body) {
  unsigned workers = resolve_threads(threads);
  if (workers > n) workers = n == 0 ? 1 : static_cast<unsigned>(n);
  if (workers <= 1) {
    body(size_t{0}, n, 0u);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  std::exception_ptr first_error;
  std::mutex error_mu;
  size_t base = n / workers, rem = n % workers, lo = 0;
  for (unsigned w = 0; w < workers; ++w) {
    size_t hi = lo + base + (w < rem ? 1 : 0);
    pool.emplace_back([&, lo, hi, w] {
      try {
        body(lo, hi, w);
      } catch (...) {
        std::lock_guard<std::mutex> g(error_mu);
        if (!first_error) first_error = std::current_exception();
      }
    });
    lo = hi;
  }
  for (auto& t : pool) t.join();
  if (first_error) std::rethrow_exception(first_error);
}

// mt19937_64 output is pinned by the standard; the uniform transforms here are
// hand-rolled so sampled values are identical across platforms and compilers
// (std::uniform_real_distribution and friends are implementation-defined).
class Rand {
public:
  explicit Rand(uint64_t seed) : eng_(seed) {}

  uint64_t bits() { return eng_(); }

  // Strictly inside (0,1); safe as a log() argument.
  double unit() { return (static_cast<double>(bits() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform in [0,n), n > 0.
  uint64_t below(uint64_t n) {
    uint64_t bound = ~uint64_t{0} - (~uint64_t{0} % n + 1) % n;
    uint64_t x;
    do {
      x = bits();
    } while (x > bound);
    return x % n;
  }

private:
  std::mt19937_64 eng_;
};

}  // namespace mhksc
