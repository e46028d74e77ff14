#ifndef DPLOGIT_COMMON_HPP
#define DPLOGIT_COMMON_HPP

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <thread>
#include <vector>

namespace dplogit {

// 1/(1+exp(c)) evaluated without overflow for any finite c.
inline double inv_logit_complement(double c) {
  if (c >= 0.0) {
    const double t = std::exp(-c);
    return t / (1.0 + t);
  }
  return 1.0 / (1.0 + std::exp(c));
}

// logistic(c) = exp(c)/(1+exp(c))
inline double logistic(double c) { return inv_logit_complement(-c); }

// Counter-based RNG: xoshiro-style output of splitmix64 steps.  Streams are
// derived from (seed, stream id) so that parallel work is deterministic under
// any scheduling.  Draw routines avoid std::* distributions on purpose, since
// their output is implementation-defined.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}
  Rng(std::uint64_t seed, std::uint64_t stream) : state_(mix(seed ^ mix(stream + 0x9e3779b97f4a7c15ull))) {}

  std::uint64_t next_u64() {
    state_ += 0x9e3779b97f4a7c15ull;
    return mix(state_);
  }

  // uniform on [0,1) with 53 random bits
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // standard normal via Marsaglia polar (no cached spare: deterministic call count per draw pair)
  double normal() {
    for (;;) {
      const double u = 2.0 * uniform() - 1.0;
      const double v = 2.0 * uniform() - 1.0;
      const double s = u * u + v * v;
      if (s > 0.0 && s < 1.0) return u * std::sqrt(-2.0 * std::log(s) / s);
    }
  }

  bool bernoulli(double p) { return uniform() < p; }

  // integer in [0, n)
  std::uint64_t below(std::uint64_t n) {
    // rejection-free for our purposes: 64-bit multiply-shift
    return static_cast<std::uint64_t>((static_cast<__uint128_t>(next_u64()) * n) >> 64);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ull;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebull;
    z ^= z >> 31;
    return z;
  }
  std::uint64_t state_;
};

// Runs fn(i) for i in [0, count) on up to n_threads threads.  Results must be
// written to per-index slots by the caller; iteration order inside a thread is
// ascending, so the overall result is deterministic.
inline void parallel_for(std::size_t count, int n_threads, const std::function<void(std::size_t)>& fn) {
  if (count == 0) return;
  unsigned hw = std::thread::hardware_concurrency();
  if (hw == 0) hw = 1;
  std::size_t workers = n_threads > 0 ? static_cast<std::size_t>(n_threads) : hw;
  if (workers > count) workers = count;
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w]() {
      for (std::size_t i = w; i < count; i += workers) fn(i);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace dplogit

#endif  // DPLOGIT_COMMON_HPP
