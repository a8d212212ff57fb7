#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

namespace cohortlab {

// splitmix64 step; used to derive independent stream seeds from a master
// seed. Output sequence is fully specified, so derived streams are stable
// across platforms.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_index) {
  std::uint64_t s = master;
  std::uint64_t a = splitmix64(s);
  s = master ^ (0x9e3779b97f4a7c15ULL + stream_index * 0xd1342543de82ef95ULL);
  std::uint64_t b = splitmix64(s);
  return a ^ b ^ (stream_index + 1);
}

// Deterministic random stream. The engine (mt19937_64) has a standardized
// output sequence; all variate transforms are implemented here rather than
// with std:: distributions, whose algorithms are implementation-defined.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  // Uniform on [0, 1) with 53 random bits.
  double u01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1]; safe as a log() argument.
  double u01_open_below() { return 1.0 - u01(); }

  bool bernoulli(double p) { return u01() < p; }

  // Uniform integer in [0, n). Rejection keeps it exactly uniform.
  std::uint64_t uniform_int(std::uint64_t n) {
    if (n <= 1) return 0;
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = engine_();
    } while (x >= limit);
    return x % n;
  }

  // Standard normal via Box-Muller; caches the second variate.
  double normal() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    const double u = u01_open_below();
    const double v = u01();
    const double r = std::sqrt(-2.0 * std::log(u));
    const double a = 6.283185307179586476925286766559 * v;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

  // Normal conditioned on [lo, hi] by rejection. Intended for mildly
  // truncated draws (acceptance well above a few percent).
  double truncated_normal(double mean, double sd, double lo, double hi) {
    for (;;) {
      const double x = normal(mean, sd);
      if (x >= lo && x <= hi) return x;
    }
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(i));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace cohortlab
