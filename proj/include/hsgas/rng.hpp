#pragma once

// Counter-based, splittable random streams.  A stream is identified by a
// 64-bit key derived from (master seed, hierarchical name); draws are a pure
// function of (key, counter), so identically named streams reproduce the
// same sequence on any platform and independently named streams can be
// consumed concurrently in any order.

#include <cmath>
#include <cstdint>
#include <string_view>

namespace hsgas {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

inline std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace detail

class RngStream {
 public:
  RngStream() : key_(0) {}
  RngStream(std::uint64_t master_seed, std::string_view name)
      : key_(detail::splitmix64(detail::splitmix64(master_seed) ^ detail::fnv1a(name))) {}

  // Child stream with an extra name component; independent of the parent.
  RngStream sub(std::string_view label) const {
    RngStream s;
    s.key_ = detail::splitmix64(key_ ^ detail::fnv1a(label));
    return s;
  }
  RngStream sub(std::uint64_t index) const {
    RngStream s;
    s.key_ = detail::splitmix64(key_ ^ detail::splitmix64(index + 0x2545f4914f6cdd1dull));
    return s;
  }

  std::uint64_t next_u64() { return detail::splitmix64(key_ ^ detail::splitmix64(counter_++)); }

  // Uniform in [0, 1).
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [a, b).
  double uniform(double a, double b) { return a + (b - a) * next_double(); }

  // Standard normal via Box-Muller (no rejection, counter-stable).
  double next_gaussian() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = next_double();
    double u2 = next_double();
    if (u1 <= 0.0) u1 = 0x1.0p-53;
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 6.283185307179586476925286766559 * u2;
    spare_ = r * std::sin(a);
    have_spare_ = true;
    return r * std::cos(a);
  }

  // Uniform integer in [0, n).
  std::uint64_t next_below(std::uint64_t n) { return next_u64() % n; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool have_spare_ = false;
};

}  // namespace hsgas
