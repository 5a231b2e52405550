#pragma once

// Reproducible 64-bit PRNG. The stream is fully specified so it can be
// re-implemented in any language:
//
//   seeding:  s = splitmix64(seed); if s == 0 then s = 0x9E3779B97F4A7C15
//   next():   x ^= x >> 12; x ^= x << 25; x ^= x >> 27;
//             return x * 0x2545F4914F6CDD1D          (xorshift64*)
//   uniform01():        (next() >> 11) * 2^-53        in [0, 1)
//   uniform_index(m):   high 64 bits of next() * m    in [0, m)
//   normal():           Box-Muller on two uniform01() draws, cosine branch
//
// splitmix64(z): z += 0x9E3779B97F4A7C15;
//                z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9;
//                z = (z ^ (z >> 27)) * 0x94D049BB133111EB;
//                return z ^ (z >> 31)

#include <cmath>
#include <cstdint>
#include <numbers>

namespace spdsd {

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(splitmix64(seed)) {
    if (state_ == 0) state_ = 0x9E3779B97F4A7C15ULL;
  }

  std::uint64_t next() {
    state_ ^= state_ >> 12;
    state_ ^= state_ << 25;
    state_ ^= state_ >> 27;
    return state_ * 0x2545F4914F6CDD1DULL;
  }

  double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  std::uint64_t uniform_index(std::uint64_t m) {
    return static_cast<std::uint64_t>((static_cast<unsigned __int128>(next()) * m) >> 64);
  }

  // Integer uniform on [lo, hi].
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi) {
    return lo + static_cast<std::int64_t>(uniform_index(static_cast<std::uint64_t>(hi - lo + 1)));
  }

  double normal() {
    // 1 - u keeps the log argument in (0, 1].
    const double u1 = 1.0 - uniform01();
    const double u2 = uniform01();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  static std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

}  // namespace spdsd
