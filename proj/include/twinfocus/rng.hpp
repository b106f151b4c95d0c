#ifndef TWINFOCUS_RNG_HPP
#define TWINFOCUS_RNG_HPP

#include <cmath>
#include <cstdint>
#include <numbers>
#include <stdexcept>
#include <string_view>

// Deterministic, portable random streams. All randomness in the library is
// drawn from xoshiro256++ generators whose state is seeded with splitmix64.
// Independent streams are derived from (master_seed, purpose tag), so the
// medium, the frame simulator and the optimizer never share a sequence.
// Identifier reported in metadata: "xoshiro256++/splitmix64-v1".

namespace twinfocus {

inline constexpr std::string_view kPrngId = "xoshiro256++/splitmix64-v1";

constexpr std::uint64_t splitmix64_next(std::uint64_t& state) {
  state += 0x9e3779b97f4a7c15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : bytes) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Stream seed = master mixed with the FNV-1a hash of the purpose tag.
constexpr std::uint64_t derive_seed(std::uint64_t master, std::string_view tag) {
  std::uint64_t s = master ^ fnv1a64(tag);
  return splitmix64_next(s);
}

class Rng {
 public:
  explicit Rng(std::uint64_t seed) {
    std::uint64_t sm = seed;
    for (auto& word : state_) word = splitmix64_next(sm);
  }

  Rng(std::uint64_t master, std::string_view tag) : Rng(derive_seed(master, tag)) {}

  std::uint64_t next_u64() {
    const std::uint64_t result = rotl(state_[0] + state_[3], 23) + state_[0];
    const std::uint64_t t = state_[1] << 17;
    state_[2] ^= state_[0];
    state_[3] ^= state_[1];
    state_[1] ^= state_[2];
    state_[0] ^= state_[3];
    state_[2] ^= t;
    state_[3] = rotl(state_[3], 45);
    return result;
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n) {
    if (n == 0) throw std::invalid_argument("Rng::below: n must be positive");
    // rejection sampling keeps the distribution exactly uniform
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t x;
    do {
      x = next_u64();
    } while (x >= limit);
    return x % n;
  }

  // Box-Muller; the paired value is cached so draws stay deterministic.
  double gaussian() {
    if (have_cached_) {
      have_cached_ = false;
      return cached_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double a = 2.0 * std::numbers::pi * u2;
    cached_ = r * std::sin(a);
    have_cached_ = true;
    return r * std::cos(a);
  }

  // Knuth multiplication method; exact for the rates used here. Large rates
  // fall back to a rounded normal so the product never underflows.
  std::uint64_t poisson(double mean) {
    if (mean < 0.0) throw std::invalid_argument("Rng::poisson: negative mean");
    if (mean == 0.0) return 0;
    if (mean > 500.0) {
      const double x = mean + std::sqrt(mean) * gaussian();
      return x <= 0.0 ? 0 : static_cast<std::uint64_t>(std::llround(x));
    }
    const double limit = std::exp(-mean);
    std::uint64_t k = 0;
    double product = uniform();
    while (product > limit) {
      ++k;
      product *= uniform();
    }
    return k;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t state_[4]{};
  double cached_ = 0.0;
  bool have_cached_ = false;
};

}  // namespace twinfocus

#endif  // TWINFOCUS_RNG_HPP
