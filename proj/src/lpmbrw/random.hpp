#ifndef LPMBRW_RANDOM_HPP
#define LPMBRW_RANDOM_HPP

#include <cmath>
#include <cstdint>
#include <random>

namespace lpmbrw {

// splitmix64 finalizer; used only to derive independent engine seeds.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Substream tags. A replica owns one seed; each tag below yields a stream
// that is never shared with another tag or another replica.
enum class StreamTag : std::uint64_t {
  Tree = 1,       // offspring counts and displacements
  Marks = 2,      // leaf marks Y_v
  LeafExp = 3,    // per-leaf E_v for the direct sampler
  CoupledExp = 4, // the single E of the coupled sampler
  Limit = 5,      // limit-law draws
  Mixing = 6,     // martingale replicas feeding a mixing source
  Bootstrap = 7,
  Calibration = 8,
  Grid = 9,        // R*_n samples per grid point of an experiment
  KsSample = 10,   // R*_n samples compared with the limit law
};

constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index,
                                    StreamTag tag) noexcept {
  return mix64(mix64(mix64(seed) ^ index) ^ static_cast<std::uint64_t>(tag));
}

// xoshiro256++ (Blackman and Vigna). Satisfies UniformRandomBitGenerator.
class Xoshiro256pp {
 public:
  using result_type = std::uint64_t;

  explicit Xoshiro256pp(std::uint64_t seed) noexcept {
    for (auto& w : s_) {
      seed += 0x9e3779b97f4a7c15ULL;
      std::uint64_t z = seed;
      z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
      z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
      w = z ^ (z >> 31);
    }
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept {
    const std::uint64_t out = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return out;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  std::uint64_t s_[4];
};

/// A seeded random stream. Not thread-safe; one per replica per tag.
class Stream {
 public:
  explicit Stream(std::uint64_t seed) : engine_(seed) {}
  Stream(std::uint64_t seed, std::uint64_t index, StreamTag tag)
      : engine_(derive_seed(seed, index, tag)) {}

  /// Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() { return normal_(engine_); }

  /// Standard exponential.
  double exponential() noexcept { return -std::log(uniform()); }

  std::uint64_t bits() noexcept { return engine_(); }

  /// Uniform index in [0, n).
  std::size_t index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }

 private:
  Xoshiro256pp engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace lpmbrw

#endif  // LPMBRW_RANDOM_HPP
