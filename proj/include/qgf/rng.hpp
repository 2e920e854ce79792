#pragma once

#include <cstdint>
#include <limits>

namespace qgf {

/**
 * Counter-based random stream: the n-th draw is a SplitMix64 finalisation of
 * key + n * golden. Streams split deterministically by id, so a tree of
 * (root seed, repetition, component) substreams gives the same numbers no
 * matter which thread consumes them or in what order.
 *
 * Satisfies UniformRandomBitGenerator.
 */
class StreamRng {
 public:
  using result_type = std::uint64_t;

  explicit StreamRng(std::uint64_t seed = 0) noexcept : key_(mix(seed ^ kSeedSalt)) {}

  /// Independent child stream labelled by id.
  StreamRng substream(std::uint64_t id) const noexcept {
    StreamRng child;
    child.key_ = mix(key_ ^ mix(id + kGolden));
    return child;
  }

  result_type operator()() noexcept { return mix(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

  std::uint64_t key() const noexcept { return key_; }
  std::uint64_t counter() const noexcept { return counter_; }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

 private:
  static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
  static constexpr std::uint64_t kSeedSalt = 0x5851f42d4c957f2dULL;

  static constexpr std::uint64_t mix(std::uint64_t z) noexcept {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

}  // namespace qgf
