#pragma once

#include <cstdint>
#include <limits>

namespace symgen {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Random-consumption slots. Each attribute (and each corruption) draws from
/// its own stream so that changing how one slot consumes randomness never
/// shifts the values drawn by another. Values are part of the on-disk
/// reproducibility contract: append, never renumber.
enum class Slot : std::uint64_t {
  kLanguage = 1,
  kChar = 2,
  kFont = 3,
  kTranslation = 4,
  kScale = 5,
  kRotation = 6,
  kBold = 7,
  kItalic = 8,
  kForeground = 9,
  kBackground = 10,
  kTexture = 11,
  kJointHook = 12,
  kOccluders = 13,
  kLabelNoise = 14,
  kPixelNoise = 15,
  kOmit = 16,
  kSceneCount = 17,
  kSceneSymbols = 18,
  kScenePlacement = 19,
  kSceneBackground = 20,
  kShuffle = 21,
};

/// Counter-derived key for (master seed, sample index, slot). Stateless, so
/// any index can be generated on any thread in any order.
constexpr std::uint64_t stream_key(std::uint64_t master_seed, std::uint64_t index,
                                   std::uint64_t slot) noexcept {
  std::uint64_t k = mix64(master_seed ^ 0x6A09E667F3BCC909ULL);
  k = mix64(k ^ (index * 0x9E3779B97F4A7C15ULL + 0x3C6EF372FE94F82BULL));
  k = mix64(k ^ (slot * 0xD1B54A32D192ED03ULL + 0xA54FF53A5F1D36F1ULL));
  return k;
}

/// SplitMix64 stream with hand-written distributions. The standard library's
/// distribution objects are implementation-defined, so none are used here.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t key) noexcept : state_(key) {}
  Rng(std::uint64_t master_seed, std::uint64_t index, Slot slot) noexcept
      : state_(stream_key(master_seed, index, static_cast<std::uint64_t>(slot))) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept {
    state_ += 0x9E3779B97F4A7C15ULL;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 bits of resolution.
  double uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) noexcept { return lo + (hi - lo) * uniform(); }

  /// Uniform integer on [0, n). Rejection keeps it exactly unbiased.
  std::uint64_t below(std::uint64_t n) noexcept;
  /// Uniform integer on [lo, hi] inclusive.
  std::int64_t between(std::int64_t lo, std::int64_t hi) noexcept;

  /// Standard normal (Box-Muller, one value per pair of uniforms).
  double normal() noexcept;
  double normal(double mean, double sigma) noexcept { return mean + sigma * normal(); }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Independent child stream; does not advance this one.
  Rng fork(std::uint64_t tag) const noexcept { return Rng(mix64(state_ ^ mix64(tag + 1))); }

 private:
  std::uint64_t state_;
};

}  // namespace symgen
