#pragma once

#include <array>
#include <cstdint>

namespace tdcoop {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers:
/// as easy as 1, 2, 3"). Stateless: the output depends only on
/// (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// splitmix64 finalizer, used to fold seeds and indices into Philox keys.
std::uint64_t mix64(std::uint64_t x);

/// 53-bit uniform in [0, 1).
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Purposes a key can be derived for. Keeps geometry and fading streams
/// disjoint for the same (seed, placement).
enum class StreamDomain : std::uint64_t { Geometry = 1, Fading = 2, Test = 3 };

/// 64-bit key for (master seed, domain, a, b). Pure function of its inputs,
/// so every placement / user gets its own stream independent of scheduling.
std::uint64_t derive_key(std::uint64_t seed, StreamDomain domain, std::uint64_t a = 0,
                         std::uint64_t b = 0);

/// Counter-based random source: value(trial, link, block) never depends on
/// which other values were requested before it.
class CounterRng {
public:
  explicit CounterRng(std::uint64_t key) : key_(key) {}

  /// Two independent 53-bit uniforms for one (trial, link, block) triple.
  std::array<double, 2> uniforms(std::uint64_t trial, std::uint32_t link,
                                 std::uint32_t block) const;

  std::uint64_t key() const { return key_; }

private:
  std::uint64_t key_;
};

/// Sequential stream over a CounterRng. Satisfies
/// UniformRandomBitGenerator so it also plugs into <random> if needed.
class RandomStream {
public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t key) : key_(key) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  result_type operator()();

  /// Uniform in [0, 1).
  double uniform() { return to_unit((*this)()); }

private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int buffered_ = 0;
};

}  // namespace tdcoop
