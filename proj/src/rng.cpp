#include "tdcoop/rng.hpp"

namespace tdcoop {

namespace {

constexpr std::uint32_t kMulA = 0xD2511F53u;
constexpr std::uint32_t kMulB = 0xCD9E8D57u;
constexpr std::uint32_t kWeylA = 0x9E3779B9u;
constexpr std::uint32_t kWeylB = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& lo, std::uint32_t& hi) {
  const std::uint64_t product = static_cast<std::uint64_t>(a) * b;
  lo = static_cast<std::uint32_t>(product);
  hi = static_cast<std::uint32_t>(product >> 32);
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    std::uint32_t lo0, hi0, lo1, hi1;
    mulhilo(kMulA, ctr[0], lo0, hi0);
    mulhilo(kMulB, ctr[2], lo1, hi1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t derive_key(std::uint64_t seed, StreamDomain domain, std::uint64_t a,
                         std::uint64_t b) {
  std::uint64_t k = mix64(seed);
  k = mix64(k ^ static_cast<std::uint64_t>(domain));
  k = mix64(k ^ a);
  k = mix64(k ^ (b + 0x632BE59BD9B4E019ull));
  return k;
}

std::array<double, 2> CounterRng::uniforms(std::uint64_t trial, std::uint32_t link,
                                           std::uint32_t block) const {
  const auto out = philox4x32(
      {static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32), link, block},
      {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
  const std::uint64_t a = (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
  const std::uint64_t b = (static_cast<std::uint64_t>(out[2]) << 32) | out[3];
  return {to_unit(a), to_unit(b)};
}

RandomStream::result_type RandomStream::operator()() {
  if (buffered_ == 0) {
    buffer_ = philox4x32({static_cast<std::uint32_t>(counter_),
                          static_cast<std::uint32_t>(counter_ >> 32), 0xFFFFFFFFu, 0u},
                         {static_cast<std::uint32_t>(key_), static_cast<std::uint32_t>(key_ >> 32)});
    ++counter_;
    buffered_ = 2;
  }
  const int idx = 2 - buffered_;
  --buffered_;
  return (static_cast<std::uint64_t>(buffer_[2 * idx]) << 32) | buffer_[2 * idx + 1];
}

}  // namespace tdcoop
