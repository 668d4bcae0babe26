#include "mcglm/rng.hpp"

#include <cmath>

namespace mcglm {

namespace {
constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;
constexpr double kTwoPi = 6.283185307179586476925286766559;
}  // namespace

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += kGolden);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t mix_keys(std::initializer_list<std::uint64_t> parts) {
  std::uint64_t s = 0x8ED0B4DB3E4F3D17ULL;
  std::uint64_t key = 0;
  for (std::uint64_t p : parts) {
    s ^= p + kGolden + (s << 6) + (s >> 2);
    key = splitmix64(s);
  }
  return key;
}

RngStream::RngStream(std::uint64_t seed, std::uint64_t stream)
    : seed_(seed), stream_(stream) {
  // State and increment both come out of SplitMix64 so that nearby
  // (seed, stream) pairs land in unrelated orbits.
  std::uint64_t s = seed + kGolden * (2 * stream + 1);
  state_ = splitmix64(s);
  inc_ = splitmix64(s) | 1ULL;  // increment must be odd
}

std::uint32_t RngStream::next_u32() {
  std::uint64_t old = state_;
  state_ = old * 6364136223846793005ULL + inc_;
  std::uint32_t xorshifted =
      static_cast<std::uint32_t>(((old >> 18u) ^ old) >> 27u);
  std::uint32_t rot = static_cast<std::uint32_t>(old >> 59u);
  return (xorshifted >> rot) | (xorshifted << ((32u - rot) & 31u));
}

double RngStream::uniform() {
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  std::uint64_t bits = (hi << 21) ^ (lo >> 11);  // 53 significant bits
  return static_cast<double>(bits) * 0x1.0p-53;
}

std::pair<double, double> RngStream::normal_pair() {
  // Box-Muller. The radius uniform is shifted into (0, 1] so the log
  // argument never vanishes.
  std::uint64_t hi = next_u32();
  std::uint64_t lo = next_u32();
  std::uint64_t bits = (hi << 21) ^ (lo >> 11);
  double u1 = (static_cast<double>(bits) + 1.0) * 0x1.0p-53;
  double u2 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  return {r * std::cos(kTwoPi * u2), r * std::sin(kTwoPi * u2)};
}

double RngStream::normal() { return normal_pair().first; }

RngStream RngStream::substream(std::uint64_t index) const {
  return RngStream(seed_, mix_keys({stream_, index}));
}

}  // namespace mcglm
