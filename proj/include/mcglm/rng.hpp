#pragma once

#include <cstdint>
#include <initializer_list>
#include <utility>

namespace mcglm {

//! Seedable deterministic random stream.
//!
//! PCG32 core with SplitMix64 seeding. Distinct stream indices derived
//! from one master seed give statistically independent sequences, so
//! parallel replications can each own a stream without coordination.
//! Copyable value type: a copy replays the same future draws, which is
//! what makes chain suffixes re-runnable from a recorded position.
//! A stream must not be shared between threads.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed, std::uint64_t stream = 0);

  std::uint32_t next_u32();

  //! Uniform draw in [0, 1) with 53-bit resolution. Consumes two u32s.
  double uniform();

  //! One standard normal draw (Box-Muller); consumes two uniforms.
  double normal();

  //! Two independent standard normals from one Box-Muller transform;
  //! consumes two uniforms. No cached spare is kept, so the stream
  //! position is always an explicit function of the calls made.
  std::pair<double, double> normal_pair();

  //! Child stream keyed by (this stream, index).
  RngStream substream(std::uint64_t index) const;

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

 private:
  std::uint64_t state_;
  std::uint64_t inc_;
  std::uint64_t seed_;
  std::uint64_t stream_;
};

//! SplitMix64 mixing step, exposed for key derivation.
std::uint64_t splitmix64(std::uint64_t& state);

//! Fold a tuple of integers into one well-mixed 64-bit stream key.
std::uint64_t mix_keys(std::initializer_list<std::uint64_t> parts);

}  // namespace mcglm
