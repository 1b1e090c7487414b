#pragma once

#include <cstdint>

namespace dg {

// Splittable 64-bit-seeded pseudo-random generator.
//
// Core stream is a xoshiro256** initialized from the seed through SplitMix64;
// substreams are derived by mixing the original seed with a stream index, so
// split(i) is independent of how much the parent has already consumed.
// Normal variates use Box-Muller. All experiments in this project take their
// randomness from here so runs are replayable from a single 64-bit seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next_u64();

  // Uniform on [0, 1) with 53 random bits.
  double uniform01();
  // Uniform on [lo, hi).
  double uniform(double lo, double hi);
  // Uniform integer in [0, n); n must be > 0.
  std::uint64_t below(std::uint64_t n);

  // Standard normal via Box-Muller (second variate cached).
  double normal();
  // Exponential with the given rate (default 1).
  double exponential(double rate = 1.0);

  // Derived generator for an independent substream. Deterministic in
  // (seed, stream) only.
  Rng split(std::uint64_t stream) const;

 private:
  std::uint64_t seed_;
  std::uint64_t s_[4];
  bool has_cached_normal_ = false;
  double cached_normal_ = 0.0;
};

}  // namespace dg
