#pragma once

#include <cstdint>
#include <limits>

namespace skellamnet {

// SplitMix64 finalizer; a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t z) noexcept;

// Seed for stream `stream` of a run seeded with `base`. Streams are addressed
// by counter, so the values drawn for trial t never depend on how trials are
// scheduled across threads.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t stream) noexcept;

// xoshiro256** seeded through SplitMix64. Satisfies
// UniformRandomBitGenerator so it can also drive <random> algorithms.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) noexcept;

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  // Uniform on the open interval (0, 1).
  double uniform() noexcept;

  // Uniform integer in [0, bound).
  std::uint64_t below(std::uint64_t bound) noexcept;

 private:
  std::uint64_t s_[4];
};

// Poisson(mean) variate: inversion for mean < 30, Hoermann's PTRS otherwise.
std::int64_t poisson(Rng& rng, double mean);

// Number of failures before the first success of a Bernoulli(p) sequence,
// given log1m_p = log(1 - p). Returns UINT64_MAX when p == 0.
std::uint64_t geometric_skip(Rng& rng, double log1m_p);

}  // namespace skellamnet
