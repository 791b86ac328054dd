#pragma once

// Portable, counter-based random streams.
//
// All randomness in the library flows through Philox4x32-10 keyed by a
// 64-bit stream key and addressed by a 64-bit substream id. Distributions are
// implemented here rather than taken from <random>, whose distribution
// algorithms are implementation-defined; this keeps simulated corpora and
// permutation p-values bit-identical across standard libraries.
//
// Key derivation (documented so other implementations can reproduce streams):
//   fnv1a64(s)            64-bit FNV-1a over the UTF-8 bytes of s
//   mix64(z)              SplitMix64 finalizer: z += 0x9E3779B97F4A7C15, then
//                         z = (z ^ z>>30) * 0xBF58476D1CE4E5B9,
//                         z = (z ^ z>>27) * 0x94D049BB133111EB, z ^ z>>31
//   derive_key(seed, s) = mix64(seed ^ fnv1a64(s))

#include <array>
#include <cstdint>
#include <limits>
#include <span>
#include <string_view>

namespace shiftsig::random {

std::uint64_t fnv1a64(std::string_view bytes) noexcept;
std::uint64_t mix64(std::uint64_t z) noexcept;
std::uint64_t derive_key(std::uint64_t seed, std::string_view tag) noexcept;

/// Philox4x32 with 10 rounds (Salmon et al., SC'11).
std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> counter,
                                           std::array<std::uint32_t, 2> key) noexcept;

/// UniformRandomBitGenerator over Philox. Counter words 0-1 hold the block
/// index, words 2-3 the substream id; each block yields two 64-bit outputs
/// (low word first).
class CounterRng {
 public:
  using result_type = std::uint64_t;

  CounterRng(std::uint64_t key, std::uint64_t substream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t substream() const noexcept { return substream_; }

 private:
  void refill() noexcept;

  std::uint64_t key_;
  std::uint64_t substream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned buffered_ = 0;
};

/// Uniform on [0, 1) with 53 random bits.
double uniform01(CounterRng& rng) noexcept;

/// Uniform integer on [0, bound); bound must be positive. Lemire's method.
std::uint64_t uniform_below(CounterRng& rng, std::uint64_t bound) noexcept;

/// Fills `out` with independent N(0, stddev^2) draws (Box-Muller, pairwise).
void fill_normal(CounterRng& rng, std::span<double> out, double stddev) noexcept;

/// Poisson(mean) draw; inversion below mean 30, PTRS (Hörmann 1993) above.
std::uint64_t poisson(CounterRng& rng, double mean) noexcept;

/// Round half to even, for count arithmetic.
std::uint64_t round_half_even(double x) noexcept;

}  // namespace shiftsig::random
