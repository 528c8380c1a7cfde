#pragma once

#include <cstdint>
#include <limits>

namespace uqprop::rng {

/// Counter-based random stream keyed by (seed, stream id).
///
/// The n-th output of a stream is a pure function of (seed, stream, n), so
/// independent blocks of work can each own a stream and produce the same
/// numbers no matter how the blocks are scheduled across threads. The output
/// function is the SplitMix64 finalizer applied to a Weyl sequence whose
/// offset is derived from the key.
class Stream {
 public:
  using result_type = std::uint64_t;

  Stream(std::uint64_t seed, std::uint64_t stream_id) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;
  /// Uniform double in (0, 1].
  double uniform_open_below() noexcept;
  /// Standard normal deviate (Box-Muller, pairs cached).
  double normal() noexcept;

  std::uint64_t counter() const noexcept { return counter_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double cached_normal_ = 0.0;
  bool has_cached_normal_ = false;
};

/// Mixes several integers into one well-distributed 64-bit value; used to
/// derive child seeds (per test point, per repetition) from a user seed.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t a, std::uint64_t b = 0) noexcept;

}  // namespace uqprop::rng
