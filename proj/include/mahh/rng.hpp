#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace mahh {

/// Philox4x32-10 counter-based generator. The 64-bit seed is the key, the
/// stream id occupies the upper half of the counter and the lower half counts
/// blocks, so every (seed, stream_id) pair addresses its own sequence and
/// streams can be created in any order without coordination.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01();
  /// True with probability p (p <= 0 never, p >= 1 always).
  bool bernoulli(double p);
  /// Uniform on {0, ..., bound-1}; bound must be positive.
  std::uint64_t uniform_index(std::uint64_t bound);
  /// Number of failures before the first success of a Bernoulli(p) sequence.
  std::uint64_t geometric_failures(double p);

  /// Raw block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox_block(std::array<std::uint32_t, 4> counter,
                                                   std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int consumed_ = 4;
};

}  // namespace mahh
