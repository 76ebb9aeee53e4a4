#pragma once

#include <array>
#include <cstdint>
#include <limits>
#include <string_view>

namespace twoenv {

/// Counter-based random stream (Philox4x32-10).
///
/// The 64-bit seed is the cipher key; the stream id and a 64-bit draw counter
/// form the counter block. Identical (seed, stream) pairs give identical
/// sequences on every platform, and distinct streams are independent, so trial
/// t of a Monte Carlo run can use stream t regardless of scheduling.
class RngStream {
 public:
  using result_type = std::uint64_t;

  static constexpr std::string_view kAlgorithm = "philox4x32-10";

  RngStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }

  /// A fresh stream with the same seed and a different id.
  RngStream split(std::uint64_t stream) const { return RngStream(seed_, stream); }

  std::uint64_t next_u64();
  std::uint64_t operator()() { return next_u64(); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform();

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  /// Raw Philox4x32-10 block function, exposed for known-answer tests.
  static std::array<std::uint32_t, 4> philox(std::array<std::uint32_t, 4> counter,
                                             std::array<std::uint32_t, 2> key);

 private:
  void refill();

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  std::array<std::uint64_t, 2> buffer_{};
  unsigned available_ = 0;
};

}  // namespace twoenv
