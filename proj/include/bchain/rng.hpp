#pragma once

#include <array>
#include <cstdint>

namespace bchain {

/// Philox4x32-10 block function (Salmon et al., "Parallel random numbers: as
/// easy as 1, 2, 3", SC'11). Pure function of (counter, key).
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> counter,
                                        std::array<std::uint32_t, 2> key);

/// Deterministic random stream for one replica.
///
/// Mixing: the 64-bit seed is the Philox key (low word, high word). The
/// 128-bit counter is (block_lo, block_hi, replica_lo, replica_hi), where
/// block is the number of 4x32 blocks consumed so far. Streams with distinct
/// replica indices therefore walk disjoint counter ranges of the same keyed
/// bijection, so they never overlap and need no coordination.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t replica_index);

  std::uint64_t next_u64();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  /// Uniform on (0, 1); safe to pass to log().
  double uniform_open();
  /// Exponential with the given rate (> 0).
  double exponential(double rate);
  /// +1 or -1 with probability 1/2 each.
  int sign();

  std::uint64_t seed() const { return seed_; }
  std::uint64_t replica_index() const { return replica_; }

 private:
  std::uint32_t next_u32();

  std::uint64_t seed_;
  std::uint64_t replica_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buffer_{};
  int used_ = 4;
};

/// SplitMix64 finalizer; used to derive independent seeds for auxiliary
/// streams (e.g. a reference ensemble next to a primary one).
std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace bchain
