#pragma once

#include <cstdint>
#include <span>

#include "streamvault/common/bytes.hpp"

namespace sv {

/// Source of key material and nonces. Production code uses SystemRandom;
/// tests and seeded simulations use DeterministicRandom.
class RandomSource {
 public:
  virtual ~RandomSource() = default;
  virtual void fill(std::span<std::uint8_t> out) = 0;

  template <std::size_t N>
  FixedBytes<N> bytes() {
    FixedBytes<N> out{};
    fill(out);
    return out;
  }
  std::uint64_t next_u64();
};

class SystemRandom final : public RandomSource {
 public:
  SystemRandom();
  void fill(std::span<std::uint8_t> out) override;
};

/// ChaCha20-based stream keyed by a seed. Same seed, same sequence.
class DeterministicRandom final : public RandomSource {
 public:
  explicit DeterministicRandom(std::uint64_t seed);
  explicit DeterministicRandom(const Digest256& seed);
  void fill(std::span<std::uint8_t> out) override;

 private:
  Digest256 key_;
  std::uint64_t counter_ = 0;
};

/// Initializes libsodium exactly once; safe to call from any thread.
void ensure_sodium();

}  // namespace sv
