#pragma once

#include <cstdint>
#include <vector>

#include "streamvault/common/bytes.hpp"
#include "streamvault/crypto/aead.hpp"

namespace sv::crypto {

using ChainState = FixedBytes<32>;

/// Symmetric stream key for one epoch.
struct StreamKey {
  std::uint32_t epoch = 0;
  AeadKey key{};
};

/// What a reader holds: the chain state for some epoch. It unwinds to every
/// earlier epoch but not to any later one.
struct MemberState {
  std::uint32_t epoch = 0;
  ChainState state{};
};

/// stm_{i-1} = H(0x01 || stm_i)
ChainState chain_step_back(const ChainState& state);
/// K_i = H(0x02 || stm_i)
AeadKey chain_extract_key(const ChainState& state);

/// Owner side of a key-regression chain of fixed length. The state for the
/// last epoch N is the seed itself; earlier states are obtained by hashing
/// backwards, so the owner pays N - t hash applications for epoch t.
class KeyRegressionChain {
 public:
  static constexpr std::uint32_t kDefaultMaxEpochs = 1u << 16;

  KeyRegressionChain(std::uint32_t max_epochs, const Digest256& seed);

  std::uint32_t max_epochs() const { return max_epochs_; }
  const Digest256& seed() const { return seed_; }

  /// Throws Error(Errc::EpochOutOfRange) for epoch > max_epochs.
  MemberState owner_state(std::uint32_t epoch) const;
  StreamKey key(std::uint32_t epoch) const;

 private:
  static constexpr std::uint32_t kStride = 256;

  std::uint32_t max_epochs_;
  Digest256 seed_;
  // checkpoints_[j] is the state for epoch max_epochs_ - j * kStride.
  std::vector<ChainState> checkpoints_;
};

/// Member-side derivation of K_epoch from a held state. Requires
/// epoch <= member.epoch, otherwise throws EpochOutOfRange.
StreamKey unwind(const MemberState& member, std::uint32_t epoch);
MemberState unwind_state(const MemberState& member, std::uint32_t epoch);

}  // namespace sv::crypto
