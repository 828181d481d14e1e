#include "streamvault/crypto/key_regression.hpp"

#include <string>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::crypto {

ChainState chain_step_back(const ChainState& state) {
  return tagged_hash(domain::kChainStep, view(state));
}

AeadKey chain_extract_key(const ChainState& state) {
  return tagged_hash(domain::kChainKey, view(state));
}

KeyRegressionChain::KeyRegressionChain(std::uint32_t max_epochs, const Digest256& seed)
    : max_epochs_(max_epochs), seed_(seed) {
  if (max_epochs == 0) throw Error(Errc::InvalidArgument, "key regression chain needs at least one epoch");
  checkpoints_.reserve(max_epochs / kStride + 1);
  ChainState s = seed;
  checkpoints_.push_back(s);
  for (std::uint32_t e = max_epochs; e >= kStride; e -= kStride) {
    for (std::uint32_t i = 0; i < kStride; ++i) s = chain_step_back(s);
    checkpoints_.push_back(s);
  }
}

MemberState KeyRegressionChain::owner_state(std::uint32_t epoch) const {
  if (epoch > max_epochs_)
    throw Error(Errc::EpochOutOfRange,
                "epoch " + std::to_string(epoch) + " beyond chain length " + std::to_string(max_epochs_));
  const std::uint32_t distance = max_epochs_ - epoch;
  const std::uint32_t slot = distance / kStride;
  ChainState s = checkpoints_[slot];
  for (std::uint32_t i = slot * kStride; i < distance; ++i) s = chain_step_back(s);
  return {epoch, s};
}

StreamKey KeyRegressionChain::key(std::uint32_t epoch) const {
  return {epoch, chain_extract_key(owner_state(epoch).state)};
}

MemberState unwind_state(const MemberState& member, std::uint32_t epoch) {
  if (epoch > member.epoch)
    throw Error(Errc::EpochOutOfRange, "cannot derive epoch " + std::to_string(epoch) +
                                           " from state at epoch " + std::to_string(member.epoch));
  ChainState s = member.state;
  for (std::uint32_t e = member.epoch; e > epoch; --e) s = chain_step_back(s);
  return {epoch, s};
}

StreamKey unwind(const MemberState& member, std::uint32_t epoch) {
  return {epoch, chain_extract_key(unwind_state(member, epoch).state)};
}

}  // namespace sv::crypto
