#pragma once

#include <cstdint>
#include <map>
#include <vector>

#include "streamvault/crypto/key_regression.hpp"
#include "streamvault/crypto/pre.hpp"

namespace sv::crypto {

/// Public half of a service principal as the owner sees it.
struct ServiceKey {
  Digest256 service_id{};
  PrePublicKey pre_key{};
};

/// Chain state for `epoch`, wrapped under the one-time key minted at
/// `onetime_epoch`. Exactly one of these is published per epoch.
struct KeyPublication {
  std::uint32_t epoch = 0;
  std::uint32_t onetime_epoch = 0;
  WrappedKey wrapped;
};

struct IssuedShare {
  Digest256 service_id{};
  std::uint32_t onetime_epoch = 0;
  TokenShare share;
};

struct RotationResult {
  KeyPublication publication;
  std::size_t new_tokens = 0;
};

struct RevocationResult {
  KeyPublication publication;
  PrePublicKey onetime_public{};
  std::vector<IssuedShare> shares;
};

/// Owner-side key management for one stream: the key-regression chain, the
/// current one-time re-encryption key pair, and the set of services that
/// hold tokens for it.
///
/// Rotation republishes one wrapped key and leaves every token valid.
/// Revocation mints a new one-time key pair and reissues a token share to
/// each remaining service.
class KeyDistributor {
 public:
  KeyDistributor(KeyRegressionChain chain, RandomSource& rng);
  KeyDistributor(KeyRegressionChain chain, std::uint32_t epoch, PreKeyPair onetime,
                 std::uint32_t onetime_epoch, std::map<Digest256, ServiceKey> grants,
                 RandomSource& rng);

  std::uint32_t epoch() const { return epoch_; }
  std::uint32_t onetime_epoch() const { return onetime_epoch_; }
  const PreKeyPair& onetime() const { return onetime_; }
  const KeyRegressionChain& chain() const { return chain_; }
  const std::map<Digest256, ServiceKey>& grants() const { return grants_; }

  StreamKey current_key() const { return chain_.key(epoch_); }
  KeyPublication publication() const;

  IssuedShare grant(const ServiceKey& service);
  RotationResult rotate_and_share();
  /// Throws NotCurrentlyGranted if the service holds no grant.
  RevocationResult revoke(const Digest256& service_id);

 private:
  void advance_epoch();

  KeyRegressionChain chain_;
  std::uint32_t epoch_ = 0;
  PreKeyPair onetime_;
  std::uint32_t onetime_epoch_ = 0;
  std::map<Digest256, ServiceKey> grants_;
  RandomSource* rng_;
};

/// Service-side counterpart: turns token shares into re-encryption tokens
/// and opens key publications.
class KeyReceiver {
 public:
  explicit KeyReceiver(PreKeyPair long_term) : key_pair_(std::move(long_term)) {}

  void accept(const TokenShare& share);
  bool has_token_for(const Digest256& onetime_pk_id) const {
    return tokens_.count(onetime_pk_id) != 0;
  }
  /// Throws TokenMismatch when no token matches the publication's one-time
  /// key, InvalidCiphertext when decryption fails.
  MemberState open(const KeyPublication& publication) const;

  const PreKeyPair& key_pair() const { return key_pair_; }

 private:
  PreKeyPair key_pair_;
  std::map<Digest256, ReEncryptionToken> tokens_;
};

}  // namespace sv::crypto
