#pragma once

#include "streamvault/common/bytes.hpp"
#include "streamvault/common/random.hpp"

namespace sv::crypto {

using PublicKey = FixedBytes<32>;
using Signature = FixedBytes<64>;
using SigningSeed = FixedBytes<32>;

/// Pseudo-identity of a principal: sha256 of its Ed25519 verification key.
Digest256 identity_of(const PublicKey& pk);

/// Ed25519 signing key. The owner id derived from it is the identity used
/// on the ledger and inside chunk keys.
class SigningKey {
 public:
  static SigningKey generate(RandomSource& rng);
  static SigningKey from_seed(const SigningSeed& seed);

  SigningKey(const SigningKey&) = default;
  SigningKey& operator=(const SigningKey&) = default;
  ~SigningKey();

  const PublicKey& public_key() const { return public_; }
  Digest256 id() const { return identity_of(public_); }
  const SigningSeed& seed() const { return seed_; }

  Signature sign(ByteView message) const;

 private:
  SigningKey() = default;

  SigningSeed seed_{};
  FixedBytes<64> secret_{};
  PublicKey public_{};
};

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig);

}  // namespace sv::crypto
