#include "streamvault/crypto/signature.hpp"

#include <sodium.h>

#include "streamvault/crypto/hash.hpp"

namespace sv::crypto {

Digest256 identity_of(const PublicKey& pk) { return sha256(view(pk)); }

SigningKey SigningKey::generate(RandomSource& rng) { return from_seed(rng.bytes<32>()); }

SigningKey SigningKey::from_seed(const SigningSeed& seed) {
  ensure_sodium();
  SigningKey key;
  key.seed_ = seed;
  crypto_sign_seed_keypair(key.public_.data(), key.secret_.data(), seed.data());
  return key;
}

SigningKey::~SigningKey() {
  sodium_memzero(secret_.data(), secret_.size());
  sodium_memzero(seed_.data(), seed_.size());
}

Signature SigningKey::sign(ByteView message) const {
  Signature sig{};
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(), secret_.data());
  return sig;
}

bool verify_signature(const PublicKey& pk, ByteView message, const Signature& sig) {
  ensure_sodium();
  return crypto_sign_verify_detached(sig.data(), message.data(), message.size(), pk.data()) == 0;
}

}  // namespace sv::crypto
