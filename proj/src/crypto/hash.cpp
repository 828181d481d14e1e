#include "streamvault/crypto/hash.hpp"

#include "streamvault/common/random.hpp"

namespace sv::crypto {

Digest256 sha256(ByteView data) {
  ensure_sodium();
  Digest256 out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Digest256 tagged_hash(std::uint8_t prefix, ByteView data) {
  return Sha256().update_u8(prefix).update(data).finish();
}

Sha256::Sha256() {
  ensure_sodium();
  crypto_hash_sha256_init(&state_);
}

Sha256& Sha256::update(ByteView data) {
  crypto_hash_sha256_update(&state_, data.data(), data.size());
  return *this;
}

Digest256 Sha256::finish() {
  Digest256 out{};
  crypto_hash_sha256_final(&state_, out.data());
  return out;
}

}  // namespace sv::crypto
