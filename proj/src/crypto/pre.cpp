#include "streamvault/crypto/pre.hpp"

#include <algorithm>

#include <sodium.h>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::crypto {

namespace {

using Pre = BbsPre<PreGroup>;

KeyMaterial kem_pad(const PreGroup::Element& m) { return tagged_hash(domain::kKemWrap, view(m)); }

FixedBytes<16> kem_check(const PreGroup::Element& m, const KeyMaterial& masked) {
  auto full = Sha256().update_u8(domain::kKemCheck).update(m).update(masked).finish();
  FixedBytes<16> out{};
  std::copy_n(full.begin(), out.size(), out.begin());
  return out;
}

}  // namespace

Digest256 pre_key_id(const PrePublicKey& pk) { return sha256(view(pk)); }

Bytes WrappedKey::serialize() const {
  ByteWriter w(kSerializedSize);
  w.raw(c1).raw(c2).raw(masked).raw(check).raw(target_pk_id);
  return w.take();
}

WrappedKey WrappedKey::parse(ByteView data) {
  try {
    ByteReader r(data);
    WrappedKey out;
    out.c1 = r.fixed<32>();
    out.c2 = r.fixed<32>();
    out.masked = r.fixed<32>();
    out.check = r.fixed<16>();
    out.target_pk_id = r.fixed<32>();
    r.expect_done();
    if (!PreGroup::is_valid(out.c1) || !PreGroup::is_valid(out.c2))
      throw Error(Errc::InvalidCiphertext, "wrapped key holds a non-canonical group element");
    return out;
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw Error(Errc::InvalidCiphertext, e.what());
    throw;
  }
}

Bytes ReEncryptionToken::serialize() const {
  ByteWriter w(kSerializedSize);
  w.raw(factor).raw(from_pk_id).raw(to_pk_id);
  return w.take();
}

ReEncryptionToken ReEncryptionToken::parse(ByteView data) {
  ByteReader r(data);
  ReEncryptionToken out;
  out.factor = r.fixed<32>();
  out.from_pk_id = r.fixed<32>();
  out.to_pk_id = r.fixed<32>();
  r.expect_done();
  return out;
}

PreKeyPair pre_keygen(RandomSource& rng) { return Pre::keygen(rng); }

WrappedKey pre_encrypt(const PrePublicKey& pk, const KeyMaterial& message, RandomSource& rng) {
  const auto m = PreGroup::random_element(rng);
  const auto ct = Pre::encrypt(pk, m, rng);
  WrappedKey out;
  out.c1 = ct.c1;
  out.c2 = ct.c2;
  const auto pad = kem_pad(m);
  for (std::size_t i = 0; i < message.size(); ++i) out.masked[i] = message[i] ^ pad[i];
  out.check = kem_check(m, out.masked);
  out.target_pk_id = pre_key_id(pk);
  return out;
}

ReEncryptionToken pre_token(const PreKeyPair& from, const PreKeyPair& to) {
  return {Pre::token(from.secret, to.secret), pre_key_id(from.public_key), pre_key_id(to.public_key)};
}

WrappedKey pre_reencrypt(const ReEncryptionToken& token, const WrappedKey& wrapped) {
  if (token.from_pk_id != wrapped.target_pk_id)
    throw Error(Errc::TokenMismatch, "token was issued for a different one-time key");
  auto ct = Pre::reencrypt(token.factor, {wrapped.c1, wrapped.c2});
  WrappedKey out = wrapped;
  out.c2 = ct.c2;
  out.target_pk_id = token.to_pk_id;
  return out;
}

KeyMaterial pre_decrypt(const PreKeyPair& kp, const WrappedKey& wrapped) {
  if (wrapped.target_pk_id != pre_key_id(kp.public_key))
    throw Error(Errc::InvalidCiphertext, "wrapped key is addressed to another key pair");
  const auto m = Pre::decrypt(kp.secret, {wrapped.c1, wrapped.c2});
  const auto expected = kem_check(m, wrapped.masked);
  if (sodium_memcmp(expected.data(), wrapped.check.data(), expected.size()) != 0)
    throw Error(Errc::InvalidCiphertext, "key wrap check failed");
  const auto pad = kem_pad(m);
  KeyMaterial out{};
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = wrapped.masked[i] ^ pad[i];
  return out;
}

Bytes TokenShare::serialize() const {
  ByteWriter w(kSerializedSize);
  w.raw(from_pk_id).raw(sealed_inverse.serialize());
  return w.take();
}

TokenShare TokenShare::parse(ByteView data) {
  if (data.size() != kSerializedSize) throw Error(Errc::InvalidCiphertext, "token share has wrong size");
  TokenShare out;
  std::copy_n(data.begin(), 32, out.from_pk_id.begin());
  out.sealed_inverse = WrappedKey::parse(data.subspan(32));
  return out;
}

TokenShare issue_token_share(const PreKeyPair& onetime, const PrePublicKey& service_pk,
                             RandomSource& rng) {
  TokenShare share;
  share.from_pk_id = pre_key_id(onetime.public_key);
  share.sealed_inverse = pre_encrypt(service_pk, PreGroup::scalar_invert(onetime.secret), rng);
  return share;
}

ReEncryptionToken accept_token_share(const PreKeyPair& service, const TokenShare& share) {
  const auto inverse = pre_decrypt(service, share.sealed_inverse);
  return {PreGroup::scalar_mul(service.secret, inverse), share.from_pk_id,
          pre_key_id(service.public_key)};
}

}  // namespace sv::crypto
