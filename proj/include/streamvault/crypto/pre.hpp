#pragma once

#include "streamvault/common/bytes.hpp"
#include "streamvault/common/random.hpp"
#include "streamvault/crypto/group.hpp"

namespace sv::crypto {

// Bidirectional ElGamal proxy re-encryption (BBS98 style).
//   keygen:     sk = a, pk = g^a
//   encrypt:    (c1, c2) = (m * g^r, pk^r)
//   token a->b: b / a
//   reencrypt:  (c1, c2^(b/a)) = (m * g^r, g^(b r))
//   decrypt:    m = c1 / c2^(1/sk)

template <class G>
struct PreKeyPairT {
  typename G::Scalar secret{};
  typename G::Element public_key{};
};

template <class G>
struct ElGamalCiphertextT {
  typename G::Element c1{};
  typename G::Element c2{};
};

template <class G>
struct BbsPre {
  using Scalar = typename G::Scalar;
  using Element = typename G::Element;

  static PreKeyPairT<G> keygen(RandomSource& rng) {
    PreKeyPairT<G> kp;
    kp.secret = G::random_scalar(rng);
    kp.public_key = G::base_exp(kp.secret);
    return kp;
  }

  static ElGamalCiphertextT<G> encrypt_with(const Element& pk, const Element& m, const Scalar& r) {
    return {G::op(m, G::base_exp(r)), G::exp(pk, r)};
  }

  static ElGamalCiphertextT<G> encrypt(const Element& pk, const Element& m, RandomSource& rng) {
    return encrypt_with(pk, m, G::random_scalar(rng));
  }

  static Scalar token(const Scalar& sk_from, const Scalar& sk_to) {
    return G::scalar_mul(sk_to, G::scalar_invert(sk_from));
  }

  static ElGamalCiphertextT<G> reencrypt(const Scalar& token, const ElGamalCiphertextT<G>& ct) {
    return {ct.c1, G::exp(ct.c2, token)};
  }

  static Element decrypt(const Scalar& sk, const ElGamalCiphertextT<G>& ct) {
    return G::op_inverse(ct.c1, G::exp(ct.c2, G::scalar_invert(sk)));
  }
};

// Production instantiation over ristretto255 with a KEM wrap for 256-bit
// payloads: a random group element is ElGamal-encrypted and a digest of it
// masks the payload.

using PreGroup = Ristretto255;
using PreKeyPair = PreKeyPairT<PreGroup>;
using PrePublicKey = PreGroup::Element;
using KeyMaterial = FixedBytes<32>;

Digest256 pre_key_id(const PrePublicKey& pk);

struct WrappedKey {
  static constexpr std::size_t kSerializedSize = 32 + 32 + 32 + 16 + 32;

  PreGroup::Element c1{};
  PreGroup::Element c2{};
  KeyMaterial masked{};
  FixedBytes<16> check{};
  Digest256 target_pk_id{};

  Bytes serialize() const;
  static WrappedKey parse(ByteView data);
  bool operator==(const WrappedKey&) const = default;
};

struct ReEncryptionToken {
  static constexpr std::size_t kSerializedSize = 32 + 32 + 32;

  PreGroup::Scalar factor{};
  Digest256 from_pk_id{};
  Digest256 to_pk_id{};

  Bytes serialize() const;
  static ReEncryptionToken parse(ByteView data);
};

PreKeyPair pre_keygen(RandomSource& rng);
WrappedKey pre_encrypt(const PrePublicKey& pk, const KeyMaterial& message, RandomSource& rng);
/// Requires both secrets; see TokenShare for issuance that keeps the
/// recipient's secret on the recipient's side.
ReEncryptionToken pre_token(const PreKeyPair& from, const PreKeyPair& to);
/// Throws TokenMismatch when the token was not issued for the ciphertext's
/// current recipient.
WrappedKey pre_reencrypt(const ReEncryptionToken& token, const WrappedKey& wrapped);
/// Throws InvalidCiphertext when the ciphertext is not addressed to kp or
/// does not decrypt consistently.
KeyMaterial pre_decrypt(const PreKeyPair& kp, const WrappedKey& wrapped);

/// Token issuance message. The owner wraps sk_a^-1 under the service's
/// long-term key; the service multiplies by its own secret to obtain the
/// token sk_b / sk_a. The owner never learns sk_b.
struct TokenShare {
  static constexpr std::size_t kSerializedSize = 32 + WrappedKey::kSerializedSize;

  Digest256 from_pk_id{};
  WrappedKey sealed_inverse;

  Bytes serialize() const;
  static TokenShare parse(ByteView data);
};

TokenShare issue_token_share(const PreKeyPair& onetime, const PrePublicKey& service_pk,
                             RandomSource& rng);
ReEncryptionToken accept_token_share(const PreKeyPair& service, const TokenShare& share);

}  // namespace sv::crypto
