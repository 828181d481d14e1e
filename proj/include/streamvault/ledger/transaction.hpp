#pragma once

#include <array>
#include <cstdint>

#include "streamvault/common/bytes.hpp"
#include "streamvault/crypto/signature.hpp"

namespace sv::ledger {

/// Prefix marking a chain payload as ours. Payloads without it belong to
/// other applications sharing the chain and are skipped silently.
inline constexpr std::array<std::uint8_t, 4> kTxMagic = {'S', 'V', 'L', '1'};

enum class TxKind : std::uint8_t {
  RegisterStream = 1,
  Grant = 2,
  Revoke = 3,
  Checkpoint = 4,
};

const char* tx_kind_name(TxKind kind);

struct RegisterPayload {
  std::int64_t t0 = 0;
  std::int64_t delta = 0;
  std::uint32_t checkpoint_interval = 1;
  std::uint32_t max_epochs = 0;
  Digest256 label{};  // distinguishes streams of the same owner

  Bytes serialize() const;
  static RegisterPayload parse(ByteView data);
  bool operator==(const RegisterPayload&) const = default;
};

struct GrantPayload {
  Digest256 grantee_id{};
  Digest256 token_ref{};  // digest of the token share held in storage

  Bytes serialize() const;
  static GrantPayload parse(ByteView data);
};

struct RevokePayload {
  Digest256 grantee_id{};
  std::uint32_t new_epoch = 0;

  Bytes serialize() const;
  static RevokePayload parse(ByteView data);
};

struct CheckpointPayload {
  std::uint64_t chunk_index = 0;
  Digest256 chunk_digest{};

  Bytes serialize() const;
  static CheckpointPayload parse(ByteView data);
};

/// A signed control-plane operation. Wire form:
///   "SVL1" | kind u8 | stream_id 32 | issuer_key 32 | u32 len | payload | signature 64
/// The signature covers everything before it.
struct LedgerTx {
  TxKind kind = TxKind::RegisterStream;
  Digest256 stream_id{};
  crypto::PublicKey issuer_key{};
  Bytes payload;
  crypto::Signature signature{};

  Digest256 issuer_id() const { return crypto::identity_of(issuer_key); }
  Bytes signing_bytes() const;
  Bytes serialize() const;
  /// Throws MalformedTx.
  static LedgerTx parse(ByteView data);
  Digest256 digest() const;
  bool signature_valid() const;

  static LedgerTx make(TxKind kind, const Digest256& stream_id, Bytes payload,
                       const crypto::SigningKey& issuer);
};

bool has_tx_magic(ByteView data);

/// stream_id = sha256(0x20 || owner_key || registration payload)
Digest256 derive_stream_id(const crypto::PublicKey& owner, const RegisterPayload& reg);

LedgerTx make_register(const crypto::SigningKey& owner, const RegisterPayload& reg);
LedgerTx make_grant(const crypto::SigningKey& issuer, const Digest256& stream_id, const GrantPayload& p);
LedgerTx make_revoke(const crypto::SigningKey& issuer, const Digest256& stream_id, const RevokePayload& p);
LedgerTx make_checkpoint(const crypto::SigningKey& issuer, const Digest256& stream_id,
                         const CheckpointPayload& p);

}  // namespace sv::ledger
