#include "streamvault/ledger/transaction.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::ledger {

namespace {

template <class F>
auto parse_payload(ByteView data, F&& body) {
  try {
    ByteReader r(data);
    auto out = body(r);
    r.expect_done();
    return out;
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw Error(Errc::MalformedTx, e.what());
    throw;
  }
}

}  // namespace

const char* tx_kind_name(TxKind kind) {
  switch (kind) {
    case TxKind::RegisterStream: return "register";
    case TxKind::Grant: return "grant";
    case TxKind::Revoke: return "revoke";
    case TxKind::Checkpoint: return "checkpoint";
  }
  return "unknown";
}

Bytes RegisterPayload::serialize() const {
  ByteWriter w(8 + 8 + 4 + 4 + 32);
  w.i64(t0).i64(delta).u32(checkpoint_interval).u32(max_epochs).raw(label);
  return w.take();
}

RegisterPayload RegisterPayload::parse(ByteView data) {
  return parse_payload(data, [](ByteReader& r) {
    RegisterPayload p;
    p.t0 = r.i64();
    p.delta = r.i64();
    p.checkpoint_interval = r.u32();
    p.max_epochs = r.u32();
    p.label = r.fixed<32>();
    return p;
  });
}

Bytes GrantPayload::serialize() const {
  ByteWriter w(64);
  w.raw(grantee_id).raw(token_ref);
  return w.take();
}

GrantPayload GrantPayload::parse(ByteView data) {
  return parse_payload(data, [](ByteReader& r) {
    GrantPayload p;
    p.grantee_id = r.fixed<32>();
    p.token_ref = r.fixed<32>();
    return p;
  });
}

Bytes RevokePayload::serialize() const {
  ByteWriter w(36);
  w.raw(grantee_id).u32(new_epoch);
  return w.take();
}

RevokePayload RevokePayload::parse(ByteView data) {
  return parse_payload(data, [](ByteReader& r) {
    RevokePayload p;
    p.grantee_id = r.fixed<32>();
    p.new_epoch = r.u32();
    return p;
  });
}

Bytes CheckpointPayload::serialize() const {
  ByteWriter w(40);
  w.u64(chunk_index).raw(chunk_digest);
  return w.take();
}

CheckpointPayload CheckpointPayload::parse(ByteView data) {
  return parse_payload(data, [](ByteReader& r) {
    CheckpointPayload p;
    p.chunk_index = r.u64();
    p.chunk_digest = r.fixed<32>();
    return p;
  });
}

Bytes LedgerTx::signing_bytes() const {
  ByteWriter w(4 + 1 + 32 + 32 + 4 + payload.size());
  w.raw(ByteView{kTxMagic.data(), kTxMagic.size()})
      .u8(static_cast<std::uint8_t>(kind))
      .raw(stream_id)
      .raw(issuer_key)
      .var(payload);
  return w.take();
}

Bytes LedgerTx::serialize() const {
  ByteWriter w;
  w.raw(signing_bytes()).raw(signature);
  return w.take();
}

bool has_tx_magic(ByteView data) {
  return data.size() >= kTxMagic.size() && std::equal(kTxMagic.begin(), kTxMagic.end(), data.begin());
}

LedgerTx LedgerTx::parse(ByteView data) {
  if (!has_tx_magic(data)) throw Error(Errc::MalformedTx, "missing transaction magic");
  try {
    ByteReader r(data.subspan(kTxMagic.size()));
    LedgerTx tx;
    const auto kind = r.u8();
    if (kind < 1 || kind > 4) throw Error(Errc::MalformedTx, "unknown transaction kind");
    tx.kind = static_cast<TxKind>(kind);
    tx.stream_id = r.fixed<32>();
    tx.issuer_key = r.fixed<32>();
    auto payload = r.var(4096);
    tx.payload.assign(payload.begin(), payload.end());
    tx.signature = r.fixed<64>();
    r.expect_done();
    return tx;
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw Error(Errc::MalformedTx, e.what());
    throw;
  }
}

Digest256 LedgerTx::digest() const { return crypto::sha256(serialize()); }

bool LedgerTx::signature_valid() const {
  return crypto::verify_signature(issuer_key, signing_bytes(), signature);
}

LedgerTx LedgerTx::make(TxKind kind, const Digest256& stream_id, Bytes payload,
                        const crypto::SigningKey& issuer) {
  LedgerTx tx;
  tx.kind = kind;
  tx.stream_id = stream_id;
  tx.issuer_key = issuer.public_key();
  tx.payload = std::move(payload);
  tx.signature = issuer.sign(tx.signing_bytes());
  return tx;
}

Digest256 derive_stream_id(const crypto::PublicKey& owner, const RegisterPayload& reg) {
  return crypto::Sha256().update_u8(crypto::domain::kStreamId).update(owner).update(reg.serialize()).finish();
}

LedgerTx make_register(const crypto::SigningKey& owner, const RegisterPayload& reg) {
  return LedgerTx::make(TxKind::RegisterStream, derive_stream_id(owner.public_key(), reg), reg.serialize(),
                        owner);
}

LedgerTx make_grant(const crypto::SigningKey& issuer, const Digest256& stream_id, const GrantPayload& p) {
  return LedgerTx::make(TxKind::Grant, stream_id, p.serialize(), issuer);
}

LedgerTx make_revoke(const crypto::SigningKey& issuer, const Digest256& stream_id, const RevokePayload& p) {
  return LedgerTx::make(TxKind::Revoke, stream_id, p.serialize(), issuer);
}

LedgerTx make_checkpoint(const crypto::SigningKey& issuer, const Digest256& stream_id,
                         const CheckpointPayload& p) {
  return LedgerTx::make(TxKind::Checkpoint, stream_id, p.serialize(), issuer);
}

}  // namespace sv::ledger
