#include "streamvault/ledger/acl_state.hpp"

#include <variant>

#include <json.hpp>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::ledger {

const char* permission_name(Permission p) {
  switch (p) {
    case Permission::Owner: return "owner";
    case Permission::Granted: return "granted";
    case Permission::Denied: return "denied";
  }
  return "unknown";
}

bool StreamState::currently_granted(const Digest256& grantee) const {
  auto it = grants.find(grantee);
  return it != grants.end() && !it->second.empty() && !it->second.back().revoked_height;
}

const StreamState* AclState::find(const Digest256& stream_id) const {
  auto it = streams.find(stream_id);
  return it == streams.end() ? nullptr : &it->second;
}

Digest256 AclState::digest() const {
  ByteWriter w;
  w.u8(crypto::domain::kAclState).u64(height).raw(tip_hash).u32(static_cast<std::uint32_t>(streams.size()));
  for (const auto& [id, s] : streams) {
    w.raw(id).raw(s.owner_id).raw(s.owner_key).u64(s.registered_height).raw(s.registration.serialize());
    w.u32(s.epoch).u32(static_cast<std::uint32_t>(s.grants.size()));
    for (const auto& [grantee, intervals] : s.grants) {
      w.raw(grantee).u32(static_cast<std::uint32_t>(intervals.size()));
      for (const auto& g : intervals)
        w.u64(g.granted_height).u8(g.revoked_height ? 1 : 0).u64(g.revoked_height.value_or(0)).raw(g.token_ref);
    }
    w.u32(static_cast<std::uint32_t>(s.anchors.size()));
    for (const auto& a : s.anchors) w.u64(a.chunk_index).raw(a.chunk_digest).u64(a.height);
  }
  w.u32(static_cast<std::uint32_t>(events.size()));
  for (const auto& e : events) {
    w.u64(e.height).u32(e.index).raw(e.tx_digest).raw(e.stream_id).var(as_bytes(e.action));
    w.u8(e.valid ? 1 : 0).var(as_bytes(e.detail)).u32(static_cast<std::uint32_t>(e.parties.size()));
    for (const auto& p : e.parties) w.raw(p);
  }
  return crypto::sha256(w.bytes());
}

AclState initial_state() {
  AclState s;
  s.tip_hash = genesis_block().digest();
  return s;
}

namespace {

struct Rejection {
  std::string reason;
};

// Applies one parsed, signature-checked transaction. Returns the audit
// parties on success or a Rejection describing why it was skipped.
std::variant<std::vector<Digest256>, Rejection> apply_tx(AclState& state, const LedgerTx& tx,
                                                         std::uint64_t height) {
  const auto issuer = tx.issuer_id();

  if (tx.kind == TxKind::RegisterStream) {
    const auto reg = RegisterPayload::parse(tx.payload);
    if (derive_stream_id(tx.issuer_key, reg) != tx.stream_id) return Rejection{"stream id does not match registration"};
    if (reg.delta <= 0 || reg.checkpoint_interval == 0 || reg.max_epochs == 0)
      return Rejection{"invalid stream parameters"};
    if (state.streams.count(tx.stream_id)) return Rejection{"duplicate registration"};
    StreamState s;
    s.owner_id = issuer;
    s.owner_key = tx.issuer_key;
    s.registered_height = height;
    s.registration = reg;
    state.streams.emplace(tx.stream_id, std::move(s));
    return std::vector<Digest256>{issuer};
  }

  auto it = state.streams.find(tx.stream_id);
  if (it == state.streams.end()) return Rejection{"unknown stream"};
  auto& s = it->second;
  if (issuer != s.owner_id) return Rejection{"issuer is not the stream owner"};

  switch (tx.kind) {
    case TxKind::Grant: {
      const auto p = GrantPayload::parse(tx.payload);
      if (p.grantee_id == s.owner_id) return Rejection{"owner cannot be a grantee"};
      if (s.currently_granted(p.grantee_id)) return Rejection{"already granted"};
      s.grants[p.grantee_id].push_back({height, std::nullopt, p.token_ref});
      return std::vector<Digest256>{issuer, p.grantee_id};
    }
    case TxKind::Revoke: {
      const auto p = RevokePayload::parse(tx.payload);
      if (!s.currently_granted(p.grantee_id)) return Rejection{"grantee holds no active grant"};
      if (p.new_epoch <= s.epoch) return Rejection{"revocation must advance the key epoch"};
      s.grants[p.grantee_id].back().revoked_height = height;
      s.epoch = p.new_epoch;
      return std::vector<Digest256>{issuer, p.grantee_id};
    }
    case TxKind::Checkpoint: {
      const auto p = CheckpointPayload::parse(tx.payload);
      if (!s.anchors.empty() && p.chunk_index <= s.anchors.back().chunk_index)
        return Rejection{"checkpoint does not advance the anchor"};
      s.anchors.push_back({p.chunk_index, p.chunk_digest, height});
      return std::vector<Digest256>{issuer};
    }
    case TxKind::RegisterStream:
      break;
  }
  return Rejection{"unhandled transaction kind"};
}

}  // namespace

AclState apply_block(AclState state, const Block& block) {
  if (block.height != state.height + 1)
    throw Error(Errc::HeightGap, "expected block " + std::to_string(state.height + 1) + ", got " +
                                     std::to_string(block.height));
  if (block.prev_hash != state.tip_hash) throw Error(Errc::HeightGap, "block does not extend the applied tip");

  for (std::size_t i = 0; i < block.payloads.size(); ++i) {
    const auto& raw = block.payloads[i];
    if (!has_tx_magic(raw)) continue;

    AuditEvent ev;
    ev.height = block.height;
    ev.index = static_cast<std::uint32_t>(i);
    ev.tx_digest = crypto::sha256(raw);

    LedgerTx tx;
    try {
      tx = LedgerTx::parse(raw);
    } catch (const Error& e) {
      ev.action = "malformed";
      ev.valid = false;
      ev.detail = e.what();
      state.events.push_back(std::move(ev));
      continue;
    }
    ev.stream_id = tx.stream_id;
    ev.action = tx_kind_name(tx.kind);

    if (!tx.signature_valid()) {
      ev.valid = false;
      ev.detail = "bad signature";
      ev.parties = {tx.issuer_id()};
      state.events.push_back(std::move(ev));
      continue;
    }

    try {
      auto result = apply_tx(state, tx, block.height);
      if (auto* parties = std::get_if<std::vector<Digest256>>(&result)) {
        ev.parties = std::move(*parties);
      } else {
        ev.valid = false;
        ev.detail = std::get<Rejection>(result).reason;
        ev.parties = {tx.issuer_id()};
      }
    } catch (const Error& e) {
      ev.valid = false;
      ev.detail = e.what();
      ev.parties = {tx.issuer_id()};
    }
    state.events.push_back(std::move(ev));
  }

  state.height = block.height;
  state.tip_hash = block.digest();
  return state;
}

Permission query_permission(const AclState& state, const Digest256& stream_id, const Digest256& requester,
                            std::optional<std::uint64_t> at_height) {
  const auto* s = state.find(stream_id);
  if (!s) throw Error(Errc::UnknownStream);
  if (requester == s->owner_id) return Permission::Owner;
  const auto h = at_height.value_or(state.height);
  auto it = s->grants.find(requester);
  if (it == s->grants.end()) return Permission::Denied;
  for (const auto& g : it->second)
    if (g.covers(h)) return Permission::Granted;
  return Permission::Denied;
}

std::optional<Anchor> latest_anchor(const AclState& state, const Digest256& stream_id) {
  const auto* s = state.find(stream_id);
  if (!s) throw Error(Errc::UnknownStream);
  if (s->anchors.empty()) return std::nullopt;
  return s->anchors.back();
}

std::vector<AuditEvent> audit_log(const AclState& state, const Digest256& stream_id) {
  if (!state.find(stream_id)) throw Error(Errc::UnknownStream);
  std::vector<AuditEvent> out;
  for (const auto& e : state.events)
    if (e.stream_id == stream_id) out.push_back(e);
  return out;
}

std::string audit_event_json(const AuditEvent& event) {
  nlohmann::ordered_json j;
  j["height"] = event.height;
  j["index"] = event.index;
  j["tx"] = to_hex(event.tx_digest);
  j["stream"] = to_hex(event.stream_id);
  j["action"] = event.action;
  j["valid"] = event.valid;
  auto parties = nlohmann::json::array();
  for (const auto& p : event.parties) parties.push_back(to_hex(p));
  j["parties"] = parties;
  if (!event.detail.empty()) j["detail"] = event.detail;
  return j.dump();
}

}  // namespace sv::ledger
