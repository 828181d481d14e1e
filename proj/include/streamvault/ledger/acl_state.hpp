#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "streamvault/ledger/block.hpp"
#include "streamvault/ledger/transaction.hpp"

namespace sv::ledger {

enum class Permission { Owner, Granted, Denied };

const char* permission_name(Permission p);

/// One grant's lifetime; revoked_height set once a Revoke overrides it.
struct GrantInterval {
  std::uint64_t granted_height = 0;
  std::optional<std::uint64_t> revoked_height;
  Digest256 token_ref{};

  bool covers(std::uint64_t height) const {
    return granted_height <= height && (!revoked_height || height < *revoked_height);
  }
  bool operator==(const GrantInterval&) const = default;
};

struct Anchor {
  std::uint64_t chunk_index = 0;
  Digest256 chunk_digest{};
  std::uint64_t height = 0;
  bool operator==(const Anchor&) const = default;
};

struct StreamState {
  Digest256 owner_id{};
  crypto::PublicKey owner_key{};
  std::uint64_t registered_height = 0;
  RegisterPayload registration;
  std::uint32_t epoch = 0;  // last epoch announced by a Revoke
  std::map<Digest256, std::vector<GrantInterval>> grants;
  std::vector<Anchor> anchors;  // strictly increasing chunk_index

  bool currently_granted(const Digest256& grantee) const;
};

struct AuditEvent {
  std::uint64_t height = 0;
  std::uint32_t index = 0;  // position inside the block
  Digest256 tx_digest{};
  Digest256 stream_id{};
  std::string action;  // register | grant | revoke | checkpoint | invalid | malformed
  bool valid = true;
  std::vector<Digest256> parties;
  std::string detail;
};

/// Materialized permission state: a pure fold over the confirmed blocks.
struct AclState {
  std::uint64_t height = 0;
  Digest256 tip_hash{};
  std::map<Digest256, StreamState> streams;
  std::vector<AuditEvent> events;

  const StreamState* find(const Digest256& stream_id) const;
  /// Digest of the canonical serialization; equal states, equal digests.
  Digest256 digest() const;
};

AclState initial_state();

/// Requires block.height == state.height + 1, otherwise throws HeightGap.
/// Invalid transactions are recorded as audit events and otherwise skipped.
AclState apply_block(AclState state, const Block& block);

/// Owner is always Owner; otherwise Granted iff an unrevoked grant covers
/// at_height (default: the state's height). Throws UnknownStream.
Permission query_permission(const AclState& state, const Digest256& stream_id, const Digest256& requester,
                            std::optional<std::uint64_t> at_height = std::nullopt);

/// Highest-index confirmed checkpoint, if any. Throws UnknownStream.
std::optional<Anchor> latest_anchor(const AclState& state, const Digest256& stream_id);

/// Events for one stream ordered by (height, index). Throws UnknownStream.
std::vector<AuditEvent> audit_log(const AclState& state, const Digest256& stream_id);

/// One line of newline-delimited JSON.
std::string audit_event_json(const AuditEvent& event);

}  // namespace sv::ledger
