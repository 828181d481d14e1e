#pragma once

#include <map>
#include <optional>
#include <vector>

#include "streamvault/crypto/key_distribution.hpp"
#include "streamvault/crypto/signature.hpp"
#include "streamvault/ledger/acl_state.hpp"
#include "streamvault/storage/node.hpp"
#include "streamvault/stream/chunk.hpp"

namespace sv::gateway {

/// Stream geometry a reader needs, taken from the confirmed registration.
stream::StreamMeta meta_from_ledger(const ledger::AclState& state, const Digest256& stream_id);

/// A principal reading a stream: the owner (holding the key-regression
/// chain) or a service (holding a long-term PRE key pair). Services fetch
/// wrapped keys and token shares from storage on demand and keep the
/// newest chain state per stream.
class Reader {
 public:
  static Reader for_owner(crypto::SigningKey identity, crypto::KeyRegressionChain chain);
  static Reader for_service(crypto::SigningKey identity, crypto::PreKeyPair pre_key);

  const crypto::SigningKey& identity() const { return identity_; }
  Digest256 id() const { return identity_.id(); }
  bool is_owner() const { return chain_.has_value(); }
  const crypto::KeyReceiver* receiver() const { return receiver_ ? &*receiver_ : nullptr; }

  /// Throws MissingKeyEpoch when no accessible publication covers epoch.
  crypto::StreamKey key_for(const Digest256& stream_id, std::uint32_t epoch, storage::StorageService& storage);
  /// Highest chain state held for stream, if any.
  std::optional<crypto::MemberState> member_state(const Digest256& stream_id) const;
  void add_member_state(const Digest256& stream_id, const crypto::MemberState& state);

  std::vector<stream::DataRecord> open(const stream::SealedChunk& chunk, const crypto::PublicKey& owner,
                                       storage::StorageService& storage);

  /// Reads [ta, tb) straight from storage. Windows with no chunk are
  /// skipped; permission errors propagate.
  std::vector<stream::DataRecord> query(storage::StorageService& storage, const stream::StreamMeta& meta,
                                        const crypto::PublicKey& owner, std::int64_t ta, std::int64_t tb);

 private:
  Reader(crypto::SigningKey identity) : identity_(std::move(identity)) {}
  std::optional<crypto::MemberState> fetch_state(const Digest256& stream_id, std::uint32_t epoch,
                                                 storage::StorageService& storage, bool& exists);

  crypto::SigningKey identity_;
  std::optional<crypto::KeyRegressionChain> chain_;
  std::optional<crypto::KeyReceiver> receiver_;
  std::map<Digest256, crypto::MemberState> states_;
};

}  // namespace sv::gateway
