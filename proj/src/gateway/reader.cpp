#include "streamvault/gateway/reader.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"
#include "streamvault/storage/objects.hpp"

namespace sv::gateway {

stream::StreamMeta meta_from_ledger(const ledger::AclState& state, const Digest256& stream_id) {
  const auto* s = state.find(stream_id);
  if (!s) throw Error(Errc::UnknownStream, "stream is not registered");
  stream::StreamMeta meta;
  meta.stream_id = stream_id;
  meta.owner_id = s->owner_id;
  meta.t0 = s->registration.t0;
  meta.delta = s->registration.delta;
  meta.checkpoint_interval = s->registration.checkpoint_interval;
  return meta;
}

Reader Reader::for_owner(crypto::SigningKey identity, crypto::KeyRegressionChain chain) {
  Reader r(std::move(identity));
  r.chain_.emplace(std::move(chain));
  return r;
}

Reader Reader::for_service(crypto::SigningKey identity, crypto::PreKeyPair pre_key) {
  Reader r(std::move(identity));
  r.receiver_.emplace(std::move(pre_key));
  return r;
}

std::optional<crypto::MemberState> Reader::member_state(const Digest256& stream_id) const {
  auto it = states_.find(stream_id);
  if (it == states_.end()) return std::nullopt;
  return it->second;
}

void Reader::add_member_state(const Digest256& stream_id, const crypto::MemberState& state) {
  auto [it, inserted] = states_.try_emplace(stream_id, state);
  if (!inserted && it->second.epoch < state.epoch) it->second = state;
}

std::optional<crypto::MemberState> Reader::fetch_state(const Digest256& stream_id, std::uint32_t epoch,
                                                       storage::StorageService& storage, bool& exists) {
  auto envelope_bytes = [&]() -> std::optional<Bytes> {
    try {
      return storage::authenticated_get(storage, storage::keymat_key(stream_id, epoch, Digest256{}), stream_id,
                                        identity_);
    } catch (const Error& e) {
      if (e.code() == Errc::NotFound) return std::nullopt;
      throw;
    }
  }();
  exists = envelope_bytes.has_value();
  if (!exists) return std::nullopt;
  const auto publication = storage::KeyEnvelope::parse(*envelope_bytes).publication;
  if (publication.epoch != epoch) throw Error(Errc::Malformed, "envelope epoch does not match its key");

  const auto onetime_id = publication.wrapped.target_pk_id;
  if (!receiver_->has_token_for(onetime_id) && onetime_id != crypto::pre_key_id(receiver_->key_pair().public_key)) {
    try {
      auto share_bytes = storage::authenticated_get(
          storage, storage::keymat_key(stream_id, publication.onetime_epoch, id()), stream_id, identity_);
      receiver_->accept(storage::TokenShareObject::parse(share_bytes).share);
    } catch (const Error& e) {
      if (e.code() != Errc::NotFound && e.code() != Errc::PermissionDenied) throw;
    }
  }
  try {
    return receiver_->open(publication);
  } catch (const Error& e) {
    if (e.code() == Errc::TokenMismatch || e.code() == Errc::InvalidCiphertext) return std::nullopt;
    throw;
  }
}

crypto::StreamKey Reader::key_for(const Digest256& stream_id, std::uint32_t epoch, storage::StorageService& storage) {
  if (chain_) return chain_->key(epoch);
  if (auto held = member_state(stream_id); held && held->epoch >= epoch) return crypto::unwind(*held, epoch);

  // The envelope for this epoch may be wrapped under a one-time key this
  // service never got a token for (it joined later); a newer envelope
  // unwinds to the same key, so probe forward until storage runs out.
  for (std::uint32_t e = epoch;; ++e) {
    bool exists = false;
    std::optional<crypto::MemberState> got;
    try {
      got = fetch_state(stream_id, e, storage, exists);
    } catch (const Error& err) {
      if (err.code() == Errc::PermissionDenied) throw;
      throw Error(Errc::MissingKeyEpoch, std::string("cannot obtain key material: ") + err.what());
    }
    if (got) {
      add_member_state(stream_id, *got);
      return crypto::unwind(*got, epoch);
    }
    if (!exists)
      throw Error(Errc::MissingKeyEpoch, "no accessible key publication covers epoch " + std::to_string(epoch));
  }
}

std::vector<stream::DataRecord> Reader::open(const stream::SealedChunk& chunk, const crypto::PublicKey& owner,
                                             storage::StorageService& storage) {
  return stream::open_chunk(chunk, key_for(chunk.header.stream_id, chunk.header.epoch, storage), owner);
}

std::vector<stream::DataRecord> Reader::query(storage::StorageService& storage, const stream::StreamMeta& meta,
                                              const crypto::PublicKey& owner, std::int64_t ta, std::int64_t tb) {
  std::vector<stream::DataRecord> out;
  if (tb <= ta || tb <= meta.t0) return out;
  const auto first = stream::chunk_index_for(std::max(ta, meta.t0), meta);
  const auto last = stream::chunk_index_for(tb - 1, meta);
  for (auto i = first; i <= last; ++i) {
    Bytes raw;
    try {
      raw = storage::authenticated_get(storage, stream::chunk_key(meta, i), meta.stream_id, identity_);
    } catch (const Error& e) {
      if (e.code() == Errc::NotFound) continue;
      throw;
    }
    for (auto& r : open(stream::SealedChunk::parse(raw), owner, storage))
      if (r.timestamp >= ta && r.timestamp < tb) out.push_back(std::move(r));
  }
  return out;
}

}  // namespace sv::gateway
