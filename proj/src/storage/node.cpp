#include "streamvault/storage/node.hpp"

#include <chrono>

#include "streamvault/common/random.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/storage/objects.hpp"
#include "streamvault/stream/chunk.hpp"

namespace sv::storage {

Digest256 put_signing_digest(const Digest256& key, const Digest256& stream_id, ByteView value) {
  crypto::Sha256 h;
  h.update_u8(crypto::domain::kPutRequest);
  h.update(key);
  h.update(stream_id);
  h.update(crypto::sha256(value));
  return h.finish();
}

Digest256 get_signing_digest(const Challenge& challenge, const crypto::PublicKey& requester, const Digest256& key,
                             const Digest256& stream_id) {
  ByteWriter w;
  w.u8(crypto::domain::kGetRequest);
  w.raw(challenge.node_id);
  w.raw(challenge.nonce);
  w.i64(challenge.issued_ms);
  w.raw(requester);
  w.raw(key);
  w.raw(stream_id);
  return crypto::sha256(w.bytes());
}

PutRequest make_put(const Digest256& key, const Digest256& stream_id, Bytes value, const crypto::SigningKey& writer) {
  PutRequest req;
  req.key = key;
  req.stream_id = stream_id;
  req.writer = writer.public_key();
  req.signature = writer.sign(put_signing_digest(key, stream_id, value));
  req.value = std::move(value);
  return req;
}

GetRequest make_get(const Challenge& challenge, const Digest256& key, const Digest256& stream_id,
                    const crypto::SigningKey& requester) {
  GetRequest req;
  req.key = key;
  req.stream_id = stream_id;
  req.requester = requester.public_key();
  req.challenge = challenge;
  req.signature = requester.sign(get_signing_digest(challenge, req.requester, key, stream_id));
  return req;
}

Bytes authenticated_get(StorageService& service, const Digest256& key, const Digest256& stream_id,
                        const crypto::SigningKey& requester) {
  return service.get(make_get(service.challenge(), key, stream_id, requester));
}

StorageNode::StorageNode(NodeConfig config, StorageBackend& backend, ledger::Ledger& ledger, Clock clock)
    : config_(config), backend_(backend), ledger_(ledger), clock_(std::move(clock)) {
  if (!clock_)
    clock_ = [] {
      return std::chrono::duration_cast<std::chrono::milliseconds>(
                 std::chrono::system_clock::now().time_since_epoch())
          .count();
    };
}

Challenge StorageNode::challenge() {
  static thread_local SystemRandom rng;
  Challenge c;
  c.node_id = config_.node_id;
  c.nonce = rng.bytes<16>();
  c.issued_ms = clock_();
  std::lock_guard lock(challenge_mu_);
  // Drop expired entries so unanswered challenges cannot pile up.
  if (outstanding_.size() > 4096)
    std::erase_if(outstanding_, [&](const auto& e) { return c.issued_ms - e.second > config_.challenge_validity_ms; });
  outstanding_.emplace(std::string(c.nonce.begin(), c.nonce.end()), c.issued_ms);
  return c;
}

void StorageNode::consume_challenge(const Challenge& challenge) {
  std::lock_guard lock(challenge_mu_);
  auto it = outstanding_.find(std::string(challenge.nonce.begin(), challenge.nonce.end()));
  if (challenge.node_id != config_.node_id || it == outstanding_.end() || it->second != challenge.issued_ms)
    throw Error(Errc::StaleChallenge, "challenge was not issued by this node or was already used");
  outstanding_.erase(it);
  if (clock_() - challenge.issued_ms > config_.challenge_validity_ms)
    throw Error(Errc::StaleChallenge, "challenge expired");
}

void StorageNode::check_object(const PutRequest& request, const ledger::StreamState& stream) const {
  ObjectInfo info = peek_object(request.value);
  if (info.stream_id != request.stream_id) throw Error(Errc::InvalidArgument, "object belongs to another stream");
  switch (info.kind) {
    case ObjectKind::Chunk: {
      auto chunk = stream::SealedChunk::parse(request.value);
      stream::StreamMeta meta;
      meta.stream_id = request.stream_id;
      meta.owner_id = stream.owner_id;
      meta.t0 = stream.registration.t0;
      meta.delta = stream.registration.delta;
      if (chunk.header.start_ts != stream::chunk_start(meta, chunk.header.chunk_index) ||
          stream::chunk_key(meta, chunk.header.chunk_index) != request.key)
        throw Error(Errc::InvalidArgument, "key does not match the chunk's window");
      if (!stream::verify_chunk_signature(chunk, stream.owner_key))
        throw Error(Errc::BadSignature, "chunk is not signed by the stream owner");
      break;
    }
    case ObjectKind::KeyEnvelope:
      if (KeyEnvelope::parse(request.value).storage_key() != request.key)
        throw Error(Errc::InvalidArgument, "key does not match the envelope");
      break;
    case ObjectKind::TokenShare:
      if (TokenShareObject::parse(request.value).storage_key() != request.key)
        throw Error(Errc::InvalidArgument, "key does not match the token share");
      break;
  }
}

void StorageNode::put(const PutRequest& request) {
  if (request.value.size() > config_.max_value_size)
    throw Error(Errc::ValueTooLarge, "value exceeds " + std::to_string(config_.max_value_size) + " bytes");
  auto state = ledger_.snapshot();
  const auto* stream = state->find(request.stream_id);
  if (!stream) throw Error(Errc::UnknownStream, "stream is not registered at the confirmed height");
  if (crypto::identity_of(request.writer) != stream->owner_id || request.writer != stream->owner_key)
    throw Error(Errc::NotStreamOwner, "writer is not the registered owner");
  if (!crypto::verify_signature(request.writer, put_signing_digest(request.key, request.stream_id, request.value),
                                request.signature))
    throw Error(Errc::BadSignature, "put signature does not verify");
  check_object(request, *stream);

  std::lock_guard lock(put_mu_);
  if (backend_.put_if_absent(request.key, request.value)) return;
  auto existing = backend_.get(request.key);
  if (!existing || *existing != request.value) throw Error(Errc::KeyExists, "key already holds a different value");
}

Bytes StorageNode::get(const GetRequest& request) {
  AccessDecision d;
  d.requester_id = crypto::identity_of(request.requester);
  d.stream_id = request.stream_id;
  d.key = request.key;
  auto reject = [&](Errc code, std::string decision, const std::string& message) -> Bytes {
    d.decision = std::move(decision);
    d.error = code;
    log(d);
    throw Error(code, message);
  };

  if (config_.enforcement == EnforcementMode::None) {
    d.decision = "unchecked";
    auto value = backend_.get(request.key);
    if (!value) return reject(Errc::NotFound, "unchecked", "no value under key");
    log(d);
    return *value;
  }

  try {
    consume_challenge(request.challenge);
  } catch (const Error& e) {
    return reject(e.code(), "rejected", e.what());
  }
  if (!crypto::verify_signature(request.requester,
                                get_signing_digest(request.challenge, request.requester, request.key,
                                                   request.stream_id),
                                request.signature))
    return reject(Errc::BadSignature, "rejected", "challenge signature does not verify");

  ledger::Permission permission = ledger::Permission::Granted;
  if (config_.enforcement == EnforcementMode::Full) {
    auto state = ledger_.snapshot();
    d.height = state->height;
    if (!state->find(request.stream_id)) return reject(Errc::PermissionDenied, "denied", "stream is not registered");
    permission = ledger::query_permission(*state, request.stream_id, d.requester_id);
    if (permission == ledger::Permission::Denied)
      return reject(Errc::PermissionDenied, "denied", "requester holds no grant on this stream");
  }
  d.decision = config_.enforcement == EnforcementMode::Full ? ledger::permission_name(permission) : "unchecked";

  auto value = backend_.get(request.key);
  if (!value) return reject(Errc::NotFound, d.decision, "no value under key");

  // The value must belong to the stream the permission was checked for, and
  // token shares are readable by their grantee only.
  ObjectInfo info;
  try {
    info = peek_object(*value);
  } catch (const Error&) {
    return reject(Errc::PermissionDenied, "denied", "stored value is not a stream object");
  }
  if (info.stream_id != request.stream_id)
    return reject(Errc::PermissionDenied, "denied", "key belongs to another stream");
  if (info.grantee && permission != ledger::Permission::Owner && *info.grantee != d.requester_id)
    return reject(Errc::PermissionDenied, "denied", "key material is addressed to another grantee");
  log(d);
  return *value;
}

void StorageNode::log(AccessDecision decision) {
  std::lock_guard lock(log_mu_);
  decisions_.push_back(std::move(decision));
}

std::vector<AccessDecision> StorageNode::decisions() const {
  std::lock_guard lock(log_mu_);
  return decisions_;
}

std::size_t StorageNode::decision_count() const {
  std::lock_guard lock(log_mu_);
  return decisions_.size();
}

void StorageNode::clear_decisions() {
  std::lock_guard lock(log_mu_);
  decisions_.clear();
}

}  // namespace sv::storage
