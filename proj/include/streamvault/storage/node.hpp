#pragma once

#include <cstdint>
#include <functional>
#include <mutex>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamvault/common/bytes.hpp"
#include "streamvault/common/error.hpp"
#include "streamvault/crypto/signature.hpp"
#include "streamvault/ledger/ledger.hpp"
#include "streamvault/storage/backend.hpp"

namespace sv::storage {

inline constexpr std::size_t kDefaultMaxValueSize = std::size_t{4} << 20;

/// Fresh single-use nonce a reader must sign to prove key possession.
struct Challenge {
  Digest256 node_id{};
  FixedBytes<16> nonce{};
  std::int64_t issued_ms = 0;
};

struct PutRequest {
  Digest256 key{};
  Digest256 stream_id{};
  crypto::PublicKey writer{};
  crypto::Signature signature{};
  Bytes value;
};

struct GetRequest {
  Digest256 key{};
  Digest256 stream_id{};
  crypto::PublicKey requester{};
  Challenge challenge;
  crypto::Signature signature{};
};

/// sha256(0x22 || key || stream_id || sha256(value))
Digest256 put_signing_digest(const Digest256& key, const Digest256& stream_id, ByteView value);
/// sha256(0x24 || node_id || nonce || issued_ms || requester pk || key || stream_id)
Digest256 get_signing_digest(const Challenge& challenge, const crypto::PublicKey& requester, const Digest256& key,
                             const Digest256& stream_id);

PutRequest make_put(const Digest256& key, const Digest256& stream_id, Bytes value, const crypto::SigningKey& writer);
GetRequest make_get(const Challenge& challenge, const Digest256& key, const Digest256& stream_id,
                    const crypto::SigningKey& requester);

/// What readers and writers talk to: a local node or a remote one.
class StorageService {
 public:
  virtual ~StorageService() = default;
  virtual Challenge challenge() = 0;
  /// Throws NotStreamOwner, KeyExists, ValueTooLarge, UnknownStream.
  virtual void put(const PutRequest& request) = 0;
  /// Throws PermissionDenied, NotFound, StaleChallenge.
  virtual Bytes get(const GetRequest& request) = 0;
};

/// challenge + sign + get in one call.
Bytes authenticated_get(StorageService& service, const Digest256& key, const Digest256& stream_id,
                        const crypto::SigningKey& requester);

enum class EnforcementMode {
  Full,              // authenticate and consult the ledger
  AuthenticateOnly,  // authenticate, skip the ledger (overhead baseline)
  None,              // a misbehaving node that serves anything to anyone
};

struct NodeConfig {
  Digest256 node_id{};
  std::size_t max_value_size = kDefaultMaxValueSize;
  std::int64_t challenge_validity_ms = 60'000;
  EnforcementMode enforcement = EnforcementMode::Full;
};

struct AccessDecision {
  Digest256 requester_id{};
  Digest256 stream_id{};
  Digest256 key{};
  std::string decision;  // owner | granted | denied | unchecked | rejected
  std::uint64_t height = 0;
  Errc error{};  // zero when the value was returned
};

/// A storage node: append-only store whose reads are gated by the ledger.
/// Thread-safe; puts are serialized, gets run concurrently.
class StorageNode final : public StorageService {
 public:
  using Clock = std::function<std::int64_t()>;

  StorageNode(NodeConfig config, StorageBackend& backend, ledger::Ledger& ledger, Clock clock = {});

  Challenge challenge() override;
  void put(const PutRequest& request) override;
  Bytes get(const GetRequest& request) override;

  std::vector<AccessDecision> decisions() const;
  std::size_t decision_count() const;
  void clear_decisions();
  const NodeConfig& config() const { return config_; }
  void set_enforcement(EnforcementMode mode) { config_.enforcement = mode; }

 private:
  void check_object(const PutRequest& request, const ledger::StreamState& stream) const;
  void consume_challenge(const Challenge& challenge);
  void log(AccessDecision decision);

  NodeConfig config_;
  StorageBackend& backend_;
  ledger::Ledger& ledger_;
  Clock clock_;

  std::mutex put_mu_;
  std::mutex challenge_mu_;
  std::unordered_map<std::string, std::int64_t> outstanding_;
  mutable std::mutex log_mu_;
  std::vector<AccessDecision> decisions_;
};

}  // namespace sv::storage
