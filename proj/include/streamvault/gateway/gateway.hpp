#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "streamvault/common/random.hpp"
#include "streamvault/crypto/key_distribution.hpp"
#include "streamvault/gateway/fifo_cache.hpp"
#include "streamvault/gateway/reader.hpp"
#include "streamvault/ledger/ledger.hpp"
#include "streamvault/storage/node.hpp"
#include "streamvault/stream/chunk.hpp"

namespace sv::gateway {

struct StreamConfig {
  std::string label;
  std::int64_t t0 = 0;
  std::int64_t delta = 3'600'000;
  std::uint32_t checkpoint_interval = 10;
  std::uint32_t max_epochs = crypto::KeyRegressionChain::kDefaultMaxEpochs;
  std::size_t cache_capacity = 64;
  std::uint32_t lateness_windows = 2;
  std::uint32_t rotate_every_chunks = 0;  // 0: epochs advance on revocation only
  stream::BuildOptions build;
};

enum class ChunkSource { Cache, Storage };

struct PlannedChunk {
  std::uint64_t chunk_index = 0;
  ChunkSource source = ChunkSource::Cache;
};

struct QueryPlan {
  Digest256 stream_id{};
  std::int64_t ta = 0;
  std::int64_t tb = 0;
  std::vector<PlannedChunk> chunks;  // only windows that produced a chunk
};

struct QueryResult {
  QueryPlan plan;
  std::vector<stream::DataRecord> records;
};

/// Owner-side ingestion pipeline. Records are buffered per Δ window; a
/// window seals once the watermark (highest timestamp seen) has moved
/// lateness_windows·Δ past its end, or on flush. Sealed chunks enter the
/// FIFO cache and are pushed to storage; storage only accepts them once the
/// stream's registration is confirmed, so anything rejected as UnknownStream
/// stays queued for the next pump().
class Gateway {
 public:
  Gateway(crypto::SigningKey owner, storage::StorageService& storage, ledger::Ledger& ledger, RandomSource& rng);
  ~Gateway();
  Gateway(const Gateway&) = delete;
  Gateway& operator=(const Gateway&) = delete;

  /// Submits the Register transaction. Returns the stream id.
  Digest256 register_stream(const StreamConfig& config);

  /// Throws UnknownStream, LateRecord, InvalidArgument (duplicate timestamp
  /// or oversized value), BeforeStreamStart.
  void ingest(const Digest256& stream_id, stream::DataRecord record);
  /// Seals every open window. Returns the number of chunks sealed.
  std::size_t flush(const Digest256& stream_id);
  /// Retries pending storage pushes and checkpoints for every stream.
  /// Returns the number of objects newly acknowledged by storage.
  std::size_t pump();
  /// Submits a Checkpoint once checkpoint_interval chunks are unanchored.
  /// LedgerUnavailable leaves it pending for the next tick.
  std::optional<ledger::LedgerTx> checkpoint_tick(const Digest256& stream_id);

  /// Stores a token share for the service and submits the Grant.
  Digest256 grant(const Digest256& stream_id, const crypto::ServiceKey& service);
  /// Advances the epoch without changing membership.
  void rotate(const Digest256& stream_id);
  /// Submits the Revoke, advances the epoch and re-keys remaining services.
  Digest256 revoke(const Digest256& stream_id, const Digest256& service_id);

  QueryPlan plan(const Digest256& stream_id, std::int64_t ta, std::int64_t tb) const;
  /// Cache hits are served without storage traffic; misses are fetched with
  /// the reader's own credentials. Throws PermissionDenied unless the
  /// reader is owner or currently granted on the ledger.
  QueryResult query(const Digest256& stream_id, std::int64_t ta, std::int64_t tb, Reader& reader);
  /// Owner query with the gateway's own keys.
  QueryResult query(const Digest256& stream_id, std::int64_t ta, std::int64_t tb);

  const stream::StreamMeta& meta(const Digest256& stream_id) const;
  const StreamConfig& config(const Digest256& stream_id) const;
  const FifoCache& cache(const Digest256& stream_id) const;
  const crypto::KeyDistributor& keys(const Digest256& stream_id) const;
  const std::vector<std::uint64_t>& sealed_indices(const Digest256& stream_id) const;
  std::uint64_t unanchored(const Digest256& stream_id) const;
  std::size_t pending_pushes(const Digest256& stream_id) const;
  std::vector<Digest256> streams() const;
  const crypto::SigningKey& owner() const { return owner_; }
  Reader owner_reader(const Digest256& stream_id) const;

  /// Full gateway state (secrets included) for the CLI's data directory.
  std::string export_state() const;
  void import_state(const std::string& json);

 private:
  struct Runtime;
  Runtime& runtime(const Digest256& stream_id);
  const Runtime& runtime(const Digest256& stream_id) const;
  void seal_window(Runtime& rt, std::uint64_t window);
  void seal_ready(Runtime& rt);
  void queue_publication(Runtime& rt);
  void queue_shares(Runtime& rt, const std::vector<crypto::IssuedShare>& shares);
  std::size_t push_pending(Runtime& rt);

  crypto::SigningKey owner_;
  storage::StorageService& storage_;
  ledger::Ledger& ledger_;
  RandomSource& rng_;
  std::map<Digest256, std::unique_ptr<Runtime>> streams_;
};

}  // namespace sv::gateway
