#include "streamvault/gateway/gateway.hpp"

#include <algorithm>
#include <deque>

#include <json.hpp>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/storage/objects.hpp"

namespace sv::gateway {

using nlohmann::json;

struct Gateway::Runtime {
  StreamConfig config;
  stream::StreamMeta meta;
  crypto::KeyDistributor keys;
  FifoCache cache;

  std::map<std::uint64_t, std::map<std::int64_t, Bytes>> open;  // window -> records by time
  std::optional<std::int64_t> watermark;
  std::optional<std::uint64_t> last_sealed;
  Digest256 last_digest{};
  std::vector<std::uint64_t> sealed;
  std::uint64_t since_anchor = 0;
  std::uint64_t emitted = 0;

  std::deque<std::pair<Digest256, Bytes>> pending_objects;  // key material, pushed before chunks
  std::optional<ledger::CheckpointPayload> pending_checkpoint;

  Runtime(StreamConfig c, stream::StreamMeta m, crypto::KeyDistributor k)
      : config(std::move(c)), meta(m), keys(std::move(k)), cache(config.cache_capacity) {}
};

Gateway::Gateway(crypto::SigningKey owner, storage::StorageService& storage, ledger::Ledger& ledger, RandomSource& rng)
    : owner_(std::move(owner)), storage_(storage), ledger_(ledger), rng_(rng) {}

Gateway::~Gateway() = default;

Gateway::Runtime& Gateway::runtime(const Digest256& stream_id) {
  auto it = streams_.find(stream_id);
  if (it == streams_.end()) throw Error(Errc::UnknownStream, "stream is not managed by this gateway");
  return *it->second;
}

const Gateway::Runtime& Gateway::runtime(const Digest256& stream_id) const {
  auto it = streams_.find(stream_id);
  if (it == streams_.end()) throw Error(Errc::UnknownStream, "stream is not managed by this gateway");
  return *it->second;
}

Digest256 Gateway::register_stream(const StreamConfig& config) {
  if (config.delta <= 0 || config.checkpoint_interval == 0 || config.max_epochs == 0 || config.cache_capacity == 0)
    throw Error(Errc::InvalidArgument, "delta, checkpoint interval, max epochs and cache capacity must be positive");
  ledger::RegisterPayload reg;
  reg.t0 = config.t0;
  reg.delta = config.delta;
  reg.checkpoint_interval = config.checkpoint_interval;
  reg.max_epochs = config.max_epochs;
  reg.label = crypto::sha256(as_bytes(config.label));
  auto tx = ledger::make_register(owner_, reg);
  if (streams_.count(tx.stream_id)) throw Error(Errc::InvalidArgument, "stream already registered");
  ledger_.submit(tx);

  stream::StreamMeta meta;
  meta.stream_id = tx.stream_id;
  meta.owner_id = owner_.id();
  meta.t0 = config.t0;
  meta.delta = config.delta;
  meta.checkpoint_interval = config.checkpoint_interval;
  crypto::KeyDistributor keys(crypto::KeyRegressionChain(config.max_epochs, rng_.bytes<32>()), rng_);
  auto rt = std::make_unique<Runtime>(config, meta, std::move(keys));
  queue_publication(*rt);
  streams_.emplace(tx.stream_id, std::move(rt));
  return tx.stream_id;
}

void Gateway::queue_publication(Runtime& rt) {
  storage::KeyEnvelope env{rt.meta.stream_id, rt.keys.publication()};
  rt.pending_objects.emplace_back(env.storage_key(), env.serialize());
}

void Gateway::queue_shares(Runtime& rt, const std::vector<crypto::IssuedShare>& shares) {
  for (const auto& s : shares) {
    storage::TokenShareObject obj{rt.meta.stream_id, s.service_id, s.onetime_epoch, s.share};
    rt.pending_objects.emplace_back(obj.storage_key(), obj.serialize());
  }
}

void Gateway::ingest(const Digest256& stream_id, stream::DataRecord record) {
  auto& rt = runtime(stream_id);
  if (record.value.size() > stream::kMaxValueSize) throw Error(Errc::InvalidArgument, "record value too large");
  const auto window = stream::chunk_index_for(record.timestamp, rt.meta);
  const auto bound = static_cast<std::int64_t>(rt.config.lateness_windows) * rt.meta.delta;
  if ((rt.last_sealed && window <= *rt.last_sealed) || (rt.watermark && record.timestamp < *rt.watermark - bound))
    throw Error(Errc::LateRecord, "record at " + std::to_string(record.timestamp) + " is behind the watermark");
  auto& slot = rt.open[window];
  if (!slot.emplace(record.timestamp, std::move(record.value)).second)
    throw Error(Errc::InvalidArgument, "duplicate timestamp " + std::to_string(record.timestamp));
  if (!rt.watermark || record.timestamp > *rt.watermark) rt.watermark = record.timestamp;
  seal_ready(rt);
}

void Gateway::seal_ready(Runtime& rt) {
  const auto cutoff = *rt.watermark - static_cast<std::int64_t>(rt.config.lateness_windows) * rt.meta.delta;
  while (!rt.open.empty()) {
    const auto window = rt.open.begin()->first;
    if (stream::chunk_start(rt.meta, window + 1) > cutoff) break;
    seal_window(rt, window);
  }
}

std::size_t Gateway::flush(const Digest256& stream_id) {
  auto& rt = runtime(stream_id);
  std::size_t n = 0;
  while (!rt.open.empty()) {
    seal_window(rt, rt.open.begin()->first);
    ++n;
  }
  return n;
}

void Gateway::seal_window(Runtime& rt, std::uint64_t window) {
  auto node = rt.open.extract(window);
  std::vector<stream::DataRecord> records;
  records.reserve(node.mapped().size());
  for (auto& [ts, value] : node.mapped()) records.push_back({ts, std::move(value)});

  if (rt.config.rotate_every_chunks > 0 && rt.emitted > 0 && rt.emitted % rt.config.rotate_every_chunks == 0) {
    rt.keys.rotate_and_share();
    queue_publication(rt);
  }
  rt.meta.epoch = rt.keys.epoch();
  auto chunk = stream::build_chunk(rt.meta, records, rt.last_digest, rt.keys.current_key(), owner_, rt.config.build);
  rt.last_digest = chunk.digest();
  rt.last_sealed = window;
  rt.sealed.push_back(window);
  ++rt.emitted;
  ++rt.since_anchor;
  rt.cache.push(std::move(chunk));
  push_pending(rt);
  checkpoint_tick(rt.meta.stream_id);
}

std::size_t Gateway::push_pending(Runtime& rt) {
  std::size_t acked = 0;
  try {
    while (!rt.pending_objects.empty()) {
      auto& [key, value] = rt.pending_objects.front();
      storage_.put(storage::make_put(key, rt.meta.stream_id, value, owner_));
      rt.pending_objects.pop_front();
      ++acked;
    }
    for (const auto* chunk : rt.cache.unacked()) {
      const auto index = chunk->header.chunk_index;
      storage_.put(storage::make_put(stream::chunk_key(rt.meta, index), rt.meta.stream_id, chunk->serialize(), owner_));
      rt.cache.mark_acked(index);
      ++acked;
    }
  } catch (const Error& e) {
    // Registration not yet confirmed or storage down: keep everything queued.
    if (e.code() != Errc::UnknownStream && e.code() != Errc::StorageUnavailable) throw;
  }
  return acked;
}

std::size_t Gateway::pump() {
  std::size_t acked = 0;
  for (auto& [id, rt] : streams_) {
    acked += push_pending(*rt);
    checkpoint_tick(id);
  }
  return acked;
}

std::optional<ledger::LedgerTx> Gateway::checkpoint_tick(const Digest256& stream_id) {
  auto& rt = runtime(stream_id);
  if (!rt.pending_checkpoint && rt.since_anchor >= rt.config.checkpoint_interval) {
    rt.pending_checkpoint = ledger::CheckpointPayload{*rt.last_sealed, rt.last_digest};
    rt.since_anchor = 0;
  }
  if (!rt.pending_checkpoint) return std::nullopt;
  auto tx = ledger::make_checkpoint(owner_, stream_id, *rt.pending_checkpoint);
  try {
    ledger_.submit(tx);
  } catch (const Error& e) {
    if (e.code() == Errc::LedgerUnavailable) return std::nullopt;
    throw;
  }
  rt.pending_checkpoint.reset();
  return tx;
}

Digest256 Gateway::grant(const Digest256& stream_id, const crypto::ServiceKey& service) {
  auto& rt = runtime(stream_id);
  if (service.service_id == owner_.id()) throw Error(Errc::InvalidArgument, "owner cannot be a grantee");
  if (rt.keys.grants().count(service.service_id)) throw Error(Errc::InvalidArgument, "service is already granted");
  // Work on a copy so a ledger failure leaves the key state untouched.
  auto keys = rt.keys;
  auto issued = keys.grant(service);
  storage::TokenShareObject obj{stream_id, issued.service_id, issued.onetime_epoch, issued.share};
  auto tx = ledger::make_grant(owner_, stream_id, {service.service_id, crypto::sha256(obj.serialize())});
  auto digest = ledger_.submit(tx);
  rt.keys = std::move(keys);
  queue_shares(rt, {issued});
  push_pending(rt);
  return digest;
}

void Gateway::rotate(const Digest256& stream_id) {
  auto& rt = runtime(stream_id);
  rt.keys.rotate_and_share();
  queue_publication(rt);
  push_pending(rt);
}

Digest256 Gateway::revoke(const Digest256& stream_id, const Digest256& service_id) {
  auto& rt = runtime(stream_id);
  if (!rt.keys.grants().count(service_id)) throw Error(Errc::NotCurrentlyGranted, "service holds no grant");
  auto keys = rt.keys;
  auto result = keys.revoke(service_id);
  auto tx = ledger::make_revoke(owner_, stream_id, {service_id, result.publication.epoch});
  auto digest = ledger_.submit(tx);
  rt.keys = std::move(keys);
  queue_publication(rt);
  queue_shares(rt, result.shares);
  push_pending(rt);
  return digest;
}

QueryPlan Gateway::plan(const Digest256& stream_id, std::int64_t ta, std::int64_t tb) const {
  const auto& rt = runtime(stream_id);
  QueryPlan p{stream_id, ta, tb, {}};
  if (tb <= ta) return p;
  for (auto index : rt.sealed) {
    const auto start = stream::chunk_start(rt.meta, index);
    if (start >= tb || start + rt.meta.delta <= ta) continue;
    p.chunks.push_back({index, rt.cache.find(index) ? ChunkSource::Cache : ChunkSource::Storage});
  }
  return p;
}

QueryResult Gateway::query(const Digest256& stream_id, std::int64_t ta, std::int64_t tb, Reader& reader) {
  const auto& rt = runtime(stream_id);
  if (reader.id() != owner_.id()) {
    auto state = ledger_.snapshot();
    if (!state->find(stream_id) ||
        ledger::query_permission(*state, stream_id, reader.id()) == ledger::Permission::Denied)
      throw Error(Errc::PermissionDenied, "reader holds no grant on this stream");
  }
  QueryResult out{plan(stream_id, ta, tb), {}};
  for (const auto& planned : out.plan.chunks) {
    stream::SealedChunk chunk;
    if (planned.source == ChunkSource::Cache) {
      chunk = *rt.cache.find(planned.chunk_index);
    } else {
      chunk = stream::SealedChunk::parse(storage::authenticated_get(
          storage_, stream::chunk_key(rt.meta, planned.chunk_index), stream_id, reader.identity()));
    }
    for (auto& r : reader.open(chunk, owner_.public_key(), storage_))
      if (r.timestamp >= ta && r.timestamp < tb) out.records.push_back(std::move(r));
  }
  return out;
}

QueryResult Gateway::query(const Digest256& stream_id, std::int64_t ta, std::int64_t tb) {
  auto reader = owner_reader(stream_id);
  return query(stream_id, ta, tb, reader);
}

Reader Gateway::owner_reader(const Digest256& stream_id) const {
  return Reader::for_owner(owner_, runtime(stream_id).keys.chain());
}

const stream::StreamMeta& Gateway::meta(const Digest256& stream_id) const { return runtime(stream_id).meta; }
const StreamConfig& Gateway::config(const Digest256& stream_id) const { return runtime(stream_id).config; }
const FifoCache& Gateway::cache(const Digest256& stream_id) const { return runtime(stream_id).cache; }
const crypto::KeyDistributor& Gateway::keys(const Digest256& stream_id) const { return runtime(stream_id).keys; }
const std::vector<std::uint64_t>& Gateway::sealed_indices(const Digest256& stream_id) const {
  return runtime(stream_id).sealed;
}
std::uint64_t Gateway::unanchored(const Digest256& stream_id) const { return runtime(stream_id).since_anchor; }

std::size_t Gateway::pending_pushes(const Digest256& stream_id) const {
  const auto& rt = runtime(stream_id);
  return rt.pending_objects.size() + rt.cache.unacked().size();
}

std::vector<Digest256> Gateway::streams() const {
  std::vector<Digest256> out;
  for (const auto& [id, rt] : streams_) out.push_back(id);
  return out;
}

std::string Gateway::export_state() const {
  json doc = json::object();
  doc["owner_id"] = to_hex(owner_.id());
  json list = json::array();
  for (const auto& [id, rtp] : streams_) {
    const auto& rt = *rtp;
    json s;
    s["stream_id"] = to_hex(id);
    s["config"] = {{"label", rt.config.label},
                   {"t0", rt.config.t0},
                   {"delta", rt.config.delta},
                   {"checkpoint_interval", rt.config.checkpoint_interval},
                   {"max_epochs", rt.config.max_epochs},
                   {"cache_capacity", rt.config.cache_capacity},
                   {"lateness_windows", rt.config.lateness_windows},
                   {"rotate_every_chunks", rt.config.rotate_every_chunks},
                   {"codec", static_cast<int>(rt.config.build.codec)},
                   {"max_records", rt.config.build.max_records}};
    s["chain_seed"] = to_hex(rt.keys.chain().seed());
    s["epoch"] = rt.keys.epoch();
    s["onetime_secret"] = to_hex(rt.keys.onetime().secret);
    s["onetime_public"] = to_hex(rt.keys.onetime().public_key);
    s["onetime_epoch"] = rt.keys.onetime_epoch();
    json grants = json::array();
    for (const auto& [sid, sk] : rt.keys.grants())
      grants.push_back({{"service_id", to_hex(sid)}, {"pre_key", to_hex(sk.pre_key)}});
    s["grants"] = grants;
    json open = json::array();
    for (const auto& [w, recs] : rt.open)
      for (const auto& [ts, v] : recs) open.push_back({ts, to_hex(v)});
    s["open_records"] = open;
    s["watermark"] = rt.watermark ? json(*rt.watermark) : json(nullptr);
    s["last_sealed"] = rt.last_sealed ? json(*rt.last_sealed) : json(nullptr);
    s["last_digest"] = to_hex(rt.last_digest);
    s["sealed"] = rt.sealed;
    s["since_anchor"] = rt.since_anchor;
    s["emitted"] = rt.emitted;
    json cache = json::array();
    const auto unacked = rt.cache.unacked();
    for (auto index : rt.cache.indices()) {
      const auto* c = rt.cache.find(index);
      const bool acked = std::find(unacked.begin(), unacked.end(), c) == unacked.end();
      cache.push_back({{"chunk", to_hex(c->serialize())}, {"acked", acked}});
    }
    s["cache"] = cache;
    json pending = json::array();
    for (const auto& [key, value] : rt.pending_objects) pending.push_back({to_hex(key), to_hex(value)});
    s["pending_objects"] = pending;
    if (rt.pending_checkpoint)
      s["pending_checkpoint"] = {rt.pending_checkpoint->chunk_index, to_hex(rt.pending_checkpoint->chunk_digest)};
    list.push_back(s);
  }
  doc["streams"] = list;
  return doc.dump(2);
}

void Gateway::import_state(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("gateway state: ") + e.what());
  }
  if (doc.at("owner_id").get<std::string>() != to_hex(owner_.id()))
    throw Error(Errc::InvalidArgument, "gateway state belongs to another owner");
  std::map<Digest256, std::unique_ptr<Runtime>> loaded;
  try {
    for (const auto& s : doc.at("streams")) {
      StreamConfig config;
      const auto& c = s.at("config");
      config.label = c.at("label").get<std::string>();
      config.t0 = c.at("t0").get<std::int64_t>();
      config.delta = c.at("delta").get<std::int64_t>();
      config.checkpoint_interval = c.at("checkpoint_interval").get<std::uint32_t>();
      config.max_epochs = c.at("max_epochs").get<std::uint32_t>();
      config.cache_capacity = c.at("cache_capacity").get<std::size_t>();
      config.lateness_windows = c.at("lateness_windows").get<std::uint32_t>();
      config.rotate_every_chunks = c.at("rotate_every_chunks").get<std::uint32_t>();
      config.build.codec = static_cast<stream::Codec>(c.at("codec").get<int>());
      config.build.max_records = c.at("max_records").get<std::size_t>();

      const auto id = fixed_from_hex<32>(s.at("stream_id").get<std::string>());
      stream::StreamMeta meta;
      meta.stream_id = id;
      meta.owner_id = owner_.id();
      meta.t0 = config.t0;
      meta.delta = config.delta;
      meta.checkpoint_interval = config.checkpoint_interval;
      meta.epoch = s.at("epoch").get<std::uint32_t>();

      crypto::PreKeyPair onetime{fixed_from_hex<32>(s.at("onetime_secret").get<std::string>()),
                                 fixed_from_hex<32>(s.at("onetime_public").get<std::string>())};
      std::map<Digest256, crypto::ServiceKey> grants;
      for (const auto& g : s.at("grants")) {
        auto sid = fixed_from_hex<32>(g.at("service_id").get<std::string>());
        grants[sid] = {sid, fixed_from_hex<32>(g.at("pre_key").get<std::string>())};
      }
      crypto::KeyDistributor keys(
          crypto::KeyRegressionChain(config.max_epochs, fixed_from_hex<32>(s.at("chain_seed").get<std::string>())),
          meta.epoch, onetime, s.at("onetime_epoch").get<std::uint32_t>(), grants, rng_);
      auto rt = std::make_unique<Runtime>(config, meta, std::move(keys));
      for (const auto& r : s.at("open_records")) {
        const auto ts = r.at(0).get<std::int64_t>();
        rt->open[stream::chunk_index_for(ts, meta)].emplace(ts, from_hex(r.at(1).get<std::string>()));
      }
      if (!s.at("watermark").is_null()) rt->watermark = s.at("watermark").get<std::int64_t>();
      if (!s.at("last_sealed").is_null()) rt->last_sealed = s.at("last_sealed").get<std::uint64_t>();
      rt->last_digest = fixed_from_hex<32>(s.at("last_digest").get<std::string>());
      rt->sealed = s.at("sealed").get<std::vector<std::uint64_t>>();
      rt->since_anchor = s.at("since_anchor").get<std::uint64_t>();
      rt->emitted = s.at("emitted").get<std::uint64_t>();
      for (const auto& e : s.at("cache")) {
        auto chunk = stream::SealedChunk::parse(from_hex(e.at("chunk").get<std::string>()));
        const auto index = chunk.header.chunk_index;
        rt->cache.push(std::move(chunk));
        if (e.at("acked").get<bool>()) rt->cache.mark_acked(index);
      }
      for (const auto& p : s.at("pending_objects"))
        rt->pending_objects.emplace_back(fixed_from_hex<32>(p.at(0).get<std::string>()),
                                         from_hex(p.at(1).get<std::string>()));
      if (s.contains("pending_checkpoint"))
        rt->pending_checkpoint = ledger::CheckpointPayload{
            s["pending_checkpoint"].at(0).get<std::uint64_t>(),
            fixed_from_hex<32>(s["pending_checkpoint"].at(1).get<std::string>())};
      loaded.emplace(id, std::move(rt));
    }
  } catch (const json::exception& e) {
    throw Error(Errc::Malformed, std::string("gateway state: ") + e.what());
  }
  streams_ = std::move(loaded);
}

}  // namespace sv::gateway
