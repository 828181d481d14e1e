#pragma once

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "streamvault/common/bytes.hpp"
#include "streamvault/dht/latency.hpp"
#include "streamvault/dht/node_id.hpp"
#include "streamvault/dht/routing_table.hpp"

namespace sv::dht {

struct DhtParams {
  std::size_t k_bucket = 20;
  std::size_t alpha = 3;
  std::size_t replicas = 3;
  double sloppy_ttl_ms = 600'000;
  bool sloppy_caching = true;
  double rpc_timeout_ms = 1000;
};

using NodeHandle = std::uint32_t;

enum class TraceAction : std::uint8_t {
  Join,
  Leave,
  Fail,
  FindNode,
  FindValue,
  Store,
  Timeout,
  CacheStore,
  CacheHit,
};

const char* trace_action_name(TraceAction action);

struct TraceEvent {
  double time_ms = 0;
  NodeHandle node = 0;  // the node acting or being contacted
  NodeHandle peer = 0;  // the node that initiated the exchange
  TraceAction action = TraceAction::FindNode;
  NodeId key;
  double latency_ms = 0;
};

struct LookupResult {
  std::vector<NodeHandle> closest;  // ascending XOR distance, alive only
  std::size_t hops = 0;             // sequential request rounds
  std::size_t messages = 0;
  double latency_ms = 0;
};

struct PutResult {
  std::vector<NodeHandle> replicas;
  std::size_t hops = 0;
  std::size_t messages = 0;
  double latency_ms = 0;
};

struct GetResult {
  std::shared_ptr<const Bytes> value;
  NodeHandle served_by = 0;
  bool from_cache = false;    // served by a locality replica
  bool region_hit = false;    // found without leaving the requester's region
  bool cache_placed = false;  // this get placed a locality replica
  std::size_t hops = 0;
  std::size_t messages = 0;
  double latency_ms = 0;
};

/// Single-process Kademlia overlay driven by a seeded RNG and a simulated
/// clock. Lookups proceed in synchronous rounds of alpha parallel requests;
/// a round costs the slowest round trip in it (or rpc_timeout_ms for a
/// dead peer). Each node keeps a second, region-restricted table used for
/// sloppy locality replicas.
class Overlay {
 public:
  Overlay(DhtParams params, LatencyModel latency, std::uint64_t seed);

  NodeHandle join(std::uint32_t region);
  NodeHandle join_with_id(const NodeId& id, std::uint32_t region);
  /// Abrupt failure: the node's data becomes unreachable.
  void fail(NodeHandle node);
  /// Graceful departure: the node's keys are re-replicated first.
  void leave(NodeHandle node);
  /// Re-stores every key still held by a live node on its current r closest
  /// live nodes. Returns the number of store messages sent.
  std::size_t republish();

  /// Throws PartitionedOverlay when no live node exists or `from` is dead.
  PutResult put(const NodeId& key, Bytes value, NodeHandle from);
  /// Throws NotFound, PartitionedOverlay.
  GetResult get(const NodeId& key, NodeHandle requester);
  LookupResult find_closest(const NodeId& target, NodeHandle from);

  /// Exhaustive XOR sort over live nodes. Test oracle and placement check.
  std::vector<NodeHandle> brute_force_closest(const NodeId& target, std::size_t n) const;
  /// Live nodes holding a primary copy of key.
  std::vector<NodeHandle> holders(const NodeId& key) const;
  std::size_t primary_count(NodeHandle node) const { return nodes_[node].store.size(); }
  bool has_cached(NodeHandle node, const NodeId& key) const;
  std::vector<NodeId> stored_keys() const;

  std::size_t size() const { return nodes_.size(); }
  std::size_t alive_count() const;
  bool alive(NodeHandle node) const { return nodes_[node].alive; }
  std::uint32_t region(NodeHandle node) const { return nodes_[node].region; }
  const NodeId& id(NodeHandle node) const { return nodes_[node].id; }
  const RoutingTable& table(NodeHandle node) const { return nodes_[node].table; }
  std::optional<NodeHandle> random_alive_node(std::optional<std::uint32_t> region = std::nullopt);

  double now_ms() const { return now_ms_; }
  void advance_time(double ms) { now_ms_ += ms; }

  void set_tracing(bool enabled) { tracing_ = enabled; }
  const std::vector<TraceEvent>& trace() const { return trace_; }
  void clear_trace() { trace_.clear(); }
  std::string trace_csv() const;

  const DhtParams& params() const { return params_; }
  void set_sloppy_caching(bool on) { params_.sloppy_caching = on; }
  const LatencyModel& latency() const { return latency_; }
  std::mt19937_64& rng() { return rng_; }

 private:
  struct Cached {
    std::shared_ptr<const Bytes> value;
    double expires_ms = 0;
  };
  struct SimNode {
    NodeId id;
    std::uint32_t region = 0;
    bool alive = true;
    RoutingTable table;
    RoutingTable region_table;
    std::unordered_map<NodeId, std::shared_ptr<const Bytes>, NodeIdHash> store;
    std::unordered_map<NodeId, Cached, NodeIdHash> cache;
  };
  struct LookupOptions {
    bool find_value = false;
    bool region_only = false;
  };
  struct LookupOutcome {
    LookupResult result;
    std::shared_ptr<const Bytes> value;
    NodeHandle holder = 0;
    bool from_cache = false;
  };

  LookupOutcome lookup(const NodeId& target, NodeHandle from, LookupOptions options);
  std::shared_ptr<const Bytes> local_value(SimNode& node, const NodeId& key, bool& from_cache);
  void store_on(NodeHandle node, const NodeId& key, const std::shared_ptr<const Bytes>& value,
                NodeHandle from, double latency);
  void replicate(const NodeId& key, const std::shared_ptr<const Bytes>& value, NodeHandle from);
  void handoff_to(NodeHandle newcomer, const std::vector<NodeHandle>& neighbours);
  void require_alive(NodeHandle node) const;
  void record(TraceAction action, NodeHandle node, NodeHandle peer, const NodeId& key, double latency);
  NodeHandle handle_of(const NodeId& id) const { return index_.at(id); }

  DhtParams params_;
  LatencyModel latency_;
  std::mt19937_64 rng_;
  std::vector<SimNode> nodes_;
  std::unordered_map<NodeId, NodeHandle, NodeIdHash> index_;
  std::function<bool(const NodeId&)> is_alive_;
  double now_ms_ = 0;
  bool tracing_ = false;
  std::vector<TraceEvent> trace_;
};

}  // namespace sv::dht
