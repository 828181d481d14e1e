#include "streamvault/dht/overlay.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <unordered_set>

#include "streamvault/common/error.hpp"

namespace sv::dht {

const char* trace_action_name(TraceAction action) {
  switch (action) {
    case TraceAction::Join: return "JOIN";
    case TraceAction::Leave: return "LEAVE";
    case TraceAction::Fail: return "FAIL";
    case TraceAction::FindNode: return "FIND_NODE";
    case TraceAction::FindValue: return "FIND_VALUE";
    case TraceAction::Store: return "STORE";
    case TraceAction::Timeout: return "TIMEOUT";
    case TraceAction::CacheStore: return "CACHE_STORE";
    case TraceAction::CacheHit: return "CACHE_HIT";
  }
  return "UNKNOWN";
}

Overlay::Overlay(DhtParams params, LatencyModel latency, std::uint64_t seed)
    : params_(params), latency_(std::move(latency)), rng_(seed) {
  latency_.validate();
  if (params_.alpha == 0 || params_.replicas == 0)
    throw Error(Errc::InvalidArgument, "alpha and replica count must be positive");
  is_alive_ = [this](const NodeId& id) { return nodes_[index_.at(id)].alive; };
}

void Overlay::record(TraceAction action, NodeHandle node, NodeHandle peer, const NodeId& key, double latency) {
  if (tracing_) trace_.push_back({now_ms_, node, peer, action, key, latency});
}

void Overlay::require_alive(NodeHandle node) const {
  if (node >= nodes_.size() || !nodes_[node].alive)
    throw Error(Errc::PartitionedOverlay, "node is not part of the live overlay");
}

std::size_t Overlay::alive_count() const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [](const SimNode& n) { return n.alive; }));
}

std::optional<NodeHandle> Overlay::random_alive_node(std::optional<std::uint32_t> region) {
  std::vector<NodeHandle> pool;
  for (NodeHandle h = 0; h < nodes_.size(); ++h)
    if (nodes_[h].alive && (!region || nodes_[h].region == *region)) pool.push_back(h);
  if (pool.empty()) return std::nullopt;
  return pool[std::uniform_int_distribution<std::size_t>(0, pool.size() - 1)(rng_)];
}

NodeHandle Overlay::join(std::uint32_t region) {
  NodeId id;
  do {
    id = NodeId::random(rng_);
  } while (index_.count(id));
  return join_with_id(id, region);
}

NodeHandle Overlay::join_with_id(const NodeId& id, std::uint32_t region) {
  if (region >= latency_.region_count()) throw Error(Errc::InvalidArgument, "region out of range");
  if (index_.count(id)) throw Error(Errc::InvalidArgument, "duplicate node id");

  auto global_bootstrap = random_alive_node();
  auto region_bootstrap = random_alive_node(region);

  const auto self = static_cast<NodeHandle>(nodes_.size());
  nodes_.push_back(SimNode{id, region, true, RoutingTable(id, params_.k_bucket),
                           RoutingTable(id, params_.k_bucket), {}, {}});
  index_.emplace(id, self);
  record(TraceAction::Join, self, self, id, 0);
  if (!global_bootstrap) return self;

  nodes_[self].table.observe(nodes_[*global_bootstrap].id, is_alive_);
  auto found = lookup(id, self, {}).result.closest;
  // Refresh every bucket farther away than the closest neighbour.
  int nearest_prefix = 0;
  for (auto h : found)
    if (h != self) {
      nearest_prefix = common_prefix_length(id, nodes_[h].id);
      break;
    }
  for (int b = 0; b < nearest_prefix; ++b) lookup(random_id_with_prefix(id, b, rng_), self, {});

  if (region_bootstrap) {
    nodes_[self].region_table.observe(nodes_[*region_bootstrap].id, is_alive_);
    auto regional = lookup(id, self, {false, true}).result.closest;
    int regional_prefix = 0;
    for (auto h : regional)
      if (h != self) {
        regional_prefix = common_prefix_length(id, nodes_[h].id);
        break;
      }
    for (int b = 0; b < regional_prefix; ++b) lookup(random_id_with_prefix(id, b, rng_), self, {false, true});
  }

  handoff_to(self, found);
  return self;
}

void Overlay::handoff_to(NodeHandle newcomer, const std::vector<NodeHandle>& neighbours) {
  const auto& new_id = nodes_[newcomer].id;
  for (auto h : neighbours) {
    if (h == newcomer || !nodes_[h].alive) continue;
    auto& n = nodes_[h];
    for (const auto& [key, value] : n.store) {
      if (nodes_[newcomer].store.count(key)) continue;
      // The neighbour's view of the r closest nodes to key, itself included.
      auto view = n.table.closest(key, params_.replicas);
      view.push_back(n.id);
      std::sort(view.begin(), view.end(),
                [&](const NodeId& a, const NodeId& b) { return closer(key, a, b); });
      if (view.size() > params_.replicas) view.resize(params_.replicas);
      if (std::find(view.begin(), view.end(), new_id) != view.end())
        store_on(newcomer, key, value, h, latency_.rtt(n.region, nodes_[newcomer].region));
    }
  }
}

void Overlay::fail(NodeHandle node) {
  require_alive(node);
  nodes_[node].alive = false;
  record(TraceAction::Fail, node, node, nodes_[node].id, 0);
}

void Overlay::leave(NodeHandle node) {
  require_alive(node);
  auto& n = nodes_[node];
  n.alive = false;
  record(TraceAction::Leave, node, node, n.id, 0);
  std::optional<NodeHandle> relay;
  for (const auto& id : n.table.closest(n.id, params_.k_bucket))
    if (nodes_[handle_of(id)].alive) {
      relay = handle_of(id);
      break;
    }
  if (!relay) relay = random_alive_node();
  if (!relay) return;
  for (const auto& [key, value] : n.store) replicate(key, value, *relay);
}

void Overlay::replicate(const NodeId& key, const std::shared_ptr<const Bytes>& value, NodeHandle from) {
  auto closest = lookup(key, from, {}).result.closest;
  if (closest.size() > params_.replicas) closest.resize(params_.replicas);
  for (auto h : closest)
    if (!nodes_[h].store.count(key)) store_on(h, key, value, from, latency_.rtt(nodes_[from].region, nodes_[h].region));
}

std::size_t Overlay::republish() {
  std::map<NodeId, std::pair<std::shared_ptr<const Bytes>, NodeHandle>> keys;
  for (NodeHandle h = 0; h < nodes_.size(); ++h) {
    if (!nodes_[h].alive) continue;
    for (const auto& [key, value] : nodes_[h].store) keys.try_emplace(key, value, h);
  }
  std::size_t stores = 0;
  for (const auto& [key, entry] : keys) {
    auto closest = lookup(key, entry.second, {}).result.closest;
    if (closest.size() > params_.replicas) closest.resize(params_.replicas);
    for (auto h : closest)
      if (!nodes_[h].store.count(key)) {
        store_on(h, key, entry.first, entry.second, latency_.rtt(nodes_[entry.second].region, nodes_[h].region));
        ++stores;
      }
  }
  return stores;
}

void Overlay::store_on(NodeHandle node, const NodeId& key, const std::shared_ptr<const Bytes>& value,
                       NodeHandle from, double latency) {
  nodes_[node].store[key] = value;
  record(TraceAction::Store, node, from, key, latency);
}

std::shared_ptr<const Bytes> Overlay::local_value(SimNode& node, const NodeId& key, bool& from_cache) {
  from_cache = false;
  if (auto it = node.store.find(key); it != node.store.end()) return it->second;
  if (auto it = node.cache.find(key); it != node.cache.end()) {
    if (it->second.expires_ms > now_ms_) {
      from_cache = true;
      return it->second.value;
    }
    node.cache.erase(it);
  }
  return nullptr;
}

bool Overlay::has_cached(NodeHandle node, const NodeId& key) const {
  auto it = nodes_[node].cache.find(key);
  return it != nodes_[node].cache.end() && it->second.expires_ms > now_ms_;
}

Overlay::LookupOutcome Overlay::lookup(const NodeId& target, NodeHandle from, LookupOptions options) {
  LookupOutcome out;
  auto& origin = nodes_[from];

  if (options.find_value) {
    bool cached = false;
    if (auto v = local_value(origin, target, cached)) {
      out.value = std::move(v);
      out.holder = from;
      out.from_cache = cached;
      out.result.closest = {from};
      return out;
    }
  }

  struct Candidate {
    NodeId distance;
    NodeHandle handle;
    bool queried;
    bool failed;
  };
  std::vector<Candidate> shortlist;
  std::unordered_set<NodeHandle> seen;
  auto add = [&](NodeHandle h, bool queried) {
    if (seen.insert(h).second) shortlist.push_back({xor_distance(target, nodes_[h].id), h, queried, false});
  };
  auto by_distance = [](const Candidate& a, const Candidate& b) { return a.distance < b.distance; };

  add(from, true);
  auto& own_table = options.region_only ? origin.region_table : origin.table;
  for (const auto& id : own_table.closest(target, params_.k_bucket)) add(handle_of(id), false);

  const std::size_t k = params_.k_bucket;
  bool query_all = false;
  std::optional<NodeId> best;

  for (;;) {
    std::sort(shortlist.begin(), shortlist.end(), by_distance);
    std::vector<std::size_t> picks;
    std::size_t considered = 0;
    for (std::size_t i = 0; i < shortlist.size() && considered < k; ++i) {
      if (shortlist[i].failed) continue;
      ++considered;
      if (!shortlist[i].queried) {
        picks.push_back(i);
        if (!query_all && picks.size() == params_.alpha) break;
      }
    }
    if (picks.empty()) break;

    ++out.result.hops;
    double round = 0;
    std::vector<NodeHandle> learned;
    for (auto i : picks) {
      auto& cand = shortlist[i];
      cand.queried = true;
      ++out.result.messages;
      auto& peer = nodes_[cand.handle];
      if (!peer.alive) {
        cand.failed = true;
        round = std::max(round, params_.rpc_timeout_ms);
        origin.table.remove(peer.id);
        origin.region_table.remove(peer.id);
        record(TraceAction::Timeout, cand.handle, from, target, params_.rpc_timeout_ms);
        continue;
      }
      const double rtt = latency_.rtt(origin.region, peer.region);
      round = std::max(round, rtt);
      record(options.find_value ? TraceAction::FindValue : TraceAction::FindNode, cand.handle, from, target, rtt);

      peer.table.observe(origin.id, is_alive_);
      origin.table.observe(peer.id, is_alive_);
      if (peer.region == origin.region) {
        peer.region_table.observe(origin.id, is_alive_);
        origin.region_table.observe(peer.id, is_alive_);
      }

      if (options.find_value && !out.value) {
        bool cached = false;
        if (auto v = local_value(peer, target, cached)) {
          out.value = std::move(v);
          out.holder = cand.handle;
          out.from_cache = cached;
          if (cached) record(TraceAction::CacheHit, cand.handle, from, target, rtt);
        }
      }
      const auto& peer_table = options.region_only ? peer.region_table : peer.table;
      for (const auto& id : peer_table.closest(target, k)) learned.push_back(handle_of(id));
    }
    for (auto h : learned) add(h, false);
    out.result.latency_ms += round;
    if (out.value) break;

    std::optional<NodeId> round_best;
    for (const auto& c : shortlist)
      if (!c.failed && (!round_best || c.distance < *round_best)) round_best = c.distance;
    query_all = best && round_best && !(*round_best < *best);
    best = round_best;
  }

  std::sort(shortlist.begin(), shortlist.end(), by_distance);
  for (const auto& c : shortlist) {
    if (out.result.closest.size() == k) break;
    if (!c.failed && c.queried && nodes_[c.handle].alive) out.result.closest.push_back(c.handle);
  }
  return out;
}

LookupResult Overlay::find_closest(const NodeId& target, NodeHandle from) {
  require_alive(from);
  auto r = lookup(target, from, {}).result;
  now_ms_ += r.latency_ms;
  return r;
}

PutResult Overlay::put(const NodeId& key, Bytes value, NodeHandle from) {
  require_alive(from);
  auto shared = std::make_shared<const Bytes>(std::move(value));
  auto found = lookup(key, from, {}).result;
  PutResult out;
  out.hops = found.hops;
  out.messages = found.messages;
  out.latency_ms = found.latency_ms;
  double round = 0;
  for (auto h : found.closest) {
    if (out.replicas.size() == params_.replicas) break;
    out.replicas.push_back(h);
    const double rtt = h == from ? 0.0 : latency_.rtt(nodes_[from].region, nodes_[h].region);
    round = std::max(round, rtt);
    if (h != from) ++out.messages;
    store_on(h, key, shared, from, rtt);
  }
  out.latency_ms += round;
  now_ms_ += out.latency_ms;
  return out;
}

GetResult Overlay::get(const NodeId& key, NodeHandle requester) {
  require_alive(requester);
  GetResult out;
  const auto region = nodes_[requester].region;
  std::optional<NodeHandle> region_home;

  if (params_.sloppy_caching) {
    auto local = lookup(key, requester, {true, true});
    out.hops += local.result.hops;
    out.messages += local.result.messages;
    out.latency_ms += local.result.latency_ms;
    if (local.value) {
      out.value = std::move(local.value);
      out.served_by = local.holder;
      out.from_cache = local.from_cache;
      out.region_hit = true;
      now_ms_ += out.latency_ms;
      return out;
    }
    if (!local.result.closest.empty()) region_home = local.result.closest.front();
  }

  auto global = lookup(key, requester, {true, false});
  out.hops += global.result.hops;
  out.messages += global.result.messages;
  out.latency_ms += global.result.latency_ms;
  if (!global.value) {
    now_ms_ += out.latency_ms;
    throw Error(Errc::NotFound, "key not found in overlay");
  }
  out.value = global.value;
  out.served_by = global.holder;
  out.from_cache = global.from_cache;

  if (params_.sloppy_caching && region_home) {
    bool primary_in_region = false;
    for (auto h : holders(key))
      if (nodes_[h].region == region) primary_in_region = true;
    if (!primary_in_region) {
      auto& home = nodes_[*region_home];
      home.cache[key] = {global.value, now_ms_ + out.latency_ms + params_.sloppy_ttl_ms};
      ++out.messages;
      out.cache_placed = true;
      record(TraceAction::CacheStore, *region_home, requester, key, latency_.rtt(region, home.region));
    }
  }
  now_ms_ += out.latency_ms;
  return out;
}

std::vector<NodeHandle> Overlay::brute_force_closest(const NodeId& target, std::size_t n) const {
  std::vector<NodeHandle> live;
  for (NodeHandle h = 0; h < nodes_.size(); ++h)
    if (nodes_[h].alive) live.push_back(h);
  std::sort(live.begin(), live.end(),
            [&](NodeHandle a, NodeHandle b) { return closer(target, nodes_[a].id, nodes_[b].id); });
  if (live.size() > n) live.resize(n);
  return live;
}

std::vector<NodeHandle> Overlay::holders(const NodeId& key) const {
  std::vector<NodeHandle> out;
  for (NodeHandle h = 0; h < nodes_.size(); ++h)
    if (nodes_[h].alive && nodes_[h].store.count(key)) out.push_back(h);
  return out;
}

std::vector<NodeId> Overlay::stored_keys() const {
  std::unordered_set<NodeId, NodeIdHash> keys;
  for (const auto& n : nodes_)
    if (n.alive)
      for (const auto& [key, value] : n.store) keys.insert(key);
  std::vector<NodeId> out(keys.begin(), keys.end());
  std::sort(out.begin(), out.end());
  return out;
}

std::string Overlay::trace_csv() const {
  std::ostringstream out;
  out << "time_ms,node,peer,action,key,latency_ms\n";
  for (const auto& e : trace_)
    out << e.time_ms << ',' << nodes_[e.node].id.hex() << ',' << nodes_[e.peer].id.hex() << ','
        << trace_action_name(e.action) << ',' << e.key.hex() << ',' << e.latency_ms << '\n';
  return out.str();
}

}  // namespace sv::dht
