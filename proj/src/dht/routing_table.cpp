#include "streamvault/dht/routing_table.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"

namespace sv::dht {

RoutingTable::RoutingTable(NodeId self, std::size_t k_bucket) : self_(self), k_(k_bucket) {
  if (k_ == 0) throw Error(Errc::InvalidArgument, "bucket size must be positive");
}

int RoutingTable::bucket_index(const NodeId& peer) const { return common_prefix_length(self_, peer); }

bool RoutingTable::observe(const NodeId& peer, const std::function<bool(const NodeId&)>& is_alive) {
  if (peer == self_) return false;
  auto& b = buckets_[bucket_index(peer)];
  auto it = std::find(b.begin(), b.end(), peer);
  if (it != b.end()) {
    std::rotate(it, it + 1, b.end());
    return true;
  }
  if (b.size() < k_) {
    b.push_back(peer);
    ++size_;
    return true;
  }
  if (!is_alive(b.front())) {
    b.erase(b.begin());
    b.push_back(peer);
    return true;
  }
  std::rotate(b.begin(), b.begin() + 1, b.end());
  return false;
}

void RoutingTable::remove(const NodeId& peer) {
  if (peer == self_) return;
  auto& b = buckets_[bucket_index(peer)];
  auto it = std::find(b.begin(), b.end(), peer);
  if (it != b.end()) {
    b.erase(it);
    --size_;
  }
}

bool RoutingTable::contains(const NodeId& peer) const {
  if (peer == self_) return false;
  const auto& b = buckets_[bucket_index(peer)];
  return std::find(b.begin(), b.end(), peer) != b.end();
}

std::vector<NodeId> RoutingTable::closest(const NodeId& target, std::size_t n) const {
  std::vector<std::pair<NodeId, NodeId>> all;  // (distance, id)
  all.reserve(size_);
  for (const auto& b : buckets_)
    for (const auto& id : b) all.emplace_back(xor_distance(target, id), id);
  const auto take = std::min(n, all.size());
  std::partial_sort(all.begin(), all.begin() + static_cast<std::ptrdiff_t>(take), all.end());
  std::vector<NodeId> out;
  out.reserve(take);
  for (std::size_t i = 0; i < take; ++i) out.push_back(all[i].second);
  return out;
}

}  // namespace sv::dht
