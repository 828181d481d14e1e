#pragma once

#include <array>
#include <functional>
#include <vector>

#include "streamvault/dht/node_id.hpp"

namespace sv::dht {

/// k-buckets indexed by shared prefix length with the owner. Each bucket is
/// ordered least- to most-recently seen.
class RoutingTable {
 public:
  RoutingTable(NodeId self, std::size_t k_bucket);

  const NodeId& self() const { return self_; }
  std::size_t k_bucket() const { return k_; }

  /// Records contact with peer. A full bucket keeps its least-recently seen
  /// entry while is_alive says so and drops the newcomer; a dead one is
  /// replaced. Returns true if peer is in the table afterwards.
  bool observe(const NodeId& peer, const std::function<bool(const NodeId&)>& is_alive);
  void remove(const NodeId& peer);
  bool contains(const NodeId& peer) const;

  std::vector<NodeId> closest(const NodeId& target, std::size_t n) const;

  /// Bucket for peer (its shared prefix length with the owner).
  int bucket_index(const NodeId& peer) const;
  const std::vector<NodeId>& bucket(int index) const { return buckets_[index]; }
  std::size_t size() const { return size_; }

 private:
  NodeId self_;
  std::size_t k_;
  std::size_t size_ = 0;
  std::array<std::vector<NodeId>, kIdBits> buckets_;
};

}  // namespace sv::dht
