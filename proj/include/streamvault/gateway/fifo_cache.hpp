#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "streamvault/stream/chunk.hpp"

namespace sv::gateway {

/// Bounded FIFO of recently sealed chunks. A chunk leaves only from the
/// front and only once storage has acknowledged it; until then the cache
/// may exceed its capacity.
class FifoCache {
 public:
  explicit FifoCache(std::size_t capacity) : capacity_(capacity) {}

  void push(stream::SealedChunk chunk);
  /// Marks the chunk acknowledged and evicts what the capacity allows.
  void mark_acked(std::uint64_t chunk_index);
  const stream::SealedChunk* find(std::uint64_t chunk_index) const;
  std::vector<const stream::SealedChunk*> unacked() const;

  std::size_t size() const { return entries_.size(); }
  std::size_t capacity() const { return capacity_; }
  std::uint64_t evictions() const { return evictions_; }
  /// Oldest first.
  std::vector<std::uint64_t> indices() const;

 private:
  struct Entry {
    stream::SealedChunk chunk;
    bool acked = false;
  };
  void evict();

  std::size_t capacity_;
  std::deque<Entry> entries_;
  std::uint64_t evictions_ = 0;
};

}  // namespace sv::gateway
