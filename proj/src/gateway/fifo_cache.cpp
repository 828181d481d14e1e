#include "streamvault/gateway/fifo_cache.hpp"

namespace sv::gateway {

void FifoCache::push(stream::SealedChunk chunk) {
  entries_.push_back({std::move(chunk), false});
  evict();
}

void FifoCache::mark_acked(std::uint64_t chunk_index) {
  for (auto& e : entries_)
    if (e.chunk.header.chunk_index == chunk_index) e.acked = true;
  evict();
}

void FifoCache::evict() {
  while (entries_.size() > capacity_ && entries_.front().acked) {
    entries_.pop_front();
    ++evictions_;
  }
}

const stream::SealedChunk* FifoCache::find(std::uint64_t chunk_index) const {
  for (const auto& e : entries_)
    if (e.chunk.header.chunk_index == chunk_index) return &e.chunk;
  return nullptr;
}

std::vector<const stream::SealedChunk*> FifoCache::unacked() const {
  std::vector<const stream::SealedChunk*> out;
  for (const auto& e : entries_)
    if (!e.acked) out.push_back(&e.chunk);
  return out;
}

std::vector<std::uint64_t> FifoCache::indices() const {
  std::vector<std::uint64_t> out;
  for (const auto& e : entries_) out.push_back(e.chunk.header.chunk_index);
  return out;
}

}  // namespace sv::gateway
