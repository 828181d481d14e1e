#include "streamvault/ledger/block.hpp"

#include "streamvault/crypto/hash.hpp"

namespace sv::ledger {

Bytes Block::serialize() const {
  ByteWriter w;
  w.u64(height).raw(prev_hash).i64(timestamp_ms).u32(static_cast<std::uint32_t>(payloads.size()));
  for (const auto& p : payloads) w.var(p);
  return w.take();
}

Block Block::parse(ByteView data) {
  ByteReader r(data);
  Block b;
  b.height = r.u64();
  b.prev_hash = r.fixed<32>();
  b.timestamp_ms = r.i64();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) {
    auto p = r.var();
    b.payloads.emplace_back(p.begin(), p.end());
  }
  r.expect_done();
  return b;
}

Digest256 Block::digest() const { return crypto::sha256(serialize()); }

Block genesis_block() { return Block{}; }

}  // namespace sv::ledger
