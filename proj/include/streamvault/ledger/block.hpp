#pragma once

#include <cstdint>
#include <vector>

#include "streamvault/common/bytes.hpp"

namespace sv::ledger {

/// A block carries opaque payloads; the chain neither parses nor validates
/// them. Interpreting them is the state machine's job.
struct Block {
  std::uint64_t height = 0;
  Digest256 prev_hash{};
  std::int64_t timestamp_ms = 0;
  std::vector<Bytes> payloads;

  Bytes serialize() const;
  static Block parse(ByteView data);
  Digest256 digest() const;
  bool operator==(const Block&) const = default;
};

Block genesis_block();

}  // namespace sv::ledger
