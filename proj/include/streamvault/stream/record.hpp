#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "streamvault/common/bytes.hpp"

namespace sv::stream {

/// One timestamped reading. The value is opaque to the system.
struct DataRecord {
  std::int64_t timestamp = 0;  // ms since epoch
  Bytes value;

  bool operator==(const DataRecord&) const = default;
};

/// Stream identity and chunking parameters.
struct StreamMeta {
  Digest256 stream_id{};
  Digest256 owner_id{};
  std::int64_t t0 = 0;     // start of chunk 0, ms
  std::int64_t delta = 0;  // chunk window length, ms
  std::uint32_t epoch = 0;
  std::uint32_t checkpoint_interval = 1;
};

inline constexpr std::size_t kMaxValueSize = 0xffff;

/// Raw record block: u32 count, then per record i64 timestamp, u16 value
/// length, value bytes.
Bytes encode_records(std::span<const DataRecord> records);
std::vector<DataRecord> decode_records(ByteView block);

/// floor((t - t0) / delta). Throws BeforeStreamStart for t < t0.
std::uint64_t chunk_index_for(std::int64_t t, const StreamMeta& meta);
std::int64_t chunk_start(const StreamMeta& meta, std::uint64_t chunk_index);

}  // namespace sv::stream
