#include "streamvault/stream/record.hpp"

#include "streamvault/common/error.hpp"

namespace sv::stream {

Bytes encode_records(std::span<const DataRecord> records) {
  std::size_t size = 4;
  for (const auto& r : records) size += 10 + r.value.size();
  ByteWriter w(size);
  w.u32(static_cast<std::uint32_t>(records.size()));
  for (const auto& r : records) {
    if (r.value.size() > kMaxValueSize) throw Error(Errc::InvalidArgument, "record value exceeds 65535 bytes");
    w.i64(r.timestamp).u16(static_cast<std::uint16_t>(r.value.size())).raw(r.value);
  }
  return w.take();
}

std::vector<DataRecord> decode_records(ByteView block) {
  ByteReader r(block);
  const auto count = r.u32();
  if (count > block.size() / 10) throw Error(Errc::Malformed, "record count exceeds block size");
  std::vector<DataRecord> out;
  out.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) {
    DataRecord rec;
    rec.timestamp = r.i64();
    auto len = r.u16();
    auto v = r.raw(len);
    rec.value.assign(v.begin(), v.end());
    out.push_back(std::move(rec));
  }
  r.expect_done();
  return out;
}

std::uint64_t chunk_index_for(std::int64_t t, const StreamMeta& meta) {
  if (meta.delta <= 0) throw Error(Errc::InvalidArgument, "chunk length must be positive");
  if (t < meta.t0) throw Error(Errc::BeforeStreamStart);
  return static_cast<std::uint64_t>((t - meta.t0) / meta.delta);
}

std::int64_t chunk_start(const StreamMeta& meta, std::uint64_t chunk_index) {
  return meta.t0 + static_cast<std::int64_t>(chunk_index) * meta.delta;
}

}  // namespace sv::stream
