#include "streamvault/stream/chunk.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::stream {

namespace {

Digest256 signed_digest(ByteView header, ByteView payload) {
  return crypto::Sha256().update(header).update(payload).finish();
}

}  // namespace

Bytes ChunkHeader::serialize() const {
  ByteWriter w(kSerializedSize);
  w.raw(ByteView{kChunkMagic.data(), kChunkMagic.size()})
      .u8(static_cast<std::uint8_t>((kChunkFormatVersion << 4) | static_cast<std::uint8_t>(codec)))
      .raw(stream_id)
      .u64(chunk_index)
      .i64(start_ts)
      .i64(end_ts)
      .raw(prev_chunk_hash)
      .u32(epoch)
      .u32(record_count);
  return w.take();
}

ChunkHeader ChunkHeader::parse(ByteReader& reader) {
  auto magic = reader.raw(4);
  if (!std::equal(magic.begin(), magic.end(), kChunkMagic.begin()))
    throw Error(Errc::MalformedChunk, "bad chunk magic");
  const auto version = reader.u8();
  if ((version >> 4) != kChunkFormatVersion) throw Error(Errc::MalformedChunk, "unsupported chunk version");
  if (!is_known_codec(version & 0x0f)) throw Error(Errc::MalformedChunk, "unknown chunk codec");
  ChunkHeader h;
  h.codec = static_cast<Codec>(version & 0x0f);
  h.stream_id = reader.fixed<32>();
  h.chunk_index = reader.u64();
  h.start_ts = reader.i64();
  h.end_ts = reader.i64();
  h.prev_chunk_hash = reader.fixed<32>();
  h.epoch = reader.u32();
  h.record_count = reader.u32();
  return h;
}

Bytes SealedChunk::serialize() const {
  ByteWriter w(ChunkHeader::kSerializedSize + 4 + payload.size() + signature.size());
  w.raw(header.serialize()).var(payload).raw(signature);
  return w.take();
}

SealedChunk SealedChunk::parse(ByteView data) {
  try {
    ByteReader r(data);
    SealedChunk c;
    c.header = ChunkHeader::parse(r);
    auto payload = r.var();
    c.payload.assign(payload.begin(), payload.end());
    c.signature = r.fixed<64>();
    r.expect_done();
    return c;
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw Error(Errc::MalformedChunk, e.what());
    throw;
  }
}

Digest256 SealedChunk::digest() const { return crypto::sha256(serialize()); }

Digest256 timestamp_hash(std::int64_t start_ts) {
  ByteWriter w(8);
  w.i64(start_ts);
  return crypto::sha256(w.bytes());
}

Digest256 chunk_key(const StreamMeta& meta, std::uint64_t chunk_index) {
  return crypto::Sha256()
      .update(meta.stream_id)
      .update(meta.owner_id)
      .update(timestamp_hash(chunk_start(meta, chunk_index)))
      .finish();
}

crypto::AeadNonce chunk_nonce(const Digest256& stream_id, std::uint64_t chunk_index, std::uint32_t epoch) {
  ByteWriter w(1 + 32 + 8 + 4);
  w.u8(crypto::domain::kChunkNonce).raw(stream_id).u64(chunk_index).u32(epoch);
  auto full = crypto::sha256(w.bytes());
  crypto::AeadNonce nonce{};
  std::copy_n(full.begin(), nonce.size(), nonce.begin());
  return nonce;
}

SealedChunk build_chunk(const StreamMeta& meta, std::span<const DataRecord> records,
                        const Digest256& prev_hash, const crypto::StreamKey& stream_key,
                        const crypto::SigningKey& owner, const BuildOptions& options) {
  if (records.empty()) throw Error(Errc::InvalidArgument, "cannot build an empty chunk");
  if (records.size() > options.max_records || records.size() > UINT32_MAX)
    throw Error(Errc::InvalidArgument, "chunk exceeds the per-stream record cap");

  const auto index = chunk_index_for(records.front().timestamp, meta);
  ChunkHeader h;
  h.codec = options.codec;
  h.stream_id = meta.stream_id;
  h.chunk_index = index;
  h.start_ts = chunk_start(meta, index);
  h.end_ts = h.start_ts + meta.delta;
  h.prev_chunk_hash = prev_hash;
  h.epoch = stream_key.epoch;
  h.record_count = static_cast<std::uint32_t>(records.size());

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto ts = records[i].timestamp;
    if (i > 0 && ts <= records[i - 1].timestamp) throw Error(Errc::UnsortedInput);
    if (ts < h.start_ts || ts >= h.end_ts) throw Error(Errc::RecordOutOfRange);
  }

  const auto header_bytes = h.serialize();
  const auto block = compress(encode_records(records), options.codec);

  SealedChunk c;
  c.header = h;
  c.payload = crypto::aead_seal(stream_key.key, chunk_nonce(h.stream_id, h.chunk_index, h.epoch), block,
                                header_bytes);
  c.signature = owner.sign(view(signed_digest(header_bytes, c.payload)));
  return c;
}

bool verify_chunk_signature(const SealedChunk& chunk, const crypto::PublicKey& owner) {
  const auto header_bytes = chunk.header.serialize();
  return crypto::verify_signature(owner, view(signed_digest(header_bytes, chunk.payload)), chunk.signature);
}

std::vector<DataRecord> open_chunk(const SealedChunk& chunk, const crypto::StreamKey& stream_key,
                                   const crypto::PublicKey& owner) {
  const auto& h = chunk.header;
  if (stream_key.epoch != h.epoch)
    throw Error(Errc::WrongEpochKey, "chunk sealed at epoch " + std::to_string(h.epoch) +
                                         ", key is for epoch " + std::to_string(stream_key.epoch));
  const auto header_bytes = h.serialize();
  auto block = crypto::aead_open(stream_key.key, chunk_nonce(h.stream_id, h.chunk_index, h.epoch),
                                 chunk.payload, header_bytes);
  if (!crypto::verify_signature(owner, view(signed_digest(header_bytes, chunk.payload)), chunk.signature))
    throw Error(Errc::BadSignature);

  std::vector<DataRecord> records;
  try {
    records = decode_records(decompress(block, h.codec));
  } catch (const Error& e) {
    if (e.code() == Errc::Malformed) throw Error(Errc::MalformedChunk, e.what());
    throw;
  }
  if (records.size() != h.record_count) throw Error(Errc::MalformedChunk, "record count mismatch");
  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto ts = records[i].timestamp;
    if (ts < h.start_ts || ts >= h.end_ts || (i > 0 && ts <= records[i - 1].timestamp))
      throw Error(Errc::MalformedChunk, "record outside chunk window");
  }
  return records;
}

bool verify_chain(std::span<const SealedChunk> chunks, const Digest256& anchor) {
  if (chunks.empty()) return false;
  Digest256 prev = chunks.front().digest();
  for (std::size_t i = 1; i < chunks.size(); ++i) {
    const auto& h = chunks[i].header;
    if (h.chunk_index <= chunks[i - 1].header.chunk_index) return false;
    if (h.prev_chunk_hash != prev) return false;
    prev = chunks[i].digest();
  }
  return prev == anchor;
}

}  // namespace sv::stream
