#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "streamvault/crypto/aead.hpp"
#include "streamvault/crypto/key_regression.hpp"
#include "streamvault/crypto/signature.hpp"
#include "streamvault/stream/codec.hpp"
#include "streamvault/stream/record.hpp"

namespace sv::stream {

inline constexpr std::array<std::uint8_t, 4> kChunkMagic = {'S', 'V', 'C', '1'};
inline constexpr std::uint8_t kChunkFormatVersion = 1;

// Wire layout (all integers big-endian, no padding):
//
//   header   magic "SVC1"          4
//            version<<4 | codec    1
//            stream_id             32
//            chunk_index           u64
//            start_ts              i64
//            end_ts                i64
//            prev_chunk_hash       32
//            epoch                 u32
//            record_count          u32
//   payload  length                u32
//            AES-256-GCM(compressed record block) || tag, AAD = header
//   signature Ed25519 over sha256(header || payload bytes)   64
struct ChunkHeader {
  static constexpr std::size_t kSerializedSize = 4 + 1 + 32 + 8 + 8 + 8 + 32 + 4 + 4;

  Codec codec = Codec::Lzma;
  Digest256 stream_id{};
  std::uint64_t chunk_index = 0;
  std::int64_t start_ts = 0;
  std::int64_t end_ts = 0;
  Digest256 prev_chunk_hash{};
  std::uint32_t epoch = 0;
  std::uint32_t record_count = 0;

  Bytes serialize() const;
  static ChunkHeader parse(ByteReader& reader);
  bool operator==(const ChunkHeader&) const = default;
};

struct SealedChunk {
  ChunkHeader header;
  Bytes payload;
  crypto::Signature signature{};

  Bytes serialize() const;
  /// Strict parse: throws MalformedChunk on bad magic, unknown version or
  /// codec, truncation, or trailing bytes.
  static SealedChunk parse(ByteView data);
  /// Digest of the full serialized chunk; what the next chunk and ledger
  /// checkpoints point at.
  Digest256 digest() const;
  bool operator==(const SealedChunk&) const = default;
};

/// sha256 of the 8-byte big-endian chunk start time.
Digest256 timestamp_hash(std::int64_t start_ts);
/// Storage key: sha256(stream_id || owner_id || timestamp_hash(start_ts)).
Digest256 chunk_key(const StreamMeta& meta, std::uint64_t chunk_index);

/// First 12 bytes of sha256(0x03 || stream_id || chunk_index || epoch).
crypto::AeadNonce chunk_nonce(const Digest256& stream_id, std::uint64_t chunk_index, std::uint32_t epoch);

struct BuildOptions {
  Codec codec = Codec::Lzma;
  std::size_t max_records = std::size_t{1} << 20;
};

/// Seals one window of records. Records must be non-empty, strictly
/// increasing in time and all inside one chunk window; the window is taken
/// from the first record.
///
/// Throws RecordOutOfRange, UnsortedInput, InvalidArgument (empty or too
/// many records).
SealedChunk build_chunk(const StreamMeta& meta, std::span<const DataRecord> records,
                        const Digest256& prev_hash, const crypto::StreamKey& stream_key,
                        const crypto::SigningKey& owner, const BuildOptions& options = {});

/// Checks epoch, AEAD tag and owner signature, then decompresses.
/// Throws WrongEpochKey, BadTag, BadSignature, MalformedChunk.
std::vector<DataRecord> open_chunk(const SealedChunk& chunk, const crypto::StreamKey& stream_key,
                                   const crypto::PublicKey& owner);

/// Signature check alone; needs no stream key.
bool verify_chunk_signature(const SealedChunk& chunk, const crypto::PublicKey& owner);

/// True iff every chunk's prev_chunk_hash is the digest of its predecessor,
/// indices strictly increase, and the last chunk's digest equals anchor.
bool verify_chain(std::span<const SealedChunk> chunks, const Digest256& anchor);

}  // namespace sv::stream
