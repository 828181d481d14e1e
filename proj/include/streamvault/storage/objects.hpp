#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "streamvault/common/bytes.hpp"
#include "streamvault/crypto/key_distribution.hpp"
#include "streamvault/crypto/pre.hpp"

namespace sv::storage {

inline constexpr std::array<std::uint8_t, 4> kEnvelopeMagic = {'S', 'V', 'E', '1'};
inline constexpr std::array<std::uint8_t, 4> kShareMagic = {'S', 'V', 'S', '1'};

/// sha256(0x21 || stream_id || epoch || grantee_id). The broadcast wrapped
/// key of an epoch uses the all-zero grantee.
Digest256 keymat_key(const Digest256& stream_id, std::uint32_t epoch, const Digest256& grantee_id);

/// The published wrapped chain state for one epoch.
//   magic "SVE1" | stream_id 32 | epoch u32 | onetime_epoch u32 | wrapped 144
struct KeyEnvelope {
  Digest256 stream_id{};
  crypto::KeyPublication publication;

  Digest256 storage_key() const { return keymat_key(stream_id, publication.epoch, Digest256{}); }
  Bytes serialize() const;
  static KeyEnvelope parse(ByteView data);
};

/// A token share addressed to one grantee.
//   magic "SVS1" | stream_id 32 | grantee_id 32 | onetime_epoch u32 | share 176
struct TokenShareObject {
  Digest256 stream_id{};
  Digest256 grantee_id{};
  std::uint32_t onetime_epoch = 0;
  crypto::TokenShare share;

  Digest256 storage_key() const { return keymat_key(stream_id, onetime_epoch, grantee_id); }
  Bytes serialize() const;
  static TokenShareObject parse(ByteView data);
};

enum class ObjectKind { Chunk, KeyEnvelope, TokenShare };

/// What a node needs to route a value to a permission check without a full
/// parse.
struct ObjectInfo {
  ObjectKind kind = ObjectKind::Chunk;
  Digest256 stream_id{};
  std::optional<Digest256> grantee;  // token shares only
};

/// Throws Malformed for an unknown magic or a short value.
ObjectInfo peek_object(ByteView value);

}  // namespace sv::storage
