#pragma once

#include <cstdint>
#include <initializer_list>

#include <sodium.h>

#include "streamvault/common/bytes.hpp"

namespace sv::crypto {

/// One-byte domain-separation prefixes. Every digest computed by the system
/// starts with exactly one of these.
namespace domain {
inline constexpr std::uint8_t kChainStep = 0x01;   // key regression: state step
inline constexpr std::uint8_t kChainKey = 0x02;    // key regression: key extraction
inline constexpr std::uint8_t kChunkNonce = 0x03;
inline constexpr std::uint8_t kChunkKey = 0x04;
inline constexpr std::uint8_t kTimestamp = 0x05;
inline constexpr std::uint8_t kKemWrap = 0x10;
inline constexpr std::uint8_t kKemCheck = 0x11;
inline constexpr std::uint8_t kStreamId = 0x20;
inline constexpr std::uint8_t kKeyMaterial = 0x21;
inline constexpr std::uint8_t kPutRequest = 0x22;
inline constexpr std::uint8_t kAclState = 0x23;
inline constexpr std::uint8_t kGetRequest = 0x24;
}  // namespace domain

Digest256 sha256(ByteView data);

/// sha256(prefix || data)
Digest256 tagged_hash(std::uint8_t prefix, ByteView data);

class Sha256 {
 public:
  Sha256();
  Sha256& update(ByteView data);
  template <std::size_t N>
  Sha256& update(const FixedBytes<N>& data) {
    return update(ByteView{data.data(), data.size()});
  }
  Sha256& update_u8(std::uint8_t v) { return update(ByteView{&v, 1}); }
  Digest256 finish();

 private:
  crypto_hash_sha256_state state_;
};

}  // namespace sv::crypto
