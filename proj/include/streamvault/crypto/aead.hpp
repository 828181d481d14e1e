#pragma once

#include "streamvault/common/bytes.hpp"

namespace sv::crypto {

inline constexpr std::size_t kAeadKeySize = 32;
inline constexpr std::size_t kAeadNonceSize = 12;
inline constexpr std::size_t kAeadTagSize = 16;

using AeadKey = FixedBytes<kAeadKeySize>;
using AeadNonce = FixedBytes<kAeadNonceSize>;

/// AES-256-GCM. Returns ciphertext || tag.
Bytes aead_seal(const AeadKey& key, const AeadNonce& nonce, ByteView plaintext, ByteView aad);

/// Throws Error(Errc::BadTag) when the tag does not verify.
Bytes aead_open(const AeadKey& key, const AeadNonce& nonce, ByteView sealed, ByteView aad);

}  // namespace sv::crypto
