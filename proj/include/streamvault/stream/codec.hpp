#pragma once

#include <cstdint>

#include "streamvault/common/bytes.hpp"

namespace sv::stream {

/// Lossless block codecs. The identifier is stored in the low nibble of the
/// chunk version byte, so readers never need out-of-band codec config.
enum class Codec : std::uint8_t {
  Stored = 0,
  Deflate = 1,
  Lzma = 2,  // raw LZMA2, fixed 4 MiB dictionary
};

bool is_known_codec(std::uint8_t id);
const char* codec_name(Codec codec);

Bytes compress(ByteView block, Codec codec = Codec::Lzma);

/// Throws CorruptCompressedData on invalid input or when the output would
/// exceed max_output bytes.
Bytes decompress(ByteView block, Codec codec = Codec::Lzma,
                 std::size_t max_output = std::size_t{256} << 20);

}  // namespace sv::stream
