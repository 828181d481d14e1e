#include "streamvault/stream/codec.hpp"

#include <lzma.h>
#include <zlib.h>

#include "streamvault/common/error.hpp"

namespace sv::stream {

bool is_known_codec(std::uint8_t id) { return id <= static_cast<std::uint8_t>(Codec::Lzma); }

const char* codec_name(Codec codec) {
  switch (codec) {
    case Codec::Stored: return "stored";
    case Codec::Deflate: return "deflate";
    case Codec::Lzma: return "lzma";
  }
  return "unknown";
}

namespace {

// Raw streams carry no dictionary size, so it is part of the format.
constexpr std::uint32_t kLzmaDict = 4u << 20;

lzma_options_lzma lzma_options() {
  lzma_options_lzma opt;
  lzma_lzma_preset(&opt, 9);
  opt.dict_size = kLzmaDict;
  return opt;
}

Bytes lzma_compress(ByteView block) {
  auto opt = lzma_options();
  lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
  Bytes out(lzma_stream_buffer_bound(block.size()));
  std::size_t pos = 0;
  if (lzma_raw_buffer_encode(filters, nullptr, block.data(), block.size(), out.data(), &pos, out.size()) != LZMA_OK)
    throw Error(Errc::InvalidArgument, "lzma encode failed");
  out.resize(pos);
  return out;
}

Bytes lzma_decompress(ByteView block, std::size_t max_output) {
  auto opt = lzma_options();
  lzma_filter filters[] = {{LZMA_FILTER_LZMA2, &opt}, {LZMA_VLI_UNKNOWN, nullptr}};
  lzma_stream zs = LZMA_STREAM_INIT;
  if (lzma_raw_decoder(&zs, filters) != LZMA_OK) throw Error(Errc::CorruptCompressedData, "lzma decoder init failed");
  zs.next_in = block.data();
  zs.avail_in = block.size();

  Bytes out;
  std::uint8_t buf[16384];
  lzma_ret rc = LZMA_OK;
  while (rc != LZMA_STREAM_END) {
    zs.next_out = buf;
    zs.avail_out = sizeof(buf);
    rc = lzma_code(&zs, LZMA_FINISH);
    if (rc != LZMA_OK && rc != LZMA_STREAM_END) {
      lzma_end(&zs);
      throw Error(Errc::CorruptCompressedData, "lzma decode failed");
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    if (out.size() > max_output) {
      lzma_end(&zs);
      throw Error(Errc::CorruptCompressedData, "decompressed block exceeds limit");
    }
    if (rc == LZMA_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      lzma_end(&zs);
      throw Error(Errc::CorruptCompressedData, "truncated lzma stream");
    }
  }
  const bool trailing = zs.avail_in != 0;
  lzma_end(&zs);
  if (trailing) throw Error(Errc::CorruptCompressedData, "trailing bytes after lzma stream");
  return out;
}

}  // namespace

Bytes compress(ByteView block, Codec codec) {
  if (codec == Codec::Stored) return Bytes(block.begin(), block.end());
  if (codec == Codec::Lzma) return lzma_compress(block);

  uLongf bound = compressBound(static_cast<uLong>(block.size()));
  Bytes out(bound);
  if (compress2(out.data(), &bound, block.data(), static_cast<uLong>(block.size()), Z_BEST_COMPRESSION) != Z_OK)
    throw Error(Errc::InvalidArgument, "deflate failed");
  out.resize(bound);
  return out;
}

Bytes decompress(ByteView block, Codec codec, std::size_t max_output) {
  if (codec == Codec::Stored) {
    if (block.size() > max_output) throw Error(Errc::CorruptCompressedData, "block exceeds limit");
    return Bytes(block.begin(), block.end());
  }
  if (codec == Codec::Lzma) return lzma_decompress(block, max_output);

  z_stream zs{};
  if (inflateInit(&zs) != Z_OK) throw Error(Errc::CorruptCompressedData, "inflateInit failed");
  zs.next_in = const_cast<Bytef*>(block.data());
  zs.avail_in = static_cast<uInt>(block.size());

  Bytes out;
  std::uint8_t buf[16384];
  int rc = Z_OK;
  while (rc != Z_STREAM_END) {
    zs.next_out = buf;
    zs.avail_out = sizeof(buf);
    rc = inflate(&zs, Z_NO_FLUSH);
    if (rc != Z_OK && rc != Z_STREAM_END) {
      inflateEnd(&zs);
      throw Error(Errc::CorruptCompressedData, zs.msg ? zs.msg : "inflate failed");
    }
    out.insert(out.end(), buf, buf + (sizeof(buf) - zs.avail_out));
    if (out.size() > max_output) {
      inflateEnd(&zs);
      throw Error(Errc::CorruptCompressedData, "decompressed block exceeds limit");
    }
    if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
      inflateEnd(&zs);
      throw Error(Errc::CorruptCompressedData, "truncated deflate stream");
    }
  }
  const bool trailing = zs.avail_in != 0;
  inflateEnd(&zs);
  if (trailing) throw Error(Errc::CorruptCompressedData, "trailing bytes after deflate stream");
  return out;
}

}  // namespace sv::stream
