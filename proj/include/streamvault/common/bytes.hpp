#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace sv {

using Bytes = std::vector<std::uint8_t>;
using ByteView = std::span<const std::uint8_t>;

template <std::size_t N>
using FixedBytes = std::array<std::uint8_t, N>;

/// 256-bit digest; also used for stream ids, owner ids and storage keys.
using Digest256 = FixedBytes<32>;

std::string to_hex(ByteView data);
Bytes from_hex(std::string_view hex);

template <std::size_t N>
FixedBytes<N> fixed_from_hex(std::string_view hex);

template <std::size_t N>
std::string to_hex(const FixedBytes<N>& data) {
  return to_hex(ByteView{data.data(), data.size()});
}

inline ByteView as_bytes(std::string_view s) {
  return {reinterpret_cast<const std::uint8_t*>(s.data()), s.size()};
}

template <std::size_t N>
ByteView view(const FixedBytes<N>& a) {
  return {a.data(), a.size()};
}

inline bool is_zero(ByteView data) {
  for (auto b : data)
    if (b != 0) return false;
  return true;
}

/// Big-endian, fixed-width, unpadded encoder. All canonical serializations
/// (chunks, transactions, blocks, wire frames) go through this.
class ByteWriter {
 public:
  ByteWriter() = default;
  explicit ByteWriter(std::size_t reserve) { out_.reserve(reserve); }

  ByteWriter& u8(std::uint8_t v);
  ByteWriter& u16(std::uint16_t v);
  ByteWriter& u32(std::uint32_t v);
  ByteWriter& u64(std::uint64_t v);
  ByteWriter& i64(std::int64_t v) { return u64(static_cast<std::uint64_t>(v)); }
  ByteWriter& raw(ByteView data);
  template <std::size_t N>
  ByteWriter& raw(const FixedBytes<N>& data) {
    return raw(ByteView{data.data(), data.size()});
  }
  /// u32 length prefix followed by the bytes.
  ByteWriter& var(ByteView data);

  const Bytes& bytes() const { return out_; }
  Bytes take() { return std::move(out_); }

 private:
  Bytes out_;
};

/// Counterpart of ByteWriter. Every accessor throws Error(Errc::Malformed)
/// on truncated input.
class ByteReader {
 public:
  explicit ByteReader(ByteView in) : in_(in) {}

  std::uint8_t u8();
  std::uint16_t u16();
  std::uint32_t u32();
  std::uint64_t u64();
  std::int64_t i64() { return static_cast<std::int64_t>(u64()); }
  ByteView raw(std::size_t n);
  template <std::size_t N>
  FixedBytes<N> fixed() {
    FixedBytes<N> out{};
    auto src = raw(N);
    std::copy(src.begin(), src.end(), out.begin());
    return out;
  }
  ByteView var(std::size_t max_len = SIZE_MAX);

  std::size_t remaining() const { return in_.size() - pos_; }
  std::size_t position() const { return pos_; }
  bool done() const { return pos_ == in_.size(); }
  /// Throws Malformed unless every byte was consumed.
  void expect_done() const;

 private:
  ByteView in_;
  std::size_t pos_ = 0;
};

struct DigestHash {
  std::size_t operator()(const Digest256& d) const noexcept {
    std::size_t h = 0;
    for (std::size_t i = 0; i < sizeof(std::size_t); ++i) h = (h << 8) | d[i];
    return h;
  }
};

}  // namespace sv
