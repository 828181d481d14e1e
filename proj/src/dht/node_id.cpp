#include "streamvault/dht/node_id.hpp"

#include <bit>

namespace sv::dht {

NodeId NodeId::from_bytes(const FixedBytes<20>& bytes) {
  NodeId id;
  for (int i = 0; i < 20; ++i) id.words[i / 8] |= std::uint64_t{bytes[i]} << (56 - 8 * (i % 8));
  return id;
}

NodeId NodeId::from_key(const Digest256& key) {
  FixedBytes<20> b{};
  std::copy_n(key.begin(), 20, b.begin());
  return from_bytes(b);
}

NodeId NodeId::random(std::mt19937_64& rng) {
  NodeId id{{rng(), rng(), rng() & 0xffffffff00000000ull}};
  return id;
}

FixedBytes<20> NodeId::to_bytes() const {
  FixedBytes<20> out{};
  for (int i = 0; i < 20; ++i) out[i] = static_cast<std::uint8_t>(words[i / 8] >> (56 - 8 * (i % 8)));
  return out;
}

std::string NodeId::hex() const { return to_hex(to_bytes()); }

int common_prefix_length(const NodeId& a, const NodeId& b) {
  const auto d = xor_distance(a, b);
  for (int w = 0; w < 3; ++w)
    if (d.words[w] != 0) return std::min(kIdBits, w * 64 + std::countl_zero(d.words[w]));
  return kIdBits;
}

NodeId random_id_with_prefix(const NodeId& base, int prefix_bits, std::mt19937_64& rng) {
  NodeId out = NodeId::random(rng);
  for (int i = 0; i <= prefix_bits && i < kIdBits; ++i) {
    const int w = i / 64;
    const std::uint64_t mask = std::uint64_t{1} << (63 - i % 64);
    const bool want = i < prefix_bits ? base.bit(i) : !base.bit(i);
    out.words[w] = want ? (out.words[w] | mask) : (out.words[w] & ~mask);
  }
  return out;
}

}  // namespace sv::dht
