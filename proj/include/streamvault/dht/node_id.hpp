#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <random>
#include <string>

#include "streamvault/common/bytes.hpp"

namespace sv::dht {

inline constexpr int kIdBits = 160;

/// 160-bit identifier held as three big-endian words (the last one uses
/// only its upper 32 bits) so XOR-distance comparisons are word-wise.
struct NodeId {
  std::array<std::uint64_t, 3> words{};

  static NodeId from_bytes(const FixedBytes<20>& bytes);
  /// Leading 160 bits of a 256-bit storage key.
  static NodeId from_key(const Digest256& key);
  static NodeId random(std::mt19937_64& rng);

  FixedBytes<20> to_bytes() const;
  std::string hex() const;
  bool bit(int i) const { return (words[i / 64] >> (63 - i % 64)) & 1u; }

  auto operator<=>(const NodeId&) const = default;
};

struct NodeIdHash {
  std::size_t operator()(const NodeId& id) const noexcept {
    return static_cast<std::size_t>(id.words[0] ^ (id.words[1] * 0x9e3779b97f4a7c15ull) ^ id.words[2]);
  }
};

inline NodeId xor_distance(const NodeId& a, const NodeId& b) {
  return NodeId{{a.words[0] ^ b.words[0], a.words[1] ^ b.words[1], a.words[2] ^ b.words[2]}};
}

/// True iff a is strictly closer to target than b.
inline bool closer(const NodeId& target, const NodeId& a, const NodeId& b) {
  return xor_distance(target, a) < xor_distance(target, b);
}

/// Number of leading bits a and b share; 160 when equal.
int common_prefix_length(const NodeId& a, const NodeId& b);

/// Random id sharing exactly `prefix_bits` leading bits with base.
NodeId random_id_with_prefix(const NodeId& base, int prefix_bits, std::mt19937_64& rng);

}  // namespace sv::dht
