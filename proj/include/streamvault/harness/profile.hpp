#pragma once

#include <string>
#include <vector>

#include "streamvault/dht/latency.hpp"
#include "streamvault/dht/overlay.hpp"
#include "streamvault/ledger/chain.hpp"
#include "streamvault/stream/codec.hpp"

namespace sv::harness {

/// Named configuration bundle. Together with a seed it fixes a run.
struct Profile {
  std::string name = "default";
  ledger::ChainConfig chain;
  dht::DhtParams dht;
  dht::LatencyModel latency = dht::LatencyModel::default_profile();
  std::size_t dht_nodes = 1000;
  std::int64_t chunk_delta_ms = 3'600'000;
  std::uint32_t checkpoint_interval = 10;
  stream::Codec codec = stream::Codec::Lzma;

  std::string to_json() const;
  /// Overrides only the fields present in json. Throws InvalidArgument.
  void apply_json(const std::string& json);
  /// sha256 of the canonical JSON, hex.
  std::string digest() const;
};

/// "default", "test" (one confirmation, tiny overlay) or "bitcoin-like"
/// (six confirmations, 600 s blocks). Throws InvalidArgument.
Profile profile_by_name(const std::string& name);
std::vector<std::string> profile_names();

}  // namespace sv::harness
