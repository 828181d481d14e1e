#pragma once

#include "streamvault/dht/overlay.hpp"
#include "streamvault/storage/backend.hpp"

namespace sv::storage {

/// Stores values in the simulated overlay under the first 160 bits of the
/// key. The full key is kept as a 32-byte prefix of the stored value so a
/// truncation collision reads as a miss rather than foreign data.
class DhtBackend final : public StorageBackend {
 public:
  DhtBackend(dht::Overlay& overlay, dht::NodeHandle home) : overlay_(overlay), home_(home) {}

  bool put_if_absent(const Digest256& key, ByteView value) override;
  std::optional<Bytes> get(const Digest256& key) override;
  std::vector<Digest256> scan_prefix(ByteView prefix) override;

  dht::NodeHandle home() const { return home_; }
  void set_home(dht::NodeHandle home) { home_ = home; }
  const dht::GetResult& last_get() const { return last_get_; }

 private:
  dht::Overlay& overlay_;
  dht::NodeHandle home_;
  dht::GetResult last_get_;
  std::mutex mu_;  // the overlay is single-threaded
};

}  // namespace sv::storage
