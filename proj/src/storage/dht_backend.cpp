#include "streamvault/storage/dht_backend.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"

namespace sv::storage {

namespace {

std::optional<Bytes> unwrap(const Digest256& key, const Bytes& stored) {
  if (stored.size() < key.size() || !std::equal(key.begin(), key.end(), stored.begin())) return std::nullopt;
  return Bytes(stored.begin() + static_cast<std::ptrdiff_t>(key.size()), stored.end());
}

}  // namespace

std::optional<Bytes> DhtBackend::get(const Digest256& key) {
  std::lock_guard lock(mu_);
  try {
    last_get_ = overlay_.get(dht::NodeId::from_key(key), home_);
    return unwrap(key, *last_get_.value);
  } catch (const Error& e) {
    if (e.code() == Errc::NotFound) return std::nullopt;
    if (e.code() == Errc::PartitionedOverlay) throw Error(Errc::StorageUnavailable, e.what());
    throw;
  }
}

bool DhtBackend::put_if_absent(const Digest256& key, ByteView value) {
  if (get(key)) return false;
  std::lock_guard lock(mu_);
  Bytes stored(key.begin(), key.end());
  stored.insert(stored.end(), value.begin(), value.end());
  try {
    overlay_.put(dht::NodeId::from_key(key), std::move(stored), home_);
  } catch (const Error& e) {
    if (e.code() == Errc::PartitionedOverlay) throw Error(Errc::StorageUnavailable, e.what());
    throw;
  }
  return true;
}

std::vector<Digest256> DhtBackend::scan_prefix(ByteView prefix) {
  std::vector<dht::NodeId> ids;
  {
    std::lock_guard lock(mu_);
    ids = overlay_.stored_keys();
  }
  const auto id_prefix = prefix.size() < 20 ? prefix.size() : std::size_t{20};
  std::vector<Digest256> out;
  for (const auto& id : ids) {
    const auto raw = id.to_bytes();
    if (!std::equal(prefix.begin(), prefix.begin() + static_cast<std::ptrdiff_t>(id_prefix), raw.begin())) continue;
    std::lock_guard lock(mu_);
    auto got = overlay_.get(id, home_);
    if (got.value->size() < 32) continue;
    Digest256 key{};
    std::copy_n(got.value->begin(), 32, key.begin());
    if (std::equal(prefix.begin(), prefix.end(), key.begin())) out.push_back(key);
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sv::storage
