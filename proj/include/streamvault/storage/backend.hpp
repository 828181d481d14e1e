#pragma once

#include <filesystem>
#include <map>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <vector>

#include "streamvault/common/bytes.hpp"

namespace sv::storage {

/// Append-only key-value contract. Backends know nothing about permissions;
/// I/O failures surface as StorageUnavailable.
class StorageBackend {
 public:
  virtual ~StorageBackend() = default;
  /// Returns false (and stores nothing) when the key already exists.
  virtual bool put_if_absent(const Digest256& key, ByteView value) = 0;
  virtual std::optional<Bytes> get(const Digest256& key) = 0;
  /// Keys starting with prefix, ascending.
  virtual std::vector<Digest256> scan_prefix(ByteView prefix) = 0;
};

class MemoryBackend final : public StorageBackend {
 public:
  bool put_if_absent(const Digest256& key, ByteView value) override;
  std::optional<Bytes> get(const Digest256& key) override;
  std::vector<Digest256> scan_prefix(ByteView prefix) override;
  std::size_t size() const;

 private:
  mutable std::shared_mutex mu_;
  std::map<Digest256, Bytes> data_;
};

/// One file per key under <root>/<first byte hex>/<key hex>. Writes go to a
/// temporary file that is fsynced and renamed into place.
class FileBackend final : public StorageBackend {
 public:
  explicit FileBackend(std::filesystem::path root);
  bool put_if_absent(const Digest256& key, ByteView value) override;
  std::optional<Bytes> get(const Digest256& key) override;
  std::vector<Digest256> scan_prefix(ByteView prefix) override;
  const std::filesystem::path& root() const { return root_; }

 private:
  std::filesystem::path path_for(const Digest256& key) const;

  std::filesystem::path root_;
  std::mutex write_mu_;
};

}  // namespace sv::storage
