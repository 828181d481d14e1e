#include "streamvault/storage/backend.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <cstring>
#include <fstream>
#include <mutex>

#include "streamvault/common/error.hpp"

namespace sv::storage {

namespace fs = std::filesystem;

namespace {

bool has_prefix(const Digest256& key, ByteView prefix) {
  return prefix.size() <= key.size() && std::equal(prefix.begin(), prefix.end(), key.begin());
}

[[noreturn]] void io_failure(const std::string& what) {
  throw Error(Errc::StorageUnavailable, what + ": " + std::strerror(errno));
}

}  // namespace

bool MemoryBackend::put_if_absent(const Digest256& key, ByteView value) {
  std::unique_lock lock(mu_);
  return data_.try_emplace(key, value.begin(), value.end()).second;
}

std::optional<Bytes> MemoryBackend::get(const Digest256& key) {
  std::shared_lock lock(mu_);
  auto it = data_.find(key);
  if (it == data_.end()) return std::nullopt;
  return it->second;
}

std::vector<Digest256> MemoryBackend::scan_prefix(ByteView prefix) {
  std::shared_lock lock(mu_);
  std::vector<Digest256> out;
  for (const auto& [key, value] : data_)
    if (has_prefix(key, prefix)) out.push_back(key);
  return out;
}

std::size_t MemoryBackend::size() const {
  std::shared_lock lock(mu_);
  return data_.size();
}

FileBackend::FileBackend(fs::path root) : root_(std::move(root)) {
  std::error_code ec;
  fs::create_directories(root_, ec);
  if (ec) throw Error(Errc::StorageUnavailable, "cannot create " + root_.string() + ": " + ec.message());
}

fs::path FileBackend::path_for(const Digest256& key) const {
  const auto hex = to_hex(key);
  return root_ / hex.substr(0, 2) / hex;
}

bool FileBackend::put_if_absent(const Digest256& key, ByteView value) {
  std::lock_guard lock(write_mu_);
  const auto target = path_for(key);
  if (fs::exists(target)) return false;
  std::error_code ec;
  fs::create_directories(target.parent_path(), ec);
  if (ec) throw Error(Errc::StorageUnavailable, "cannot create " + target.parent_path().string());

  const auto tmp = target.string() + ".tmp";
  int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC, 0644);
  if (fd < 0) io_failure("open " + tmp);
  std::size_t done = 0;
  while (done < value.size()) {
    auto n = ::write(fd, value.data() + done, value.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      ::close(fd);
      io_failure("write " + tmp);
    }
    done += static_cast<std::size_t>(n);
  }
  if (::fsync(fd) != 0) {
    ::close(fd);
    io_failure("fsync " + tmp);
  }
  ::close(fd);
  if (::rename(tmp.c_str(), target.c_str()) != 0) io_failure("rename " + tmp);
  return true;
}

std::optional<Bytes> FileBackend::get(const Digest256& key) {
  const auto path = path_for(key);
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    if (!fs::exists(path)) return std::nullopt;
    throw Error(Errc::StorageUnavailable, "cannot read " + path.string());
  }
  Bytes out((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(Errc::StorageUnavailable, "cannot read " + path.string());
  return out;
}

std::vector<Digest256> FileBackend::scan_prefix(ByteView prefix) {
  std::vector<Digest256> out;
  std::error_code ec;
  for (auto it = fs::recursive_directory_iterator(root_, ec); !ec && it != fs::recursive_directory_iterator();
       it.increment(ec)) {
    if (!it->is_regular_file()) continue;
    const auto name = it->path().filename().string();
    if (name.size() != 64) continue;
    try {
      auto key = fixed_from_hex<32>(name);
      if (has_prefix(key, prefix)) out.push_back(key);
    } catch (const Error&) {
    }
  }
  if (ec) throw Error(Errc::StorageUnavailable, "cannot scan " + root_.string() + ": " + ec.message());
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace sv::storage
