#pragma once

#include <atomic>
#include <cstdint>

#include "streamvault/common/bytes.hpp"
#include "streamvault/storage/node.hpp"

namespace sv::storage {

// Node protocol. Every message is a frame: u32 big-endian length, then that
// many bytes. A request frame starts with a verb byte:
//
//   0x01 CHALLENGE  (no body)
//   0x02 PUT        key 32 | stream_id 32 | writer pk 32 | signature 64 | value (u32 len + bytes)
//   0x03 GET        key 32 | stream_id 32 | requester pk 32 |
//                   challenge(node_id 32 | nonce 16 | issued_ms i64) | signature 64
//
// A response frame starts with a status byte: 0 for success, otherwise the
// numeric error code, followed by a u32-length UTF-8 message. Success bodies:
//
//   CHALLENGE  node_id 32 | nonce 16 | issued_ms i64
//   PUT        (empty)
//   GET        value (u32 len + bytes)
enum class Verb : std::uint8_t { Challenge = 0x01, Put = 0x02, Get = 0x03 };

inline constexpr std::size_t kMaxFrameSize = kDefaultMaxValueSize + 1024;

Bytes encode_challenge_request();
Bytes encode_put_request(const PutRequest& request);
Bytes encode_get_request(const GetRequest& request);

/// Decodes one request, runs it against service and encodes the response.
/// Service errors become error responses; malformed requests too.
Bytes handle_request(StorageService& service, ByteView request);

class Transport {
 public:
  virtual ~Transport() = default;
  virtual Bytes roundtrip(ByteView request) = 0;
};

/// Hands encoded requests straight to a local service. Counts messages so
/// tests can assert that a path never touched storage.
class InProcessTransport final : public Transport {
 public:
  explicit InProcessTransport(StorageService& server) : server_(server) {}
  Bytes roundtrip(ByteView request) override;
  std::size_t messages() const { return messages_.load(); }
  void reset_messages() { messages_ = 0; }

 private:
  StorageService& server_;
  std::atomic<std::size_t> messages_{0};
};

/// Frames over a connected stream socket or pipe pair.
class FdTransport final : public Transport {
 public:
  FdTransport(int read_fd, int write_fd) : read_fd_(read_fd), write_fd_(write_fd) {}
  Bytes roundtrip(ByteView request) override;

 private:
  int read_fd_;
  int write_fd_;
};

/// StorageService that encodes every call and sends it through a transport.
class RemoteStorage final : public StorageService {
 public:
  explicit RemoteStorage(Transport& transport) : transport_(transport) {}
  Challenge challenge() override;
  void put(const PutRequest& request) override;
  Bytes get(const GetRequest& request) override;

 private:
  // Returns the success body; rethrows error responses as sv::Error.
  Bytes call(ByteView request);
  Transport& transport_;
};

void write_frame(int fd, ByteView body);
/// Returns false on clean EOF before the length prefix.
bool read_frame(int fd, Bytes& body);

/// Serves requests on fd until the peer closes it.
void serve_connection(StorageService& service, int fd);

}  // namespace sv::storage
