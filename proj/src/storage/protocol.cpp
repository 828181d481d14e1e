#include "streamvault/storage/protocol.hpp"

#include <unistd.h>

#include <cerrno>
#include <cstring>

#include "streamvault/common/error.hpp"

namespace sv::storage {

namespace {

void write_challenge(ByteWriter& w, const Challenge& c) {
  w.raw(c.node_id);
  w.raw(c.nonce);
  w.i64(c.issued_ms);
}

Challenge read_challenge(ByteReader& r) {
  Challenge c;
  c.node_id = r.fixed<32>();
  c.nonce = r.fixed<16>();
  c.issued_ms = r.i64();
  return c;
}

Bytes ok(ByteView body = {}) {
  Bytes out{0};
  out.insert(out.end(), body.begin(), body.end());
  return out;
}

Bytes failure(Errc code, const std::string& message) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(code));
  w.var(as_bytes(message));
  return w.take();
}

}  // namespace

Bytes encode_challenge_request() { return Bytes{static_cast<std::uint8_t>(Verb::Challenge)}; }

Bytes encode_put_request(const PutRequest& request) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Verb::Put));
  w.raw(request.key);
  w.raw(request.stream_id);
  w.raw(request.writer);
  w.raw(request.signature);
  w.var(request.value);
  return w.take();
}

Bytes encode_get_request(const GetRequest& request) {
  ByteWriter w;
  w.u8(static_cast<std::uint8_t>(Verb::Get));
  w.raw(request.key);
  w.raw(request.stream_id);
  w.raw(request.requester);
  write_challenge(w, request.challenge);
  w.raw(request.signature);
  return w.take();
}

Bytes handle_request(StorageService& service, ByteView request) {
  try {
    ByteReader r(request);
    switch (static_cast<Verb>(r.u8())) {
      case Verb::Challenge: {
        r.expect_done();
        ByteWriter w;
        write_challenge(w, service.challenge());
        return ok(w.bytes());
      }
      case Verb::Put: {
        PutRequest req;
        req.key = r.fixed<32>();
        req.stream_id = r.fixed<32>();
        req.writer = r.fixed<32>();
        req.signature = r.fixed<64>();
        auto value = r.var(kMaxFrameSize);
        req.value.assign(value.begin(), value.end());
        r.expect_done();
        service.put(req);
        return ok();
      }
      case Verb::Get: {
        GetRequest req;
        req.key = r.fixed<32>();
        req.stream_id = r.fixed<32>();
        req.requester = r.fixed<32>();
        req.challenge = read_challenge(r);
        req.signature = r.fixed<64>();
        r.expect_done();
        auto value = service.get(req);
        ByteWriter w;
        w.var(value);
        return ok(w.bytes());
      }
    }
    return failure(Errc::Malformed, "unknown verb");
  } catch (const Error& e) {
    return failure(e.code(), e.what());
  }
}

Bytes InProcessTransport::roundtrip(ByteView request) {
  ++messages_;
  return handle_request(server_, request);
}

void write_frame(int fd, ByteView body) {
  ByteWriter w;
  w.u32(static_cast<std::uint32_t>(body.size()));
  w.raw(body);
  const auto& out = w.bytes();
  std::size_t done = 0;
  while (done < out.size()) {
    auto n = ::write(fd, out.data() + done, out.size() - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::StorageUnavailable, std::string("write failed: ") + std::strerror(errno));
    }
    done += static_cast<std::size_t>(n);
  }
}

namespace {

// Returns bytes read; short only at EOF.
std::size_t read_fully(int fd, std::uint8_t* out, std::size_t len) {
  std::size_t done = 0;
  while (done < len) {
    auto n = ::read(fd, out + done, len - done);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw Error(Errc::StorageUnavailable, std::string("read failed: ") + std::strerror(errno));
    }
    if (n == 0) break;
    done += static_cast<std::size_t>(n);
  }
  return done;
}

}  // namespace

bool read_frame(int fd, Bytes& body) {
  std::uint8_t len_bytes[4];
  auto got = read_fully(fd, len_bytes, 4);
  if (got == 0) return false;
  if (got < 4) throw Error(Errc::StorageUnavailable, "connection closed inside a frame");
  const std::uint32_t len = (std::uint32_t{len_bytes[0]} << 24) | (std::uint32_t{len_bytes[1]} << 16) |
                            (std::uint32_t{len_bytes[2]} << 8) | std::uint32_t{len_bytes[3]};
  if (len > kMaxFrameSize) throw Error(Errc::Malformed, "frame too large");
  body.resize(len);
  if (read_fully(fd, body.data(), len) != len) throw Error(Errc::StorageUnavailable, "connection closed inside a frame");
  return true;
}

Bytes FdTransport::roundtrip(ByteView request) {
  write_frame(write_fd_, request);
  Bytes response;
  if (!read_frame(read_fd_, response)) throw Error(Errc::StorageUnavailable, "connection closed by node");
  return response;
}

void serve_connection(StorageService& service, int fd) {
  Bytes request;
  while (read_frame(fd, request)) write_frame(fd, handle_request(service, request));
}

Bytes RemoteStorage::call(ByteView request) {
  auto response = transport_.roundtrip(request);
  ByteReader r(response);
  const auto status = r.u8();
  if (status != 0) {
    auto message = r.var();
    throw Error(static_cast<Errc>(status), std::string(message.begin(), message.end()));
  }
  auto rest = r.raw(r.remaining());
  return Bytes(rest.begin(), rest.end());
}

Challenge RemoteStorage::challenge() {
  auto body = call(encode_challenge_request());
  ByteReader r(body);
  auto c = read_challenge(r);
  r.expect_done();
  return c;
}

void RemoteStorage::put(const PutRequest& request) { call(encode_put_request(request)); }

Bytes RemoteStorage::get(const GetRequest& request) {
  auto body = call(encode_get_request(request));
  ByteReader r(body);
  auto value = r.var(kMaxFrameSize);
  r.expect_done();
  return Bytes(value.begin(), value.end());
}

}  // namespace sv::storage
