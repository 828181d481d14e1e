#include "streamvault/storage/objects.hpp"

#include <algorithm>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/stream/chunk.hpp"

namespace sv::storage {

Digest256 keymat_key(const Digest256& stream_id, std::uint32_t epoch, const Digest256& grantee_id) {
  ByteWriter w;
  w.u8(crypto::domain::kKeyMaterial);
  w.raw(stream_id);
  w.u32(epoch);
  w.raw(grantee_id);
  return crypto::sha256(w.bytes());
}

Bytes KeyEnvelope::serialize() const {
  ByteWriter w;
  w.raw(kEnvelopeMagic);
  w.raw(stream_id);
  w.u32(publication.epoch);
  w.u32(publication.onetime_epoch);
  w.raw(publication.wrapped.serialize());
  return w.take();
}

KeyEnvelope KeyEnvelope::parse(ByteView data) {
  ByteReader r(data);
  if (r.fixed<4>() != kEnvelopeMagic) throw Error(Errc::Malformed, "not a key envelope");
  KeyEnvelope out;
  out.stream_id = r.fixed<32>();
  out.publication.epoch = r.u32();
  out.publication.onetime_epoch = r.u32();
  out.publication.wrapped = crypto::WrappedKey::parse(r.raw(crypto::WrappedKey::kSerializedSize));
  r.expect_done();
  return out;
}

Bytes TokenShareObject::serialize() const {
  ByteWriter w;
  w.raw(kShareMagic);
  w.raw(stream_id);
  w.raw(grantee_id);
  w.u32(onetime_epoch);
  w.raw(share.serialize());
  return w.take();
}

TokenShareObject TokenShareObject::parse(ByteView data) {
  ByteReader r(data);
  if (r.fixed<4>() != kShareMagic) throw Error(Errc::Malformed, "not a token share object");
  TokenShareObject out;
  out.stream_id = r.fixed<32>();
  out.grantee_id = r.fixed<32>();
  out.onetime_epoch = r.u32();
  out.share = crypto::TokenShare::parse(r.raw(crypto::TokenShare::kSerializedSize));
  r.expect_done();
  return out;
}

ObjectInfo peek_object(ByteView value) {
  auto magic_is = [&](const std::array<std::uint8_t, 4>& m) {
    return value.size() >= 4 && std::equal(m.begin(), m.end(), value.begin());
  };
  ByteReader r(value);
  ObjectInfo info;
  if (magic_is(stream::kChunkMagic)) {
    r.fixed<5>();
    info.kind = ObjectKind::Chunk;
    info.stream_id = r.fixed<32>();
  } else if (magic_is(kEnvelopeMagic)) {
    r.fixed<4>();
    info.kind = ObjectKind::KeyEnvelope;
    info.stream_id = r.fixed<32>();
  } else if (magic_is(kShareMagic)) {
    r.fixed<4>();
    info.kind = ObjectKind::TokenShare;
    info.stream_id = r.fixed<32>();
    info.grantee = r.fixed<32>();
  } else {
    throw Error(Errc::Malformed, "unrecognized object type");
  }
  return info;
}

}  // namespace sv::storage
