#include <doctest.h>

#include <sstream>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/gateway/fifo_cache.hpp"
#include "streamvault/gateway/gateway.hpp"
#include "streamvault/gateway/reader.hpp"
#include "streamvault/gateway/text_io.hpp"
#include "streamvault/storage/objects.hpp"
#include "support.hpp"

using namespace sv;
using namespace sv::gateway;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

Bytes value_of(std::int64_t t) {
  return {static_cast<std::uint8_t>(t >> 8), static_cast<std::uint8_t>(t)};
}

struct Service {
  crypto::SigningKey identity;
  crypto::PreKeyPair pre;
  crypto::ServiceKey key() const { return {identity.id(), pre.public_key}; }
  Reader reader() const { return Reader::for_service(identity, pre); }
};

/// Gateway wired to one storage node through a message-counting transport.
struct Rig {
  explicit Rig(std::uint64_t seed = 9)
      : w(seed), transport(w.node), remote(transport), owner(w.key()), gw(owner, remote, w.ledger, w.rng) {}

  Digest256 stream(StreamConfig cfg) {
    auto id = gw.register_stream(cfg);
    w.confirm();
    gw.pump();
    return id;
  }

  StreamConfig minute_config() {
    StreamConfig c;
    c.label = "s";
    c.t0 = 0;
    c.delta = 60'000;
    c.checkpoint_interval = 10;
    return c;
  }

  /// One record per second in [from, to).
  void feed(const Digest256& id, std::int64_t from, std::int64_t to) {
    for (auto t = from; t < to; t += 1000) gw.ingest(id, {t, value_of(t)});
  }

  Service service() { return {w.key(), crypto::pre_keygen(w.rng)}; }

  std::vector<stream::SealedChunk> stored_chunks(const Digest256& id) {
    std::vector<stream::SealedChunk> out;
    for (auto index : gw.sealed_indices(id))
      out.push_back(stream::SealedChunk::parse(
          storage::authenticated_get(w.node, stream::chunk_key(gw.meta(id), index), id, owner)));
    return out;
  }

  test::World w;
  storage::InProcessTransport transport;
  storage::RemoteStorage remote;
  crypto::SigningKey owner;
  Gateway gw;
};

}  // namespace

TEST_CASE("fifo cache evicts only acknowledged chunks, oldest first") {
  DeterministicRandom rng(1);
  auto owner = crypto::SigningKey::generate(rng);
  stream::StreamMeta meta{{}, owner.id(), 0, 10, 0, 1};
  crypto::StreamKey key{0, rng.bytes<32>()};
  FifoCache cache(2);
  for (std::int64_t i = 0; i < 4; ++i) {
    std::vector<stream::DataRecord> r{{i * 10, {1}}};
    cache.push(stream::build_chunk(meta, r, {}, key, owner));
  }
  CHECK(cache.size() == 4);  // nothing acknowledged yet
  cache.mark_acked(1);
  CHECK(cache.size() == 4);  // the head is still unacknowledged
  cache.mark_acked(0);
  CHECK(cache.indices() == std::vector<std::uint64_t>{2, 3});
  CHECK(cache.evictions() == 2);
  CHECK(cache.find(1) == nullptr);
  CHECK(cache.unacked().size() == 2);
}

TEST_CASE("records are grouped into windows and chunks chain") {
  Rig r;
  auto id = r.stream(r.minute_config());
  r.feed(id, 0, 600'000);
  // A window seals once the watermark is two windows past its end.
  CHECK(r.gw.sealed_indices(id) == std::vector<std::uint64_t>{0, 1, 2, 3, 4, 5, 6});
  CHECK(r.gw.flush(id) == 3);
  auto chunks = r.stored_chunks(id);
  REQUIRE(chunks.size() == 10);
  CHECK(chunks[0].header.prev_chunk_hash == Digest256{});
  for (std::size_t i = 0; i < chunks.size(); ++i) {
    CHECK(chunks[i].header.record_count == 60);
    CHECK(chunks[i].header.start_ts == static_cast<std::int64_t>(i) * 60'000);
  }
  CHECK(stream::verify_chain(chunks, chunks.back().digest()));
  CHECK(r.gw.pending_pushes(id) == 0);

  auto all = r.gw.query(id, 0, 600'000).records;
  REQUIRE(all.size() == 600);
  for (std::size_t i = 0; i < all.size(); ++i) CHECK(all[i] == stream::DataRecord{static_cast<std::int64_t>(i) * 1000, value_of(static_cast<std::int64_t>(i) * 1000)});
  auto part = r.gw.query(id, 90'500, 130'000).records;
  CHECK(part.size() == 39);
  CHECK(part.front().timestamp == 91'000);
}

TEST_CASE("late, duplicate and early records are refused") {
  Rig r;
  auto cfg = r.minute_config();
  cfg.t0 = 1'000'000;
  auto id = r.stream(cfg);
  CHECK(code_of([&] { r.gw.ingest(id, {0, {1}}); }) == Errc::BeforeStreamStart);
  r.gw.ingest(id, {1'000'000, {1}});
  CHECK(code_of([&] { r.gw.ingest(id, {1'000'000, {2}}); }) == Errc::InvalidArgument);
  // Out of order inside the lateness bound is fine.
  r.gw.ingest(id, {1'100'000, {1}});
  r.gw.ingest(id, {1'030'000, {1}});
  r.gw.ingest(id, {1'300'000, {1}});  // seals windows 0 and 1
  CHECK(r.gw.sealed_indices(id).size() == 2);
  CHECK(code_of([&] { r.gw.ingest(id, {1'050'000, {1}}); }) == Errc::LateRecord);
  CHECK(code_of([&] { r.gw.ingest(id, {1'179'000, {1}}); }) == Errc::LateRecord);
  CHECK(code_of([&] { r.gw.ingest(id, {1'000'000, Bytes(70'000, 0)}); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { r.gw.ingest(Digest256{}, {1'000'000, {1}}); }) == Errc::UnknownStream);
}

TEST_CASE("a checkpoint is submitted after every tenth chunk") {
  Rig r;
  auto id = r.stream(r.minute_config());
  for (int i = 0; i < 9; ++i) {
    r.gw.ingest(id, {i * 60'000, {1}});
    r.gw.flush(id);
  }
  CHECK(r.w.chain.mempool_size() == 0);
  CHECK(r.gw.unanchored(id) == 9);
  r.gw.ingest(id, {9 * 60'000, {1}});
  r.gw.flush(id);
  CHECK(r.w.chain.mempool_size() == 1);
  r.w.confirm();
  auto anchor = ledger::latest_anchor(*r.w.ledger.snapshot(), id);
  REQUIRE(anchor);
  CHECK(anchor->chunk_index == 9);
  CHECK(anchor->chunk_digest == r.stored_chunks(id).back().digest());
  CHECK(r.gw.unanchored(id) == 0);

  // Ledger outage: the checkpoint waits and goes out on the next tick.
  r.w.chain.set_available(false);
  for (int i = 10; i < 20; ++i) {
    r.gw.ingest(id, {i * 60'000, {1}});
    r.gw.flush(id);
  }
  CHECK(r.w.chain.mempool_size() == 0);
  r.w.chain.set_available(true);
  r.gw.pump();
  r.w.confirm();
  CHECK(ledger::latest_anchor(*r.w.ledger.snapshot(), id)->chunk_index == 19);
}

TEST_CASE("tampering with any stored chunk is detected against the anchor") {
  Rig r;
  auto id = r.stream(r.minute_config());
  r.feed(id, 0, 600'000);
  r.gw.flush(id);
  r.w.confirm();
  auto chunks = r.stored_chunks(id);
  const auto anchor = ledger::latest_anchor(*r.w.ledger.snapshot(), id)->chunk_digest;
  REQUIRE(stream::verify_chain(chunks, anchor));
  auto key = r.gw.keys(id).current_key();
  for (std::size_t c = 0; c < chunks.size(); c += 3) {
    auto raw = chunks[c].serialize();
    for (std::size_t pos : {std::size_t{5}, std::size_t{60}, raw.size() / 2, raw.size() - 1}) {
      auto bad = raw;
      bad[pos] ^= 0x01;
      bool detected = false;
      try {
        auto parsed = stream::SealedChunk::parse(bad);
        auto copy = chunks;
        copy[c] = parsed;
        if (!stream::verify_chain(copy, anchor)) detected = true;
        stream::open_chunk(parsed, key, r.owner.public_key());
      } catch (const Error&) {
        detected = true;
      }
      CHECK_MESSAGE(detected, "chunk " << c << " byte " << pos);
    }
  }
  // Dropping or reordering chunks breaks the chain as well.
  auto dropped = chunks;
  dropped.erase(dropped.begin() + 4);
  CHECK_FALSE(stream::verify_chain(dropped, anchor));
  auto swapped = chunks;
  std::swap(swapped[2], swapped[3]);
  CHECK_FALSE(stream::verify_chain(swapped, anchor));
}

TEST_CASE("cached and stored reads return identical records") {
  Rig r;
  auto cfg = r.minute_config();
  cfg.cache_capacity = 4;
  auto id = r.stream(cfg);
  r.feed(id, 0, 600'000);
  r.gw.flush(id);
  CHECK(r.gw.cache(id).size() == 4);
  auto plan = r.gw.plan(id, 0, 600'000);
  REQUIRE(plan.chunks.size() == 10);
  CHECK(plan.chunks.front().source == ChunkSource::Storage);
  CHECK(plan.chunks.back().source == ChunkSource::Cache);

  auto via_gateway = r.gw.query(id, 0, 600'000).records;
  auto owner = r.gw.owner_reader(id);
  auto via_storage = owner.query(r.w.node, r.gw.meta(id), r.owner.public_key(), 0, 600'000);
  CHECK(via_gateway == via_storage);

  // A range inside the cache touches no storage node.
  r.transport.reset_messages();
  auto recent = r.gw.query(id, 360'000, 600'000);
  CHECK(recent.records.size() == 240);
  CHECK(r.transport.messages() == 0);
  r.gw.query(id, 0, 60'000);
  CHECK(r.transport.messages() == 2);  // challenge + get
}

TEST_CASE("chunks sealed before registration confirms are pushed later") {
  Rig r;
  auto id = r.gw.register_stream(r.minute_config());
  r.feed(id, 0, 300'000);
  r.gw.flush(id);
  CHECK(r.gw.pending_pushes(id) == 1 + 5);
  r.w.confirm();
  CHECK(r.gw.pump() == 6);
  CHECK(r.gw.pending_pushes(id) == 0);
  CHECK(r.stored_chunks(id).size() == 5);
}

TEST_CASE("grants and revocation control who can read which epochs") {
  Rig r;
  auto id = r.stream(r.minute_config());
  auto s1 = r.service(), s2 = r.service(), s3 = r.service();
  for (auto* s : {&s1, &s2, &s3}) r.gw.grant(id, s->key());
  r.w.confirm();
  r.feed(id, 0, 300'000);
  r.gw.flush(id);

  auto r1 = s1.reader(), r2 = s2.reader(), r3 = s3.reader();
  for (auto* rd : {&r1, &r2, &r3}) CHECK(r.gw.query(id, 0, 300'000, *rd).records.size() == 300);
  CHECK(code_of([&] { r.gw.grant(id, s1.key()); }) == Errc::InvalidArgument);

  r.gw.revoke(id, s2.identity.id());
  r.w.confirm();
  CHECK(r.gw.keys(id).epoch() == 1);
  r.feed(id, 300'000, 600'000);
  r.gw.flush(id);

  auto fresh1 = s1.reader(), fresh3 = s3.reader();
  CHECK(r.gw.query(id, 0, 600'000, fresh1).records.size() == 600);
  CHECK(r.gw.query(id, 0, 600'000, fresh3).records.size() == 600);
  CHECK(code_of([&] { r.gw.query(id, 0, 600'000, r2); }) == Errc::PermissionDenied);
  CHECK(code_of([&] {
          authenticated_get(r.w.node, stream::chunk_key(r.gw.meta(id), 0), id, s2.identity);
        }) == Errc::PermissionDenied);

  // Even a node that ignores the ledger cannot give S2 the new epoch's key.
  r.w.node.set_enforcement(storage::EnforcementMode::None);
  auto leaked_new = stream::SealedChunk::parse(
      authenticated_get(r.w.node, stream::chunk_key(r.gw.meta(id), 7), id, s2.identity));
  CHECK(leaked_new.header.epoch == 1);
  auto again2 = s2.reader();
  CHECK(code_of([&] { again2.open(leaked_new, r.owner.public_key(), r.w.node); }) == Errc::MissingKeyEpoch);
  // Data from before the revocation stays readable with the old key.
  auto leaked_old = stream::SealedChunk::parse(
      authenticated_get(r.w.node, stream::chunk_key(r.gw.meta(id), 1), id, s2.identity));
  CHECK(r2.open(leaked_old, r.owner.public_key(), r.w.node).size() == 60);
  r.w.node.set_enforcement(storage::EnforcementMode::Full);

  CHECK(code_of([&] { r.gw.revoke(id, s2.identity.id()); }) == Errc::NotCurrentlyGranted);
  // Re-granting restores access to the current epoch.
  r.gw.grant(id, s2.key());
  r.w.confirm();
  auto back2 = s2.reader();
  CHECK(r.gw.query(id, 0, 600'000, back2).records.size() == 600);
}

TEST_CASE("periodic rotation: queries straddle epochs") {
  Rig r;
  auto cfg = r.minute_config();
  cfg.rotate_every_chunks = 3;
  auto id = r.stream(cfg);
  auto s = r.service();
  r.gw.grant(id, s.key());
  r.w.confirm();
  r.feed(id, 0, 600'000);
  r.gw.flush(id);
  auto chunks = r.stored_chunks(id);
  CHECK(chunks[0].header.epoch == 0);
  CHECK(chunks[3].header.epoch == 1);
  CHECK(chunks[9].header.epoch == 3);
  auto reader = s.reader();
  CHECK(r.gw.query(id, 0, 600'000, reader).records.size() == 600);
  CHECK(reader.member_state(id)->epoch == 3);
  // An unwinding reader needs no further storage round trips for old epochs.
  r.transport.reset_messages();
  auto direct = reader.query(r.remote, r.gw.meta(id), r.owner.public_key(), 0, 120'000);
  CHECK(direct.size() == 120);
  CHECK(r.transport.messages() == 4);  // two chunks, challenge + get each
}

TEST_CASE("gateway state survives export and import") {
  Rig r;
  auto id = r.stream(r.minute_config());
  auto s = r.service();
  r.gw.grant(id, s.key());
  r.feed(id, 0, 250'000);
  auto saved = r.gw.export_state();

  Gateway again(r.owner, r.remote, r.w.ledger, r.w.rng);
  again.import_state(saved);
  CHECK(again.export_state() == saved);
  for (std::int64_t t = 250'000; t < 600'000; t += 1000) again.ingest(id, {t, value_of(t)});
  again.flush(id);
  r.w.confirm();
  again.pump();
  std::vector<stream::SealedChunk> chunks;
  for (auto index : again.sealed_indices(id))
    chunks.push_back(stream::SealedChunk::parse(
        storage::authenticated_get(r.w.node, stream::chunk_key(again.meta(id), index), id, r.owner)));
  CHECK(chunks.size() == 10);
  CHECK(stream::verify_chain(chunks, chunks.back().digest()));
  auto all = again.query(id, 0, 600'000).records;
  CHECK(all.size() == 600);

  Gateway stranger(r.w.key(), r.remote, r.w.ledger, r.w.rng);
  CHECK(code_of([&] { stranger.import_state(saved); }) == Errc::InvalidArgument);
  CHECK(code_of([&] { stranger.import_state("{"); }) == Errc::Malformed);
}

TEST_CASE("text record formats") {
  std::istringstream csv("timestamp,value\n1000,21.5\n2000,a,b\n");
  auto recs = read_records(csv, TextFormat::Csv);
  REQUIRE(recs.size() == 2);
  CHECK(recs[1].timestamp == 2000);
  CHECK(std::string(recs[1].value.begin(), recs[1].value.end()) == "a,b");
  std::ostringstream out;
  write_records(out, recs, TextFormat::Ndjson);
  std::istringstream nd(out.str());
  CHECK(read_records(nd, TextFormat::Ndjson) == recs);
  std::istringstream bad("1000,1\nnope\n");
  CHECK(code_of([&] { read_records(bad, TextFormat::Csv); }) == Errc::Malformed);
  CHECK(code_of([&] { parse_text_format("xml"); }) == Errc::InvalidArgument);
  CHECK(parse_text_format("ndjson") == TextFormat::Ndjson);
}
