#include <doctest.h>
#include <sys/socket.h>

#include <random>
#include <thread>

#include "history.hpp"
#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/crypto/key_distribution.hpp"
#include "streamvault/dht/overlay.hpp"
#include "streamvault/gateway/reader.hpp"
#include "streamvault/storage/dht_backend.hpp"
#include "streamvault/storage/objects.hpp"
#include "streamvault/stream/chunk.hpp"
#include "support.hpp"

using namespace sv;
using namespace sv::storage;

namespace {

Errc code_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return Errc{};
}

/// One registered stream with its owner, key chain and a few sealed chunks.
struct Fixture {
  explicit Fixture(std::uint64_t seed = 7) : w(seed), owner(w.key()), chain(64, w.rng.bytes<32>()) {
    reg = test::slot_registration(0);
    w.ledger.submit(ledger::make_register(owner, reg));
    w.confirm();
    meta.stream_id = ledger::derive_stream_id(owner.public_key(), reg);
    meta.owner_id = owner.id();
    meta.t0 = reg.t0;
    meta.delta = reg.delta;
  }

  stream::SealedChunk chunk(std::uint64_t index, std::uint32_t epoch = 0) {
    std::vector<stream::DataRecord> recs;
    const auto start = stream::chunk_start(meta, index);
    for (int i = 0; i < 5; ++i) recs.push_back({start + i * 100, Bytes{static_cast<std::uint8_t>(index), 1}});
    return stream::build_chunk(meta, recs, Digest256{}, chain.key(epoch), owner);
  }

  void put_chunk(std::uint64_t index) {
    w.node.put(make_put(stream::chunk_key(meta, index), meta.stream_id, chunk(index).serialize(), owner));
  }

  void grant(const crypto::SigningKey& who) {
    w.ledger.submit(ledger::make_grant(owner, meta.stream_id, {who.id(), {}}));
    w.confirm();
  }

  test::World w;
  crypto::SigningKey owner;
  crypto::KeyRegressionChain chain;
  ledger::RegisterPayload reg;
  stream::StreamMeta meta;
};

}  // namespace

TEST_CASE("memory and file backends are append-only") {
  test::TempDir dir;
  MemoryBackend mem;
  FileBackend file(dir.path);
  for (StorageBackend* b : {static_cast<StorageBackend*>(&mem), static_cast<StorageBackend*>(&file)}) {
    Digest256 k1{}, k2{};
    k1[0] = 0xab;
    k2[0] = 0xab;
    k2[1] = 1;
    CHECK(b->put_if_absent(k1, Bytes{1}));
    CHECK_FALSE(b->put_if_absent(k1, Bytes{2}));
    CHECK(b->get(k1) == Bytes{1});
    CHECK_FALSE(b->get(k2).has_value());
    CHECK(b->put_if_absent(k2, Bytes{}));
    CHECK(b->get(k2) == Bytes{});
    CHECK(b->scan_prefix(Bytes{0xab}) == std::vector<Digest256>{k1, k2});
    CHECK(b->scan_prefix(Bytes{0xab, 0x01}) == std::vector<Digest256>{k2});
    CHECK(b->scan_prefix(Bytes{0xac}).empty());
  }
  FileBackend reopened(dir.path);
  Digest256 k1{};
  k1[0] = 0xab;
  CHECK(reopened.get(k1) == Bytes{1});
}

TEST_CASE("file backend reports an unusable root as unavailable") {
  test::TempDir dir;
  std::ofstream(dir.path / "blocker") << "x";
  CHECK(code_of([&] { FileBackend b(dir.path / "blocker" / "sub"); b.put_if_absent(Digest256{}, Bytes{1}); }) ==
        Errc::StorageUnavailable);
}

TEST_CASE("dht backend stores through the overlay") {
  dht::Overlay o({}, dht::LatencyModel::default_profile(), 3);
  for (int i = 0; i < 32; ++i) o.join(static_cast<std::uint32_t>(i % 4));
  DhtBackend b(o, 0);
  auto k = crypto::sha256(as_bytes("a"));
  CHECK(b.put_if_absent(k, Bytes{1, 2}));
  CHECK_FALSE(b.put_if_absent(k, Bytes{3}));
  b.set_home(17);
  CHECK(b.get(k) == Bytes{1, 2});
  CHECK(b.last_get().hops >= 1);

  // Same leading 160 bits, different key: a miss, not foreign data.
  auto twin = k;
  twin[31] ^= 1;
  CHECK_FALSE(b.get(twin).has_value());
  CHECK_FALSE(b.get(crypto::sha256(as_bytes("b"))).has_value());
  CHECK(b.scan_prefix(Bytes{k[0]}) == std::vector<Digest256>{k});
}

TEST_CASE("puts are accepted from the registered owner only") {
  Fixture f;
  auto c = f.chunk(3);
  auto key = stream::chunk_key(f.meta, 3);
  auto stranger = f.w.key();
  CHECK(code_of([&] { f.w.node.put(make_put(key, f.meta.stream_id, c.serialize(), stranger)); }) ==
        Errc::NotStreamOwner);
  CHECK(code_of([&] { f.w.node.put(make_put(key, Digest256{}, c.serialize(), f.owner)); }) == Errc::UnknownStream);
  auto forged = make_put(key, f.meta.stream_id, c.serialize(), f.owner);
  forged.value.back() ^= 1;
  CHECK(code_of([&] { f.w.node.put(forged); }) == Errc::BadSignature);
  // Correctly signed request carrying a chunk under the wrong window key.
  CHECK(code_of([&] { f.w.node.put(make_put(stream::chunk_key(f.meta, 4), f.meta.stream_id, c.serialize(), f.owner)); }) ==
        Errc::InvalidArgument);
  CHECK(code_of([&] { f.w.node.put(make_put(key, f.meta.stream_id, Bytes{1, 2, 3}, f.owner)); }) == Errc::Malformed);

  f.w.node.put(make_put(key, f.meta.stream_id, c.serialize(), f.owner));
  f.w.node.put(make_put(key, f.meta.stream_id, c.serialize(), f.owner));  // idempotent
  auto other = f.chunk(3, 1);
  CHECK(code_of([&] { f.w.node.put(make_put(key, f.meta.stream_id, other.serialize(), f.owner)); }) ==
        Errc::KeyExists);

  NodeConfig small = test::World::node_config();
  small.max_value_size = 10;
  StorageNode tiny(small, f.w.backend, f.w.ledger, [] { return 0; });
  CHECK(code_of([&] { tiny.put(make_put(key, f.meta.stream_id, c.serialize(), f.owner)); }) == Errc::ValueTooLarge);
}

TEST_CASE("key material objects round trip and are keyed by epoch and grantee") {
  Fixture f;
  crypto::KeyDistributor dist(f.chain, f.w.rng);
  KeyEnvelope env{f.meta.stream_id, dist.publication()};
  auto env_bytes = env.serialize();
  CHECK(env_bytes.size() == 4 + 32 + 4 + 4 + 144);
  CHECK(KeyEnvelope::parse(env_bytes).serialize() == env_bytes);
  CHECK(env.storage_key() == keymat_key(f.meta.stream_id, 0, Digest256{}));

  auto svc = f.w.key();
  auto pre = crypto::pre_keygen(f.w.rng);
  auto issued = dist.grant({svc.id(), pre.public_key});
  TokenShareObject share{f.meta.stream_id, svc.id(), issued.onetime_epoch, issued.share};
  auto share_bytes = share.serialize();
  CHECK(share_bytes.size() == 4 + 32 + 32 + 4 + 176);
  CHECK(TokenShareObject::parse(share_bytes).serialize() == share_bytes);

  auto info = peek_object(share_bytes);
  CHECK(info.kind == ObjectKind::TokenShare);
  CHECK(info.grantee == svc.id());
  CHECK(peek_object(env_bytes).kind == ObjectKind::KeyEnvelope);
  CHECK(peek_object(f.chunk(0).serialize()).kind == ObjectKind::Chunk);
  CHECK(code_of([&] { peek_object(Bytes{'X', 'X'}); }) == Errc::Malformed);

  f.w.node.put(make_put(env.storage_key(), f.meta.stream_id, env_bytes, f.owner));
  f.w.node.put(make_put(share.storage_key(), f.meta.stream_id, share_bytes, f.owner));
  CHECK(code_of([&] { f.w.node.put(make_put(Digest256{}, f.meta.stream_id, env_bytes, f.owner)); }) ==
        Errc::InvalidArgument);

  // Token shares are readable by the grantee and the owner only.
  auto other = f.w.key();
  f.grant(svc);
  f.grant(other);
  CHECK(authenticated_get(f.w.node, share.storage_key(), f.meta.stream_id, svc) == share_bytes);
  CHECK(authenticated_get(f.w.node, share.storage_key(), f.meta.stream_id, f.owner) == share_bytes);
  CHECK(code_of([&] { authenticated_get(f.w.node, share.storage_key(), f.meta.stream_id, other); }) ==
        Errc::PermissionDenied);
  CHECK(authenticated_get(f.w.node, env.storage_key(), f.meta.stream_id, other) == env_bytes);
}

TEST_CASE("challenges are single use, bound to the node and expire") {
  Fixture f;
  f.put_chunk(0);
  const auto key = stream::chunk_key(f.meta, 0);
  auto c = f.w.node.challenge();
  auto req = make_get(c, key, f.meta.stream_id, f.owner);
  CHECK_FALSE(f.w.node.get(req).empty());
  CHECK(code_of([&] { f.w.node.get(req); }) == Errc::StaleChallenge);

  auto foreign = f.w.node.challenge();
  foreign.node_id[0] ^= 1;
  CHECK(code_of([&] { f.w.node.get(make_get(foreign, key, f.meta.stream_id, f.owner)); }) == Errc::StaleChallenge);

  auto old = f.w.node.challenge();
  f.w.now_ms += test::World::node_config().challenge_validity_ms + 1;
  CHECK(code_of([&] { f.w.node.get(make_get(old, key, f.meta.stream_id, f.owner)); }) == Errc::StaleChallenge);

  // A signature by someone else over the same challenge is rejected.
  auto c2 = f.w.node.challenge();
  auto stolen = make_get(c2, key, f.meta.stream_id, f.w.key());
  stolen.requester = f.owner.public_key();
  CHECK(code_of([&] { f.w.node.get(stolen); }) == Errc::BadSignature);

  // Another stream's id cannot be used to reach this key.
  auto mine = test::slot_registration(1);
  auto reader = f.w.key();
  f.w.ledger.submit(ledger::make_register(reader, mine));
  f.w.confirm();
  CHECK(code_of([&] {
          authenticated_get(f.w.node, key, ledger::derive_stream_id(reader.public_key(), mine), reader);
        }) == Errc::PermissionDenied);
}

TEST_CASE("every get decision matches the ledger and is logged once") {
  Fixture f(21);
  for (std::uint64_t i = 0; i < 4; ++i) f.put_chunk(i);
  std::vector<crypto::SigningKey> people;
  for (int i = 0; i < 5; ++i) people.push_back(f.w.key());
  std::map<Digest256, bool> granted;
  std::uint32_t epoch = 0;
  std::mt19937_64 rng(5);
  std::size_t gets = 0;
  for (int step = 0; step < 300; ++step) {
    auto& p = people[rng() % people.size()];
    const auto roll = rng() % 10;
    if (roll == 0 && !granted[p.id()]) {
      f.grant(p);
      granted[p.id()] = true;
    } else if (roll == 1 && granted[p.id()]) {
      f.w.ledger.submit(ledger::make_revoke(f.owner, f.meta.stream_id, {p.id(), ++epoch}));
      f.w.confirm();
      granted[p.id()] = false;
    } else {
      const bool as_owner = roll == 2;
      const auto& who = as_owner ? f.owner : p;
      const auto key = stream::chunk_key(f.meta, rng() % 5);  // index 4 was never stored
      const bool exists = key != stream::chunk_key(f.meta, 4);
      const bool allowed = as_owner || granted[who.id()];
      auto got = code_of([&] { authenticated_get(f.w.node, key, f.meta.stream_id, who); });
      ++gets;
      CHECK(got == (!allowed ? Errc::PermissionDenied : exists ? Errc{} : Errc::NotFound));
      auto d = f.w.node.decisions().back();
      CHECK(d.requester_id == who.id());
      CHECK(d.decision == (as_owner ? "owner" : allowed ? "granted" : "denied"));
      CHECK(d.height == f.w.ledger.confirmed_height());
    }
  }
  CHECK(f.w.node.decision_count() == gets);
}

TEST_CASE("node permission decisions follow random ledger histories") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    auto h = test::random_history(seed, 20, 80, 5, 1);
    ledger::SimulatedChain chain;
    for (const auto& b : test::chain_blocks(h)) chain.append_block(b);
    ledger::Ledger ledger(chain);
    MemoryBackend backend;
    StorageNode node(test::World::node_config(), backend, ledger, [] { return 0; });
    test::PermissionOracle oracle(h);
    if (!oracle.registered(0)) continue;
    const auto height = chain.tip_height();
    // A key-envelope-shaped object is enough to reach the permission check.
    Bytes value(188, 0);
    std::copy(kEnvelopeMagic.begin(), kEnvelopeMagic.end(), value.begin());
    std::copy(h.stream_ids[0].begin(), h.stream_ids[0].end(), value.begin() + 4);
    backend.put_if_absent(Digest256{}, value);
    for (int p = 0; p < 5; ++p) {
      auto want = oracle.at(0, p, height);
      auto got = code_of([&] { authenticated_get(node, Digest256{}, h.stream_ids[0], h.principals[p]); });
      CHECK(got == (want == test::PermissionOracle::Answer::Denied ? Errc::PermissionDenied : Errc{}));
    }
  }
}

TEST_CASE("a node that skips enforcement leaks only ciphertext") {
  Fixture f;
  crypto::KeyDistributor dist(f.chain, f.w.rng);
  KeyEnvelope env{f.meta.stream_id, dist.publication()};
  f.w.node.put(make_put(env.storage_key(), f.meta.stream_id, env.serialize(), f.owner));
  auto svc = f.w.key();
  auto svc_pre = crypto::pre_keygen(f.w.rng);
  auto issued = dist.grant({svc.id(), svc_pre.public_key});
  TokenShareObject share{f.meta.stream_id, svc.id(), issued.onetime_epoch, issued.share};
  f.w.node.put(make_put(share.storage_key(), f.meta.stream_id, share.serialize(), f.owner));
  f.put_chunk(0);

  f.w.node.set_enforcement(EnforcementMode::None);
  auto thief = f.w.key();
  auto raw = authenticated_get(f.w.node, stream::chunk_key(f.meta, 0), f.meta.stream_id, thief);
  auto chunk = stream::SealedChunk::parse(raw);
  auto reader = gateway::Reader::for_service(thief, crypto::pre_keygen(f.w.rng));
  CHECK_THROWS_AS(reader.open(chunk, f.owner.public_key(), f.w.node), Error);
  CHECK(f.w.node.decisions().back().decision == "unchecked");

  // The legitimate grantee, by contrast, decrypts.
  f.w.node.set_enforcement(EnforcementMode::Full);
  f.grant(svc);
  auto grantee = gateway::Reader::for_service(svc, svc_pre);
  CHECK(grantee.open(chunk, f.owner.public_key(), f.w.node).size() == 5);
}

TEST_CASE("protocol round trips in process and over a socket") {
  Fixture f;
  InProcessTransport local(f.w.node);
  RemoteStorage remote(local);
  const auto key = stream::chunk_key(f.meta, 2);
  const auto value = f.chunk(2).serialize();
  remote.put(make_put(key, f.meta.stream_id, value, f.owner));
  CHECK(authenticated_get(remote, key, f.meta.stream_id, f.owner) == value);
  CHECK(local.messages() == 3);
  auto stranger = f.w.key();
  CHECK(code_of([&] { authenticated_get(remote, key, f.meta.stream_id, stranger); }) == Errc::PermissionDenied);
  CHECK(code_of([&] { remote.put(make_put(key, f.meta.stream_id, value, stranger)); }) == Errc::NotStreamOwner);

  auto junk = handle_request(f.w.node, Bytes{0x7f});
  CHECK(junk.at(0) != 0);
  auto truncated = encode_get_request(make_get(f.w.node.challenge(), key, f.meta.stream_id, f.owner));
  truncated.pop_back();
  CHECK(handle_request(f.w.node, truncated).at(0) != 0);

  int fds[2];
  REQUIRE(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) == 0);
  std::thread server([&] { serve_connection(f.w.node, fds[1]); });
  {
    FdTransport wire(fds[0], fds[0]);
    RemoteStorage over_socket(wire);
    CHECK(authenticated_get(over_socket, key, f.meta.stream_id, f.owner) == value);
    CHECK(code_of([&] { authenticated_get(over_socket, stream::chunk_key(f.meta, 9), f.meta.stream_id, f.owner); }) ==
          Errc::NotFound);
  }
  ::shutdown(fds[0], SHUT_RDWR);
  server.join();
  ::close(fds[0]);
  ::close(fds[1]);
}

TEST_CASE("concurrent readers see consistent decisions") {
  Fixture f;
  f.put_chunk(0);
  auto reader = f.w.key();
  f.grant(reader);
  const auto key = stream::chunk_key(f.meta, 0);
  std::atomic<int> ok{0};
  std::vector<std::thread> threads;
  for (int t = 0; t < 4; ++t)
    threads.emplace_back([&] {
      for (int i = 0; i < 25; ++i)
        if (!authenticated_get(f.w.node, key, f.meta.stream_id, reader).empty()) ++ok;
    });
  for (auto& t : threads) t.join();
  CHECK(ok == 100);
  CHECK(f.w.node.decision_count() == 100);
}

TEST_CASE("key material storage keys match the independent oracle") {
  const auto stream_id = crypto::sha256(as_bytes("golden-stream"));
  auto rows = test::golden_rows("keymat_keys.txt");
  REQUIRE(rows.size() == 3);
  for (const auto& row : rows)
    CHECK(to_hex(keymat_key(stream_id, static_cast<std::uint32_t>(std::stoul(row[0])), fixed_from_hex<32>(row[1]))) ==
          row[2]);
}
