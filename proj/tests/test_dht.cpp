#include <doctest.h>

#include <cmath>
#include <set>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"
#include "streamvault/dht/overlay.hpp"

using namespace sv;
using namespace sv::dht;

namespace {

Overlay make_overlay(std::size_t n, std::uint64_t seed, DhtParams params = {}) {
  Overlay o(params, LatencyModel::default_profile(), seed);
  for (std::size_t i = 0; i < n; ++i) o.join(static_cast<std::uint32_t>(i % o.latency().region_count()));
  return o;
}

NodeId key_id(int i) { return NodeId::from_key(crypto::sha256(as_bytes("key-" + std::to_string(i)))); }

}  // namespace

TEST_CASE("node id bits, prefixes and distance") {
  std::mt19937_64 rng(1);
  auto a = NodeId::random(rng);
  CHECK(NodeId::from_bytes(a.to_bytes()) == a);
  CHECK(a.hex().size() == 40);
  CHECK(common_prefix_length(a, a) == kIdBits);
  for (int p : {0, 1, 63, 64, 100, 159}) {
    auto b = random_id_with_prefix(a, p, rng);
    CHECK(common_prefix_length(a, b) == p);
  }
  auto b = NodeId::random(rng);
  CHECK(xor_distance(a, b) == xor_distance(b, a));
  CHECK(xor_distance(a, a) == NodeId{});
  CHECK_FALSE(closer(a, b, b));
  CHECK(closer(a, a, b));

  Digest256 k{};
  k[0] = 0x80;
  k[19] = 0x01;
  k[20] = 0xff;  // beyond 160 bits, ignored
  auto id = NodeId::from_key(k);
  CHECK(id.bit(0));
  CHECK(id.bit(159));
  CHECK_FALSE(id.bit(1));
}

TEST_CASE("routing table keeps live old contacts in full buckets") {
  std::mt19937_64 rng(2);
  auto self = NodeId::random(rng);
  RoutingTable t(self, 2);
  std::set<NodeId> dead;
  auto alive = [&](const NodeId& id) { return !dead.count(id); };
  auto p1 = random_id_with_prefix(self, 0, rng);
  auto p2 = random_id_with_prefix(self, 0, rng);
  auto p3 = random_id_with_prefix(self, 0, rng);
  CHECK(t.observe(p1, alive));
  CHECK(t.observe(p2, alive));
  CHECK_FALSE(t.observe(p3, alive));
  // The refused attempt refreshed p1, so p2 is now the eviction candidate.
  CHECK(t.bucket(0).front() == p2);
  dead.insert(p2);
  CHECK(t.observe(p3, alive));
  CHECK_FALSE(t.contains(p2));
  CHECK(t.contains(p1));
  CHECK(t.bucket_index(p3) == 0);
  CHECK(t.size() == 2);

  // closest() agrees with sorting everything by distance.
  RoutingTable big(self, 20);
  std::vector<NodeId> all;
  for (int i = 0; i < 200; ++i) {
    auto id = NodeId::random(rng);
    if (big.observe(id, alive)) all.push_back(id);
  }
  auto target = NodeId::random(rng);
  std::sort(all.begin(), all.end(), [&](auto& x, auto& y) { return closer(target, x, y); });
  all.resize(10);
  CHECK(big.closest(target, 10) == all);
}

TEST_CASE("lookups agree with brute force and stay within the hop bound") {
  for (std::size_t n : {16u, 64u, 256u}) {
    auto o = make_overlay(n, 10 + n);
    const auto bound = static_cast<std::size_t>(std::ceil(std::log2(static_cast<double>(n)))) + 3;
    std::mt19937_64 rng(n);
    for (int i = 0; i < 100; ++i) {
      auto target = NodeId::random(rng);
      auto from = *o.random_alive_node();
      auto r = o.find_closest(target, from);
      auto want = o.brute_force_closest(target, o.params().k_bucket);
      CHECK(r.closest == want);
      CHECK(r.hops <= bound);
    }
  }
}

TEST_CASE("put places replicas on the closest nodes and get finds them") {
  auto o = make_overlay(128, 3);
  auto from = *o.random_alive_node();
  auto key = key_id(1);
  auto put = o.put(key, Bytes{1, 2, 3}, from);
  CHECK(put.replicas == o.brute_force_closest(key, 3));
  CHECK(o.holders(key).size() == 3);
  auto got = o.get(key, *o.random_alive_node());
  REQUIRE(got.value);
  CHECK(*got.value == Bytes{1, 2, 3});
  CHECK_THROWS_AS(o.get(key_id(2), from), Error);

  auto dead = *o.random_alive_node();
  o.fail(dead);
  CHECK_THROWS_AS(o.put(key_id(3), Bytes{}, dead), Error);
}

TEST_CASE("values survive failures after republish") {
  auto o = make_overlay(200, 4);
  for (int i = 0; i < 100; ++i) o.put(key_id(i), Bytes{static_cast<std::uint8_t>(i)}, *o.random_alive_node());

  // One replica gone: everything still readable even before republish.
  auto first = o.holders(key_id(0)).front();
  o.fail(first);
  CHECK(o.get(key_id(0), *o.random_alive_node()).value);

  for (int round = 0; round < 5; ++round) {
    for (int j = 0; j < 4; ++j) o.fail(*o.random_alive_node());
    o.republish();
  }
  for (int i = 0; i < 100; ++i) {
    CHECK(o.holders(key_id(i)).size() == 3);
    auto got = o.get(key_id(i), *o.random_alive_node());
    REQUIRE(got.value);
    CHECK((*got.value)[0] == i);
  }
}

TEST_CASE("graceful leave hands keys on") {
  auto o = make_overlay(64, 5);
  auto key = key_id(7);
  o.put(key, Bytes{7}, *o.random_alive_node());
  for (auto h : o.holders(key)) o.leave(h);
  auto holders = o.holders(key);
  CHECK(holders.size() >= 1);
  CHECK(o.get(key, *o.random_alive_node()).value);
}

TEST_CASE("newcomers take over keys they are now closest to") {
  auto o = make_overlay(64, 6);
  auto key = key_id(8);
  o.put(key, Bytes{8}, *o.random_alive_node());
  auto id = NodeId::from_key(crypto::sha256(as_bytes("key-8")));
  id.words[2] ^= 1ull << 32;  // differs only in the last bit
  auto h = o.join_with_id(id, 0);
  auto holders = o.holders(key);
  CHECK(std::find(holders.begin(), holders.end(), h) != holders.end());
}

TEST_CASE("sloppy caching serves repeat readers from their region") {
  auto o = make_overlay(200, 7);
  std::uint32_t far_region = 0;
  auto key = key_id(9);
  o.put(key, Bytes{9}, *o.random_alive_node());
  // Pick a region without a primary replica.
  std::set<std::uint32_t> primary;
  for (auto h : o.holders(key)) primary.insert(o.region(h));
  for (std::uint32_t r = 0; r < o.latency().region_count(); ++r)
    if (!primary.count(r)) far_region = r;
  REQUIRE_FALSE(primary.count(far_region));

  auto first = o.get(key, *o.random_alive_node(far_region));
  CHECK(first.cache_placed);
  CHECK_FALSE(first.region_hit);
  auto second = o.get(key, *o.random_alive_node(far_region));
  CHECK(second.region_hit);
  CHECK(second.from_cache);
  CHECK(second.latency_ms < first.latency_ms);

  // Cached copies expire.
  o.advance_time(o.params().sloppy_ttl_ms + 1);
  auto third = o.get(key, *o.random_alive_node(far_region));
  CHECK_FALSE(third.region_hit);

  o.set_sloppy_caching(false);
  auto plain = o.get(key, *o.random_alive_node(far_region));
  CHECK_FALSE(plain.from_cache);
  CHECK_FALSE(plain.cache_placed);
}

TEST_CASE("same seed, same overlay and same trace") {
  auto run = [](std::uint64_t seed) {
    Overlay o({}, LatencyModel::default_profile(), seed);
    o.set_tracing(true);
    for (int i = 0; i < 40; ++i) o.join(static_cast<std::uint32_t>(i % 4));
    o.put(key_id(1), Bytes{1}, 0);
    o.get(key_id(1), 5);
    return o.trace_csv();
  };
  auto a = run(11);
  CHECK(a == run(11));
  CHECK(a != run(12));
  CHECK(a.rfind("time_ms,node,peer,action,key,latency_ms\n", 0) == 0);
  CHECK(a.find(",STORE,") != std::string::npos);
  CHECK(a.find(",FIND_VALUE,") != std::string::npos);
}

TEST_CASE("latency model validation") {
  auto m = LatencyModel::default_profile();
  CHECK_NOTHROW(m.validate());
  CHECK(m.rtt(0, 0) == 2 * m.intra_region_ms);
  m.inter_region_ms[0][1] += 1;
  CHECK_THROWS_AS(m.validate(), Error);
  CHECK_THROWS_AS(LatencyModel::default_profile().region_index("mars"), Error);
}
