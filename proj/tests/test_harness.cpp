#include <doctest.h>

#include "streamvault/common/error.hpp"
#include "streamvault/harness/bench.hpp"
#include "streamvault/harness/profile.hpp"
#include "streamvault/harness/synthetic.hpp"

using namespace sv;
using namespace sv::harness;

TEST_CASE("synthetic series is seeded and plausible") {
  SyntheticParams p;
  p.count = 3600;
  auto a = generate_synthetic(p);
  CHECK(a == generate_synthetic(p));
  p.seed = 2;
  CHECK(a != generate_synthetic(p));
  REQUIRE(a.size() == 3600);
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].timestamp == static_cast<std::int64_t>(i) * 1000);
    CHECK(a[i].value.size() == 2);
    CHECK(synthetic_value(a[i]) > 30);
    CHECK(synthetic_value(a[i]) < 110);
  }
}

TEST_CASE("profiles round trip through json and have distinct digests") {
  for (const auto& name : profile_names()) {
    auto p = profile_by_name(name);
    Profile q;
    q.apply_json(p.to_json());
    CHECK(q.to_json() == p.to_json());
    CHECK(q.digest() == p.digest());
  }
  CHECK(profile_by_name("default").digest() != profile_by_name("test").digest());
  CHECK(profile_by_name("bitcoin-like").chain.confirmations == 6);
  auto p = profile_by_name("default");
  p.apply_json(R"({"dht": {"nodes": 10}})");
  CHECK(p.dht_nodes == 10);
  CHECK_THROWS_AS(p.apply_json("[1,2"), Error);
  CHECK_THROWS_AS(profile_by_name("nope"), Error);
}

TEST_CASE("compression report is reproducible and labelled") {
  SyntheticParams p;
  p.count = 20'000;
  auto recs = generate_synthetic(p);
  CompressionOptions opt;
  opt.chunk_sizes = {64, 512, 4096};
  auto a = bench_compression(recs, opt, 1, "cfg");
  auto b = bench_compression(recs, opt, 1, "cfg");
  CHECK(a.csv() == b.csv());
  CHECK(a.csv().rfind("# experiment=compression config=cfg seed=1\n", 0) == 0);
  CHECK(a.rows.size() == 4);
  const double whole = a.number({"whole"}, "ratio");
  CHECK(whole == doctest::Approx(compression_ratio(recs, 0, opt.codec)));
  CHECK(a.number({"64"}, "ratio") < a.number({"4096"}, "ratio"));
  CHECK(a.number({"4096"}, "ratio") <= whole * 1.01);
  CHECK(compression_ratio(recs, 512, stream::Codec::Stored) == 1.0);
}

TEST_CASE("dht simulation is reproducible from the seed") {
  auto profile = profile_by_name("test");
  DhtSimOptions opt;
  opt.keys = 50;
  opt.lookups = 50;
  std::string trace;
  auto a = simulate_dht(profile, 3, opt, &trace);
  auto b = simulate_dht(profile, 3, opt);
  CHECK(a.reproducible_rows() == b.reproducible_rows());
  CHECK_FALSE(trace.empty());
  CHECK(a.number({"lookup", "max_hops"}, "value") <= a.number({"lookup", "hop_bound"}, "value"));
  CHECK(a.number({"churn", "retrievable_fraction"}, "value") >= 0.9);
}

TEST_CASE("overhead benchmark produces both throughputs") {
  auto profile = profile_by_name("test");
  OverheadOptions opt;
  opt.gets = 200;
  opt.chunks = 20;
  opt.repeats = 1;
  opt.dht_samples = 10;
  auto r = bench_access_overhead(profile, 4, opt);
  CHECK(r.check_throughput > 0);
  CHECK(r.nocheck_throughput > 0);
  CHECK(r.dht_latency_ms > r.local_latency_ms);
  CHECK_FALSE(r.report.rows.empty());
}
