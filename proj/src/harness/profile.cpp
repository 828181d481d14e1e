#include "streamvault/harness/profile.hpp"

#include <json.hpp>

#include "streamvault/common/error.hpp"
#include "streamvault/crypto/hash.hpp"

namespace sv::harness {

using nlohmann::ordered_json;

std::string Profile::to_json() const {
  ordered_json j;
  j["name"] = name;
  j["chain"] = {{"block_interval_ms", chain.block_interval_ms},
                {"confirmations", chain.confirmations},
                {"max_payloads_per_block", chain.max_payloads_per_block}};
  j["dht"] = {{"k_bucket", dht.k_bucket},
              {"alpha", dht.alpha},
              {"replicas", dht.replicas},
              {"sloppy_ttl_ms", dht.sloppy_ttl_ms},
              {"sloppy_caching", dht.sloppy_caching},
              {"rpc_timeout_ms", dht.rpc_timeout_ms},
              {"nodes", dht_nodes}};
  j["regions"] = {{"names", latency.regions},
                  {"inter_region_ms", latency.inter_region_ms},
                  {"intra_region_ms", latency.intra_region_ms}};
  j["chunk_delta_ms"] = chunk_delta_ms;
  j["checkpoint_interval"] = checkpoint_interval;
  j["codec"] = stream::codec_name(codec);
  return j.dump(2);
}

void Profile::apply_json(const std::string& text) {
  try {
    auto j = ordered_json::parse(text);
    if (j.contains("name")) name = j["name"].get<std::string>();
    if (j.contains("chain")) {
      const auto& c = j["chain"];
      if (c.contains("block_interval_ms")) chain.block_interval_ms = c["block_interval_ms"].get<std::int64_t>();
      if (c.contains("confirmations")) chain.confirmations = c["confirmations"].get<std::uint32_t>();
      if (c.contains("max_payloads_per_block"))
        chain.max_payloads_per_block = c["max_payloads_per_block"].get<std::size_t>();
    }
    if (j.contains("dht")) {
      const auto& d = j["dht"];
      if (d.contains("k_bucket")) dht.k_bucket = d["k_bucket"].get<std::size_t>();
      if (d.contains("alpha")) dht.alpha = d["alpha"].get<std::size_t>();
      if (d.contains("replicas")) dht.replicas = d["replicas"].get<std::size_t>();
      if (d.contains("sloppy_ttl_ms")) dht.sloppy_ttl_ms = d["sloppy_ttl_ms"].get<double>();
      if (d.contains("sloppy_caching")) dht.sloppy_caching = d["sloppy_caching"].get<bool>();
      if (d.contains("rpc_timeout_ms")) dht.rpc_timeout_ms = d["rpc_timeout_ms"].get<double>();
      if (d.contains("nodes")) dht_nodes = d["nodes"].get<std::size_t>();
    }
    if (j.contains("regions")) {
      const auto& r = j["regions"];
      if (r.contains("names")) latency.regions = r["names"].get<std::vector<std::string>>();
      if (r.contains("inter_region_ms"))
        latency.inter_region_ms = r["inter_region_ms"].get<std::vector<std::vector<double>>>();
      if (r.contains("intra_region_ms")) latency.intra_region_ms = r["intra_region_ms"].get<double>();
      latency.validate();
    }
    if (j.contains("chunk_delta_ms")) chunk_delta_ms = j["chunk_delta_ms"].get<std::int64_t>();
    if (j.contains("checkpoint_interval")) checkpoint_interval = j["checkpoint_interval"].get<std::uint32_t>();
    if (j.contains("codec")) {
      const auto c = j["codec"].get<std::string>();
      if (c == "stored") codec = stream::Codec::Stored;
      else if (c == "deflate") codec = stream::Codec::Deflate;
      else if (c == "lzma") codec = stream::Codec::Lzma;
      else throw Error(Errc::InvalidArgument, "unknown codec '" + c + "'");
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(Errc::InvalidArgument, std::string("profile config: ") + e.what());
  }
  if (chunk_delta_ms <= 0 || checkpoint_interval == 0 || chain.confirmations == 0)
    throw Error(Errc::InvalidArgument, "profile config: delta, checkpoint interval and confirmations must be positive");
}

std::string Profile::digest() const { return to_hex(crypto::sha256(as_bytes(to_json()))); }

Profile profile_by_name(const std::string& name) {
  Profile p;
  p.name = name;
  if (name == "default") return p;
  if (name == "test") {
    p.chain.confirmations = 1;
    p.dht_nodes = 64;
    p.chunk_delta_ms = 60'000;
    p.checkpoint_interval = 4;
    return p;
  }
  if (name == "bitcoin-like") {
    p.chain.block_interval_ms = 600'000;
    p.chain.confirmations = 6;
    return p;
  }
  throw Error(Errc::InvalidArgument, "unknown profile '" + name + "'");
}

std::vector<std::string> profile_names() { return {"default", "test", "bitcoin-like"}; }

}  // namespace sv::harness
