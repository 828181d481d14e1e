#include "streamvault/harness/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <random>
#include <sstream>

#include "streamvault/common/error.hpp"
#include "streamvault/common/random.hpp"
#include "streamvault/dht/overlay.hpp"
#include "streamvault/harness/synthetic.hpp"
#include "streamvault/ledger/ledger.hpp"
#include "streamvault/storage/backend.hpp"
#include "streamvault/storage/node.hpp"
#include "streamvault/stream/chunk.hpp"

namespace sv::harness {

namespace {

std::string fmt(double v, int precision = 4) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(precision) << v;
  return out.str();
}

std::size_t measure_column(const BenchReport& r) {
  auto it = std::find(r.columns.begin(), r.columns.end(), "measure");
  return static_cast<std::size_t>(it - r.columns.begin());
}

}  // namespace

std::string BenchReport::csv() const {
  std::ostringstream out;
  out << "# experiment=" << experiment << " config=" << config_digest << " seed=" << seed << '\n';
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
  return out.str();
}

std::string BenchReport::text() const {
  std::vector<std::size_t> width(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) width[i] = columns[i].size();
  for (const auto& row : rows)
    for (std::size_t i = 0; i < row.size() && i < width.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream out;
  out << experiment << " (seed " << seed << ", config " << config_digest.substr(0, 12) << ")\n";
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << std::setw(static_cast<int>(width[i]) + 2) << cells[i];
    out << '\n';
  };
  line(columns);
  for (const auto& row : rows) line(row);
  return out.str();
}

std::vector<std::vector<std::string>> BenchReport::reproducible_rows() const {
  const auto m = measure_column(*this);
  std::vector<std::vector<std::string>> out;
  for (const auto& row : rows)
    if (m >= row.size() || row[m] != "wallclock") out.push_back(row);
  return out;
}

double BenchReport::number(const std::vector<std::string>& key, const std::string& column) const {
  auto col = std::find(columns.begin(), columns.end(), column);
  if (col == columns.end()) throw Error(Errc::InvalidArgument, "no column " + column);
  const auto c = static_cast<std::size_t>(col - columns.begin());
  for (const auto& row : rows)
    if (row.size() >= key.size() && std::equal(key.begin(), key.end(), row.begin())) return std::stod(row[c]);
  throw Error(Errc::NotFound, "no matching row in " + experiment);
}

double compression_ratio(std::span<const stream::DataRecord> records, std::size_t chunk_size, stream::Codec codec) {
  if (records.empty()) return 0;
  if (chunk_size == 0) chunk_size = records.size();
  std::size_t raw = 0;
  std::size_t packed = 0;
  for (std::size_t off = 0; off < records.size(); off += chunk_size) {
    auto part = records.subspan(off, std::min(chunk_size, records.size() - off));
    auto block = stream::encode_records(part);
    raw += block.size();
    packed += stream::compress(block, codec).size();
  }
  return static_cast<double>(raw) / static_cast<double>(packed);
}

BenchReport bench_compression(std::span<const stream::DataRecord> records, const CompressionOptions& options,
                              std::uint64_t seed, const std::string& config_digest) {
  BenchReport report{"compression", config_digest, seed,
                     {"chunk_size", "chunks", "raw_bytes", "compressed_bytes", "ratio", "measure"}, {}};
  auto add_row = [&](const std::string& label, std::size_t chunk_size) {
    const auto size = chunk_size == 0 ? records.size() : chunk_size;
    std::size_t raw = 0;
    std::size_t packed = 0;
    std::size_t chunks = 0;
    for (std::size_t off = 0; off < records.size(); off += size, ++chunks) {
      auto block = stream::encode_records(records.subspan(off, std::min(size, records.size() - off)));
      raw += block.size();
      packed += stream::compress(block, options.codec).size();
    }
    report.rows.push_back({label, std::to_string(chunks), std::to_string(raw), std::to_string(packed),
                           fmt(static_cast<double>(raw) / static_cast<double>(packed)), "exact"});
  };
  for (auto size : options.chunk_sizes) add_row(std::to_string(size), size);
  add_row("whole", 0);
  return report;
}

OverheadResult bench_access_overhead(const Profile& profile, std::uint64_t seed, const OverheadOptions& options) {
  using clock = std::chrono::steady_clock;
  DeterministicRandom rng(seed);
  OverheadResult result;
  result.report = {"access_overhead", profile.digest(), seed,
                   {"scenario", "backend", "operations", "metric", "value", "measure"}, {}};
  auto& rows = result.report.rows;

  // Ledger with one stream and one granted reader.
  ledger::SimulatedChain chain(profile.chain);
  ledger::Ledger ledger(chain);
  auto owner = crypto::SigningKey::generate(rng);
  auto reader = crypto::SigningKey::generate(rng);
  ledger::RegisterPayload reg{0, profile.chunk_delta_ms, profile.checkpoint_interval, 1024, {}};
  auto reg_tx = ledger::make_register(owner, reg);
  ledger.submit(reg_tx);
  chain.produce_block();
  ledger.submit(ledger::make_grant(owner, reg_tx.stream_id, {reader.id(), {}}));
  for (std::uint32_t i = 0; i < profile.chain.confirmations; ++i) chain.produce_block();

  stream::StreamMeta meta{reg_tx.stream_id, owner.id(), 0, profile.chunk_delta_ms, 0, profile.checkpoint_interval};
  crypto::KeyRegressionChain keys(16, rng.bytes<32>());
  storage::MemoryBackend backend;
  storage::StorageNode node({rng.bytes<32>()}, backend, ledger);

  auto data = generate_synthetic({0, profile.chunk_delta_ms / static_cast<std::int64_t>(options.records_per_chunk),
                                  options.chunks * options.records_per_chunk, 70, 12, 0.4, 0.05, seed});
  std::vector<Digest256> chunk_keys;
  Digest256 prev{};
  for (std::size_t c = 0; c < options.chunks; ++c) {
    std::span<const stream::DataRecord> part(data.data() + c * options.records_per_chunk, options.records_per_chunk);
    auto chunk = stream::build_chunk(meta, part, prev, keys.key(0), owner, {profile.codec});
    prev = chunk.digest();
    const auto key = stream::chunk_key(meta, c);
    node.put(storage::make_put(key, meta.stream_id, chunk.serialize(), owner));
    chunk_keys.push_back(key);
  }

  std::mt19937_64 pick(seed);
  std::uniform_int_distribution<std::size_t> any_chunk(0, chunk_keys.size() - 1);
  std::vector<std::size_t> workload(options.gets);
  for (auto& w : workload) w = any_chunk(pick);

  // Requests are issued and signed up front so only node-side work is timed.
  auto run = [&](storage::EnforcementMode mode) {
    node.set_enforcement(mode);
    std::vector<storage::GetRequest> requests;
    requests.reserve(workload.size());
    for (auto w : workload)
      requests.push_back(storage::make_get(node.challenge(), chunk_keys[w], meta.stream_id, reader));
    node.clear_decisions();
    const auto start = clock::now();
    std::size_t bytes = 0;
    for (const auto& req : requests) bytes += node.get(req).size();
    const std::chrono::duration<double> elapsed = clock::now() - start;
    if (bytes == 0) throw Error(Errc::NotFound, "overhead workload read nothing");
    return static_cast<double>(requests.size()) / elapsed.count();
  };
  for (std::size_t r = 0; r < options.repeats; ++r) {
    result.check_throughput = std::max(result.check_throughput, run(storage::EnforcementMode::Full));
    result.nocheck_throughput = std::max(result.nocheck_throughput, run(storage::EnforcementMode::AuthenticateOnly));
  }
  node.set_enforcement(storage::EnforcementMode::Full);
  const auto ops = std::to_string(options.gets);
  rows.push_back({"ledger_check", "local", ops, "gets_per_s", fmt(result.check_throughput, 1), "wallclock"});
  rows.push_back({"no_check", "local", ops, "gets_per_s", fmt(result.nocheck_throughput, 1), "wallclock"});
  rows.push_back({"check_vs_nocheck", "local", ops, "throughput_ratio", fmt(result.throughput_ratio()), "wallclock"});

  // Simulated latency: a reader next to its storage node versus the same
  // reads through the overlay, without and with locality replicas.
  const auto& lat = profile.latency;
  dht::Overlay overlay(profile.dht, lat, seed);
  overlay.set_sloppy_caching(false);
  for (std::size_t i = 0; i < profile.dht_nodes; ++i) overlay.join(static_cast<std::uint32_t>(i % lat.region_count()));
  std::vector<dht::NodeId> ids;
  for (std::size_t i = 0; i < options.dht_samples; ++i) {
    const auto& key = chunk_keys[i % chunk_keys.size()];
    ids.push_back(dht::NodeId::from_key(key));
    overlay.put(ids.back(), *backend.get(key), *overlay.random_alive_node());
  }
  result.local_latency_ms = lat.rtt(0, 0);

  double plain = 0;
  double hops = 0;
  for (const auto& id : ids) {
    auto got = overlay.get(id, *overlay.random_alive_node());
    plain += got.latency_ms;
    hops += static_cast<double>(got.hops);
  }
  result.dht_latency_ms = plain / static_cast<double>(ids.size());
  result.dht_mean_hops = hops / static_cast<double>(ids.size());

  overlay.set_sloppy_caching(true);
  double repeat = 0;
  for (const auto& id : ids) {
    const auto region = static_cast<std::uint32_t>(pick() % lat.region_count());
    overlay.get(id, *overlay.random_alive_node(region));
    repeat += overlay.get(id, *overlay.random_alive_node(region)).latency_ms;
  }
  result.dht_locality_latency_ms = repeat / static_cast<double>(ids.size());

  const auto samples = std::to_string(ids.size());
  rows.push_back({"get_latency", "local", samples, "mean_ms", fmt(result.local_latency_ms, 3), "simulated"});
  rows.push_back({"get_latency", "dht", samples, "mean_ms", fmt(result.dht_latency_ms, 3), "simulated"});
  rows.push_back({"get_latency", "dht_locality_repeat", samples, "mean_ms", fmt(result.dht_locality_latency_ms, 3),
                  "simulated"});
  rows.push_back({"get_hops", "dht", samples, "mean_rounds", fmt(result.dht_mean_hops, 3), "simulated"});
  rows.push_back({"dht_vs_local", "dht", samples, "latency_ratio",
                  fmt(result.dht_latency_ms / result.local_latency_ms, 3), "simulated"});
  return result;
}

BenchReport simulate_dht(const Profile& profile, std::uint64_t seed, const DhtSimOptions& options,
                         std::string* trace_csv) {
  BenchReport report{"dht", profile.digest(), seed, {"phase", "metric", "value", "measure"}, {}};
  const auto& lat = profile.latency;
  dht::Overlay overlay(profile.dht, lat, seed);
  overlay.set_tracing(trace_csv != nullptr);
  for (std::size_t i = 0; i < profile.dht_nodes; ++i) overlay.join(static_cast<std::uint32_t>(i % lat.region_count()));

  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::vector<dht::NodeId> keys;
  for (std::size_t i = 0; i < options.keys; ++i) {
    keys.push_back(dht::NodeId::random(rng));
    overlay.put(keys.back(), Bytes{static_cast<std::uint8_t>(i)}, *overlay.random_alive_node());
  }

  std::size_t max_hops = 0;
  double hops = 0;
  double latency = 0;
  for (std::size_t i = 0; i < options.lookups; ++i) {
    auto r = overlay.find_closest(dht::NodeId::random(rng), *overlay.random_alive_node());
    max_hops = std::max(max_hops, r.hops);
    hops += static_cast<double>(r.hops);
    latency += r.latency_ms;
  }
  const auto n = static_cast<double>(options.lookups);
  report.rows.push_back({"lookup", "mean_hops", fmt(hops / n, 3), "simulated"});
  report.rows.push_back({"lookup", "max_hops", std::to_string(max_hops), "simulated"});
  report.rows.push_back({"lookup", "hop_bound", std::to_string(static_cast<int>(std::ceil(std::log2(
                                                    static_cast<double>(profile.dht_nodes)))) + 3),
                         "exact"});
  report.rows.push_back({"lookup", "mean_latency_ms", fmt(latency / n, 3), "simulated"});

  const auto failures = static_cast<std::size_t>(options.churn_fraction * static_cast<double>(profile.dht_nodes));
  for (std::size_t i = 0; i < failures; ++i) overlay.fail(*overlay.random_alive_node());
  const auto stores = overlay.republish();
  std::size_t found = 0;
  for (const auto& key : keys) {
    try {
      overlay.get(key, *overlay.random_alive_node());
      ++found;
    } catch (const Error& e) {
      if (e.code() != Errc::NotFound) throw;
    }
  }
  report.rows.push_back({"churn", "failed_nodes", std::to_string(failures), "exact"});
  report.rows.push_back({"churn", "republish_stores", std::to_string(stores), "simulated"});
  report.rows.push_back(
      {"churn", "retrievable_fraction", fmt(static_cast<double>(found) / static_cast<double>(keys.size())), "simulated"});
  if (trace_csv) *trace_csv = overlay.trace_csv();
  return report;
}

}  // namespace sv::harness
