#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "streamvault/harness/profile.hpp"
#include "streamvault/stream/record.hpp"

namespace sv::harness {

/// Rows of one experiment. The "measure" column marks how a row was
/// obtained: exact and simulated rows are reproducible from the seed,
/// wallclock rows are not.
struct BenchReport {
  std::string experiment;
  std::string config_digest;
  std::uint64_t seed = 0;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  std::string csv() const;
  std::string text() const;
  /// Rows whose measure is not wallclock.
  std::vector<std::vector<std::string>> reproducible_rows() const;
  /// First row whose leading cells equal key, value of column.
  double number(const std::vector<std::string>& key, const std::string& column) const;
};

struct CompressionOptions {
  std::vector<std::size_t> chunk_sizes = {64, 128, 256, 512, 1024, 2048, 4096, 8192};
  stream::Codec codec = stream::Codec::Lzma;
};

/// Ratio = encoded record bytes / codec output bytes, summed over all
/// chunks of each size, plus a "whole" row that compresses the dataset in
/// one block (the oracle bound).
BenchReport bench_compression(std::span<const stream::DataRecord> records, const CompressionOptions& options,
                              std::uint64_t seed, const std::string& config_digest);

/// Compression ratio for one chunk size; chunk_size 0 means one block.
double compression_ratio(std::span<const stream::DataRecord> records, std::size_t chunk_size, stream::Codec codec);

struct OverheadOptions {
  std::size_t gets = 10'000;
  std::size_t chunks = 1'000;
  std::size_t records_per_chunk = 60;
  std::size_t repeats = 3;       // best of n per mode, modes interleaved
  std::size_t dht_samples = 200;  // keys probed in the DHT part
};

struct OverheadResult {
  double check_throughput = 0;    // gets/s with the ledger check
  double nocheck_throughput = 0;  // gets/s, authentication only
  double local_latency_ms = 0;
  double dht_latency_ms = 0;
  double dht_locality_latency_ms = 0;
  double dht_mean_hops = 0;
  BenchReport report;

  double throughput_ratio() const { return check_throughput / nocheck_throughput; }
};

OverheadResult bench_access_overhead(const Profile& profile, std::uint64_t seed, const OverheadOptions& options);

struct DhtSimOptions {
  std::size_t keys = 500;
  std::size_t lookups = 1'000;
  double churn_fraction = 0.2;
};

/// Builds an overlay of profile.dht_nodes nodes, stores keys, measures
/// lookups, then fails churn_fraction of the nodes, republishes and
/// measures retrievability.
BenchReport simulate_dht(const Profile& profile, std::uint64_t seed, const DhtSimOptions& options,
                         std::string* trace_csv = nullptr);

}  // namespace sv::harness
