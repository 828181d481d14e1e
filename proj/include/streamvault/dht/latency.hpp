#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace sv::dht {

/// Region-to-region one-way latencies. Every simulated message pays
/// one_way(sender region, receiver region) in each direction.
struct LatencyModel {
  std::vector<std::string> regions;
  std::vector<std::vector<double>> inter_region_ms;  // square, symmetric
  double intra_region_ms = 2.0;

  double one_way(std::uint32_t a, std::uint32_t b) const {
    return a == b ? intra_region_ms : inter_region_ms[a][b];
  }
  double rtt(std::uint32_t a, std::uint32_t b) const { return 2.0 * one_way(a, b); }
  std::uint32_t region_count() const { return static_cast<std::uint32_t>(regions.size()); }
  std::uint32_t region_index(const std::string& name) const;

  /// Throws InvalidArgument unless square, symmetric and non-negative.
  void validate() const;

  /// Four regions with intercontinental one-way delays between 40 and
  /// 160 ms and 2 ms inside a region.
  static LatencyModel default_profile();
};

}  // namespace sv::dht
