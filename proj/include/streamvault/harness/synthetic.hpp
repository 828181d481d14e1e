#pragma once

#include <cstdint>
#include <vector>

#include "streamvault/stream/record.hpp"

namespace sv::harness {

/// Wearable-like series: a diurnal sine around a baseline plus a
/// mean-reverting random walk, quantized to tenths and stored as a 2-byte
/// big-endian value.
struct SyntheticParams {
  std::int64_t start_ms = 0;
  std::int64_t period_ms = 1000;
  std::size_t count = 86'400;
  double baseline = 70.0;
  double diurnal_amplitude = 12.0;
  double walk_sigma = 0.4;
  double reversion = 0.05;
  std::uint64_t seed = 1;
};

std::vector<stream::DataRecord> generate_synthetic(const SyntheticParams& params);

/// Inverse of the value encoding above.
double synthetic_value(const stream::DataRecord& record);

}  // namespace sv::harness
