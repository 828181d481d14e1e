#include "streamvault/harness/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

namespace sv::harness {

std::vector<stream::DataRecord> generate_synthetic(const SyntheticParams& p) {
  std::mt19937_64 rng(p.seed);
  std::normal_distribution<double> step(0.0, p.walk_sigma);
  constexpr double kDayMs = 86'400'000.0;

  std::vector<stream::DataRecord> out;
  out.reserve(p.count);
  double walk = 0;
  for (std::size_t i = 0; i < p.count; ++i) {
    const auto ts = p.start_ms + static_cast<std::int64_t>(i) * p.period_ms;
    walk += -p.reversion * walk + step(rng);
    const double phase = 2.0 * std::numbers::pi * static_cast<double>(ts % static_cast<std::int64_t>(kDayMs)) / kDayMs;
    const double v = p.baseline + p.diurnal_amplitude * std::sin(phase) + walk;
    const auto q = static_cast<std::uint16_t>(std::clamp(std::lround(v * 10.0), 0L, 65535L));
    out.push_back({ts, Bytes{static_cast<std::uint8_t>(q >> 8), static_cast<std::uint8_t>(q & 0xff)}});
  }
  return out;
}

double synthetic_value(const stream::DataRecord& record) {
  if (record.value.size() != 2) return 0;
  return static_cast<double>((record.value[0] << 8) | record.value[1]) / 10.0;
}

}  // namespace sv::harness
