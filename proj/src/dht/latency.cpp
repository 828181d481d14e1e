#include "streamvault/dht/latency.hpp"

#include "streamvault/common/error.hpp"

namespace sv::dht {

std::uint32_t LatencyModel::region_index(const std::string& name) const {
  for (std::size_t i = 0; i < regions.size(); ++i)
    if (regions[i] == name) return static_cast<std::uint32_t>(i);
  throw Error(Errc::InvalidArgument, "unknown region '" + name + "'");
}

void LatencyModel::validate() const {
  if (regions.empty()) throw Error(Errc::InvalidArgument, "latency model has no regions");
  if (intra_region_ms < 0) throw Error(Errc::InvalidArgument, "negative intra-region latency");
  if (inter_region_ms.size() != regions.size())
    throw Error(Errc::InvalidArgument, "latency matrix row count does not match regions");
  for (std::size_t i = 0; i < regions.size(); ++i) {
    if (inter_region_ms[i].size() != regions.size())
      throw Error(Errc::InvalidArgument, "latency matrix is not square");
    for (std::size_t j = 0; j < regions.size(); ++j) {
      if (inter_region_ms[i][j] < 0) throw Error(Errc::InvalidArgument, "negative latency");
      if (inter_region_ms[i][j] != inter_region_ms[j][i])
        throw Error(Errc::InvalidArgument, "latency matrix is not symmetric");
    }
  }
}

LatencyModel LatencyModel::default_profile() {
  LatencyModel m;
  m.regions = {"eu-west", "us-east", "asia-east", "sa-east"};
  m.inter_region_ms = {
      {0, 40, 110, 95},
      {40, 0, 90, 60},
      {110, 90, 0, 160},
      {95, 60, 160, 0},
  };
  m.intra_region_ms = 2.0;
  return m;
}

}  // namespace sv::dht
