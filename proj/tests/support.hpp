#pragma once

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "streamvault/common/random.hpp"
#include "streamvault/crypto/signature.hpp"
#include "streamvault/ledger/ledger.hpp"
#include "streamvault/storage/backend.hpp"
#include "streamvault/storage/node.hpp"
#include "streamvault/storage/protocol.hpp"

namespace sv::test {

inline std::filesystem::path golden_path(const std::string& name) {
  return std::filesystem::path(SV_GOLDEN_DIR) / name;
}

/// Non-comment lines of a golden file, split on whitespace.
inline std::vector<std::vector<std::string>> golden_rows(const std::string& name) {
  std::ifstream in(golden_path(name));
  if (!in) throw std::runtime_error("missing golden file " + name);
  std::vector<std::vector<std::string>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream s(line);
    std::vector<std::string> row;
    for (std::string cell; s >> cell;) row.push_back(cell);
    rows.push_back(row);
  }
  return rows;
}

/// "key value" golden file as a map.
inline std::map<std::string, std::string> golden_fields(const std::string& name) {
  std::map<std::string, std::string> out;
  for (auto& row : golden_rows(name)) out[row.at(0)] = row.size() > 1 ? row[1] : "";
  return out;
}

/// Chain, ledger and one in-memory storage node, with a manual clock.
struct World {
  explicit World(std::uint64_t seed = 7, ledger::ChainConfig config = {})
      : rng(seed), chain(config), ledger(chain), node(node_config(), backend, ledger, [this] { return now_ms; }) {}

  static storage::NodeConfig node_config() {
    storage::NodeConfig c;
    c.node_id.fill(0x5a);
    return c;
  }

  /// Mines until everything broadcast so far is confirmed.
  void confirm() {
    for (std::uint32_t i = 0; i < chain.confirmations(); ++i) chain.produce_block();
    ledger.sync();
  }

  crypto::SigningKey key() { return crypto::SigningKey::generate(rng); }

  DeterministicRandom rng;
  ledger::SimulatedChain chain;
  ledger::Ledger ledger;
  storage::MemoryBackend backend;
  std::int64_t now_ms = 1'000'000;
  storage::StorageNode node;
};

/// Scratch directory removed on destruction.
struct TempDir {
  TempDir() {
    path = std::filesystem::temp_directory_path() /
           ("sv-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    std::filesystem::create_directories(path);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path, ec);
  }
  static int& counter() {
    static int n = 0;
    return n;
  }
  std::filesystem::path path;
};

}  // namespace sv::test
