#pragma once

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <vector>

#include "streamvault/ledger/block.hpp"

namespace sv::ledger {

struct ChainConfig {
  std::int64_t block_interval_ms = 1000;
  std::uint32_t confirmations = 1;
  std::size_t max_payloads_per_block = 0;  // 0 = unlimited
};

/// What the state machine needs from an underlying blockchain. A client for
/// a real chain implements this; it must also define how deep a block has
/// to be before access decisions rely on it (confirmations()), since reorgs
/// are not handled above this interface.
class ChainAdapter {
 public:
  virtual ~ChainAdapter() = default;

  /// Throws LedgerUnavailable when the payload cannot be handed to the chain.
  virtual void broadcast(Bytes payload) = 0;
  virtual std::uint64_t tip_height() const = 0;
  virtual Block block_at(std::uint64_t height) const = 0;
  virtual std::uint32_t confirmations() const = 0;
};

/// Deterministic, fork-free block producer. Blocks are cut either
/// explicitly or every block_interval_ms of simulated time.
class SimulatedChain final : public ChainAdapter {
 public:
  explicit SimulatedChain(ChainConfig config = {});

  void broadcast(Bytes payload) override;
  std::uint64_t tip_height() const override;
  Block block_at(std::uint64_t height) const override;
  std::uint32_t confirmations() const override { return config_.confirmations; }

  /// Cuts a block from the mempool (possibly empty) and returns its height.
  std::uint64_t produce_block();
  /// Advances simulated time, cutting one block per elapsed interval.
  void advance_time(std::int64_t ms);
  std::int64_t now_ms() const;

  /// Appends an externally produced block; used to replay another chain.
  /// Throws HeightGap or Malformed if it does not link to the tip.
  void append_block(const Block& block);

  std::size_t mempool_size() const;
  void set_available(bool available);
  const ChainConfig& config() const { return config_; }

  void save(const std::filesystem::path& path) const;
  static std::unique_ptr<SimulatedChain> load(const std::filesystem::path& path, ChainConfig config);

 private:
  std::uint64_t produce_block_locked();

  ChainConfig config_;
  mutable std::mutex mu_;
  std::vector<Block> blocks_;
  std::vector<Bytes> mempool_;
  std::int64_t now_ms_ = 0;
  std::int64_t last_block_ms_ = 0;
  bool available_ = true;
};

}  // namespace sv::ledger
