#include "streamvault/ledger/chain.hpp"

#include <fstream>
#include <iterator>

#include "streamvault/common/error.hpp"

namespace sv::ledger {

SimulatedChain::SimulatedChain(ChainConfig config) : config_(config) {
  if (config_.confirmations == 0) throw Error(Errc::InvalidArgument, "confirmations must be at least 1");
  blocks_.push_back(genesis_block());
}

void SimulatedChain::broadcast(Bytes payload) {
  std::lock_guard lock(mu_);
  if (!available_) throw Error(Errc::LedgerUnavailable);
  mempool_.push_back(std::move(payload));
}

std::uint64_t SimulatedChain::tip_height() const {
  std::lock_guard lock(mu_);
  return blocks_.back().height;
}

Block SimulatedChain::block_at(std::uint64_t height) const {
  std::lock_guard lock(mu_);
  if (height >= blocks_.size()) throw Error(Errc::HeightGap, "no block at height " + std::to_string(height));
  return blocks_[height];
}

std::uint64_t SimulatedChain::produce_block() {
  std::lock_guard lock(mu_);
  return produce_block_locked();
}

std::uint64_t SimulatedChain::produce_block_locked() {
  Block b;
  b.height = blocks_.back().height + 1;
  b.prev_hash = blocks_.back().digest();
  b.timestamp_ms = now_ms_;
  const std::size_t take = config_.max_payloads_per_block == 0
                               ? mempool_.size()
                               : std::min(mempool_.size(), config_.max_payloads_per_block);
  b.payloads.assign(std::make_move_iterator(mempool_.begin()),
                    std::make_move_iterator(mempool_.begin() + static_cast<std::ptrdiff_t>(take)));
  mempool_.erase(mempool_.begin(), mempool_.begin() + static_cast<std::ptrdiff_t>(take));
  blocks_.push_back(std::move(b));
  last_block_ms_ = now_ms_;
  return blocks_.back().height;
}

void SimulatedChain::advance_time(std::int64_t ms) {
  std::lock_guard lock(mu_);
  const auto target = now_ms_ + ms;
  while (last_block_ms_ + config_.block_interval_ms <= target) {
    now_ms_ = last_block_ms_ + config_.block_interval_ms;
    produce_block_locked();
  }
  now_ms_ = target;
}

std::int64_t SimulatedChain::now_ms() const {
  std::lock_guard lock(mu_);
  return now_ms_;
}

void SimulatedChain::append_block(const Block& block) {
  std::lock_guard lock(mu_);
  if (block.height != blocks_.back().height + 1)
    throw Error(Errc::HeightGap, "block height " + std::to_string(block.height) + " does not extend tip");
  if (block.prev_hash != blocks_.back().digest()) throw Error(Errc::Malformed, "block does not link to tip");
  blocks_.push_back(block);
  now_ms_ = std::max(now_ms_, block.timestamp_ms);
  last_block_ms_ = block.timestamp_ms;
}

std::size_t SimulatedChain::mempool_size() const {
  std::lock_guard lock(mu_);
  return mempool_.size();
}

void SimulatedChain::set_available(bool available) {
  std::lock_guard lock(mu_);
  available_ = available;
}

void SimulatedChain::save(const std::filesystem::path& path) const {
  std::lock_guard lock(mu_);
  ByteWriter w;
  w.i64(now_ms_).u32(static_cast<std::uint32_t>(blocks_.size() - 1));
  for (std::size_t i = 1; i < blocks_.size(); ++i) w.var(blocks_[i].serialize());
  w.u32(static_cast<std::uint32_t>(mempool_.size()));
  for (const auto& p : mempool_) w.var(p);

  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::StorageUnavailable, "cannot write " + tmp);
    out.write(reinterpret_cast<const char*>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
    if (!out) throw Error(Errc::StorageUnavailable, "short write to " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::unique_ptr<SimulatedChain> SimulatedChain::load(const std::filesystem::path& path, ChainConfig config) {
  auto chain = std::make_unique<SimulatedChain>(config);
  std::ifstream in(path, std::ios::binary);
  if (!in) return chain;
  Bytes data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  ByteReader r(data);
  const auto now = r.i64();
  const auto n = r.u32();
  for (std::uint32_t i = 0; i < n; ++i) chain->append_block(Block::parse(r.var()));
  const auto pending = r.u32();
  for (std::uint32_t i = 0; i < pending; ++i) {
    auto p = r.var();
    chain->mempool_.emplace_back(p.begin(), p.end());
  }
  r.expect_done();
  chain->now_ms_ = now;
  return chain;
}

}  // namespace sv::ledger
