#pragma once

// Random ledger histories and a straight-line permission oracle used by the
// ledger, storage and acceptance tests.

#include <map>
#include <optional>
#include <random>
#include <vector>

#include "streamvault/common/random.hpp"
#include "streamvault/ledger/block.hpp"
#include "streamvault/ledger/transaction.hpp"

namespace sv::test {

struct HistoryOp {
  enum Kind { Register, Grant, Revoke, Checkpoint, BadSignature, Malformed, Foreign } kind;
  int stream = 0;
  int issuer = 0;
  int grantee = 0;
  std::uint32_t epoch = 0;
  std::uint64_t chunk_index = 0;
};

struct History {
  std::vector<crypto::SigningKey> principals;
  std::vector<Digest256> stream_ids;             // slot s is owned by principal s
  std::vector<std::vector<Bytes>> blocks;        // payloads of heights 1..n
  std::vector<std::vector<HistoryOp>> ops;       // parallel to blocks
};

inline ledger::RegisterPayload slot_registration(int slot) {
  ledger::RegisterPayload reg;
  reg.t0 = 0;
  reg.delta = 1000;
  reg.checkpoint_interval = 4;
  reg.max_epochs = 64;
  reg.label.fill(static_cast<std::uint8_t>(slot + 1));
  return reg;
}

inline History random_history(std::uint64_t seed, std::size_t blocks, std::size_t txs, int principals = 5,
                              int streams = 2) {
  DeterministicRandom keys(seed);
  std::mt19937_64 rng(seed);
  History h;
  for (int i = 0; i < principals; ++i) h.principals.push_back(crypto::SigningKey::generate(keys));
  for (int s = 0; s < streams; ++s)
    h.stream_ids.push_back(ledger::derive_stream_id(h.principals[s].public_key(), slot_registration(s)));
  h.blocks.resize(blocks);
  h.ops.resize(blocks);

  auto pick = [&](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };
  for (std::size_t i = 0; i < txs; ++i) {
    // Registrations cluster early so most later operations have a target.
    const auto b = (i < txs / 20) ? static_cast<std::size_t>(pick(static_cast<int>(std::max<std::size_t>(1, blocks / 10))))
                                  : static_cast<std::size_t>(pick(static_cast<int>(blocks)));
    HistoryOp op{};
    op.stream = pick(streams);
    op.issuer = pick(5) == 0 ? pick(principals) : op.stream;
    op.grantee = pick(principals);
    const int roll = i < txs / 20 ? 0 : pick(100);
    if (roll < 8) op.kind = HistoryOp::Register;
    else if (roll < 50) op.kind = HistoryOp::Grant;
    else if (roll < 75) op.kind = HistoryOp::Revoke;
    else if (roll < 88) op.kind = HistoryOp::Checkpoint;
    else if (roll < 93) op.kind = HistoryOp::BadSignature;
    else if (roll < 97) op.kind = HistoryOp::Malformed;
    else op.kind = HistoryOp::Foreign;
    op.epoch = static_cast<std::uint32_t>(pick(12));
    op.chunk_index = static_cast<std::uint64_t>(pick(30));

    const auto& issuer = h.principals[op.issuer];
    const auto& sid = h.stream_ids[op.stream];
    const auto grantee = h.principals[op.grantee].id();
    Bytes raw;
    switch (op.kind) {
      case HistoryOp::Register:
        op.issuer = op.stream;
        raw = ledger::make_register(h.principals[op.stream], slot_registration(op.stream)).serialize();
        break;
      case HistoryOp::Grant:
        raw = ledger::make_grant(issuer, sid, {grantee, Digest256{}}).serialize();
        break;
      case HistoryOp::Revoke:
        raw = ledger::make_revoke(issuer, sid, {grantee, op.epoch}).serialize();
        break;
      case HistoryOp::Checkpoint:
        raw = ledger::make_checkpoint(issuer, sid, {op.chunk_index, Digest256{}}).serialize();
        break;
      case HistoryOp::BadSignature: {
        auto tx = ledger::make_grant(issuer, sid, {grantee, Digest256{}});
        tx.signature[5] ^= 0x40;
        raw = tx.serialize();
        break;
      }
      case HistoryOp::Malformed:
        raw = {'S', 'V', 'L', '1', 9, 9, 9};
        break;
      case HistoryOp::Foreign:
        raw = {'O', 'P', '_', 'R', 'E', 'T', 'U', 'R', 'N'};
        break;
    }
    h.blocks[b].push_back(std::move(raw));
    h.ops[b].push_back(op);
  }
  return h;
}

/// Permission semantics written as the plain rules: owner always; others
/// iff their latest accepted grant/revoke at or below the height is a grant.
class PermissionOracle {
 public:
  explicit PermissionOracle(const History& h) : h_(h) {
    for (std::size_t b = 0; b < h.blocks.size(); ++b)
      for (const auto& op : h.ops[b]) apply(op, b + 1);
  }

  enum class Answer { Unknown, Owner, Granted, Denied };

  Answer at(int stream, int requester, std::uint64_t height) const {
    auto reg = registered_.find(stream);
    if (reg == registered_.end() || reg->second > height) return Answer::Unknown;
    if (requester == stream) return Answer::Owner;
    auto it = log_.find({stream, requester});
    if (it == log_.end()) return Answer::Denied;
    std::optional<bool> last;
    for (const auto& [ht, granted] : it->second)
      if (ht <= height) last = granted;
    return last.value_or(false) ? Answer::Granted : Answer::Denied;
  }

  std::uint32_t epoch(int stream) const { return epoch_.count(stream) ? epoch_.at(stream) : 0; }
  std::optional<std::uint64_t> anchor(int stream) const {
    auto it = anchor_.find(stream);
    if (it == anchor_.end()) return std::nullopt;
    return it->second;
  }
  bool registered(int stream) const { return registered_.count(stream) != 0; }

 private:
  void apply(const HistoryOp& op, std::uint64_t height) {
    const int s = op.stream;
    switch (op.kind) {
      case HistoryOp::Register:
        registered_.try_emplace(s, height);
        return;
      case HistoryOp::Grant:
        if (!registered_.count(s) || op.issuer != s || op.grantee == s || granted_[{s, op.grantee}]) return;
        granted_[{s, op.grantee}] = true;
        log_[{s, op.grantee}].push_back({height, true});
        return;
      case HistoryOp::Revoke:
        if (!registered_.count(s) || op.issuer != s || !granted_[{s, op.grantee}] || op.epoch <= epoch_[s]) return;
        granted_[{s, op.grantee}] = false;
        epoch_[s] = op.epoch;
        log_[{s, op.grantee}].push_back({height, false});
        return;
      case HistoryOp::Checkpoint:
        if (!registered_.count(s) || op.issuer != s) return;
        if (anchor_.count(s) && op.chunk_index <= anchor_[s]) return;
        anchor_[s] = op.chunk_index;
        return;
      default:
        return;
    }
  }

  const History& h_;
  std::map<int, std::uint64_t> registered_;
  std::map<std::pair<int, int>, bool> granted_;
  std::map<std::pair<int, int>, std::vector<std::pair<std::uint64_t, bool>>> log_;
  std::map<int, std::uint32_t> epoch_;
  std::map<int, std::uint64_t> anchor_;
};

/// Blocks of a history chained onto genesis.
inline std::vector<ledger::Block> chain_blocks(const History& h) {
  std::vector<ledger::Block> out;
  auto prev = ledger::genesis_block();
  for (std::size_t i = 0; i < h.blocks.size(); ++i) {
    ledger::Block b;
    b.height = i + 1;
    b.prev_hash = prev.digest();
    b.timestamp_ms = static_cast<std::int64_t>(i + 1) * 1000;
    b.payloads = h.blocks[i];
    out.push_back(b);
    prev = b;
  }
  return out;
}

}  // namespace sv::test
