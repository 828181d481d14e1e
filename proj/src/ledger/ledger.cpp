#include "streamvault/ledger/ledger.hpp"

#include "streamvault/common/error.hpp"

namespace sv::ledger {

Ledger::Ledger(ChainAdapter& chain)
    : chain_(chain), state_(std::make_shared<const AclState>(initial_state())) {}

Digest256 Ledger::submit(const LedgerTx& tx) {
  auto raw = tx.serialize();
  LedgerTx::parse(raw);
  if (!tx.signature_valid()) throw Error(Errc::BadSignature, "transaction signature does not verify");
  const auto digest = tx.digest();
  chain_.broadcast(std::move(raw));
  return digest;
}

void Ledger::sync() {
  std::lock_guard lock(mu_);
  const auto tip = chain_.tip_height();
  const auto k = chain_.confirmations();
  if (tip + 1 < k) return;
  const auto confirmed = tip + 1 - k;
  if (state_->height >= confirmed) return;
  AclState next = *state_;
  for (auto h = next.height + 1; h <= confirmed; ++h) next = apply_block(std::move(next), chain_.block_at(h));
  state_ = std::make_shared<const AclState>(std::move(next));
}

std::shared_ptr<const AclState> Ledger::snapshot() {
  sync();
  return cached_snapshot();
}

std::shared_ptr<const AclState> Ledger::cached_snapshot() const {
  std::lock_guard lock(mu_);
  return state_;
}

std::uint64_t Ledger::confirmed_height() { return snapshot()->height; }

}  // namespace sv::ledger
