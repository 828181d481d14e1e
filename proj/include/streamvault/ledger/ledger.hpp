#pragma once

#include <memory>
#include <mutex>

#include "streamvault/ledger/acl_state.hpp"
#include "streamvault/ledger/chain.hpp"

namespace sv::ledger {

/// Virtualchain view over a ChainAdapter: submits transactions and folds
/// confirmed blocks into an AclState. Block application is serialized;
/// readers get immutable snapshots.
class Ledger {
 public:
  explicit Ledger(ChainAdapter& chain);

  /// Checks format and signature, then broadcasts. Returns the tx digest.
  /// Throws MalformedTx, BadSignature, LedgerUnavailable.
  Digest256 submit(const LedgerTx& tx);

  /// Applies every block with at least `confirmations` confirmations.
  void sync();
  /// Syncs, then returns the current snapshot.
  std::shared_ptr<const AclState> snapshot();
  /// Last applied snapshot without touching the chain.
  std::shared_ptr<const AclState> cached_snapshot() const;

  std::uint64_t confirmed_height();
  ChainAdapter& chain() { return chain_; }

 private:
  ChainAdapter& chain_;
  mutable std::mutex mu_;
  std::shared_ptr<const AclState> state_;
};

}  // namespace sv::ledger
