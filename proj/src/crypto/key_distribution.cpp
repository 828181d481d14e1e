#include "streamvault/crypto/key_distribution.hpp"

#include "streamvault/common/error.hpp"

namespace sv::crypto {

KeyDistributor::KeyDistributor(KeyRegressionChain chain, RandomSource& rng)
    : chain_(std::move(chain)), onetime_(pre_keygen(rng)), rng_(&rng) {}

KeyDistributor::KeyDistributor(KeyRegressionChain chain, std::uint32_t epoch, PreKeyPair onetime,
                               std::uint32_t onetime_epoch, std::map<Digest256, ServiceKey> grants,
                               RandomSource& rng)
    : chain_(std::move(chain)),
      epoch_(epoch),
      onetime_(onetime),
      onetime_epoch_(onetime_epoch),
      grants_(std::move(grants)),
      rng_(&rng) {
  if (epoch_ > chain_.max_epochs()) throw Error(Errc::EpochOutOfRange);
}

KeyPublication KeyDistributor::publication() const {
  return {epoch_, onetime_epoch_, pre_encrypt(onetime_.public_key, chain_.owner_state(epoch_).state, *rng_)};
}

IssuedShare KeyDistributor::grant(const ServiceKey& service) {
  grants_[service.service_id] = service;
  return {service.service_id, onetime_epoch_, issue_token_share(onetime_, service.pre_key, *rng_)};
}

void KeyDistributor::advance_epoch() {
  if (epoch_ >= chain_.max_epochs())
    throw Error(Errc::EpochOutOfRange, "key regression chain exhausted; re-register the stream");
  ++epoch_;
}

RotationResult KeyDistributor::rotate_and_share() {
  advance_epoch();
  return {publication(), 0};
}

RevocationResult KeyDistributor::revoke(const Digest256& service_id) {
  if (grants_.erase(service_id) == 0) throw Error(Errc::NotCurrentlyGranted);
  advance_epoch();
  onetime_ = pre_keygen(*rng_);
  onetime_epoch_ = epoch_;

  RevocationResult out;
  out.publication = publication();
  out.onetime_public = onetime_.public_key;
  out.shares.reserve(grants_.size());
  for (const auto& [id, service] : grants_)
    out.shares.push_back({id, onetime_epoch_, issue_token_share(onetime_, service.pre_key, *rng_)});
  return out;
}

void KeyReceiver::accept(const TokenShare& share) {
  auto token = accept_token_share(key_pair_, share);
  tokens_.insert_or_assign(token.from_pk_id, token);
}

MemberState KeyReceiver::open(const KeyPublication& publication) const {
  const auto& wrapped = publication.wrapped;
  if (wrapped.target_pk_id == pre_key_id(key_pair_.public_key))
    return {publication.epoch, pre_decrypt(key_pair_, wrapped)};
  auto it = tokens_.find(wrapped.target_pk_id);
  if (it == tokens_.end())
    throw Error(Errc::TokenMismatch, "no re-encryption token for this key publication");
  return {publication.epoch, pre_decrypt(key_pair_, pre_reencrypt(it->second, wrapped))};
}

}  // namespace sv::crypto
