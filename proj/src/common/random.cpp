#include "streamvault/common/random.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace sv {

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw std::runtime_error("libsodium initialization failed");
  });
}

std::uint64_t RandomSource::next_u64() {
  auto b = bytes<8>();
  std::uint64_t v = 0;
  for (auto x : b) v = (v << 8) | x;
  return v;
}

SystemRandom::SystemRandom() { ensure_sodium(); }

void SystemRandom::fill(std::span<std::uint8_t> out) { randombytes_buf(out.data(), out.size()); }

DeterministicRandom::DeterministicRandom(std::uint64_t seed) : key_{} {
  ensure_sodium();
  for (int i = 0; i < 8; ++i) key_[i] = static_cast<std::uint8_t>(seed >> (56 - 8 * i));
  crypto_hash_sha256(key_.data(), key_.data(), key_.size());
}

DeterministicRandom::DeterministicRandom(const Digest256& seed) : key_(seed) { ensure_sodium(); }

void DeterministicRandom::fill(std::span<std::uint8_t> out) {
  // Each call draws from a fresh ChaCha20 stream keyed by H(key || counter).
  std::uint8_t block_seed[randombytes_SEEDBYTES];
  std::uint8_t material[40];
  std::copy(key_.begin(), key_.end(), material);
  for (int i = 0; i < 8; ++i) material[32 + i] = static_cast<std::uint8_t>(counter_ >> (56 - 8 * i));
  ++counter_;
  crypto_hash_sha256(block_seed, material, sizeof(material));
  randombytes_buf_deterministic(out.data(), out.size(), block_seed);
}

}  // namespace sv
