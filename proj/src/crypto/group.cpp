#include "streamvault/crypto/group.hpp"

#include <sodium.h>

#include "streamvault/common/error.hpp"

namespace sv::crypto {

Ristretto255::Element Ristretto255::base_exp(const Scalar& s) {
  Element out{};
  if (crypto_scalarmult_ristretto255_base(out.data(), s.data()) != 0)
    throw Error(Errc::InvalidArgument, "ristretto255: zero scalar");
  return out;
}

Ristretto255::Element Ristretto255::exp(const Element& e, const Scalar& s) {
  Element out{};
  if (crypto_scalarmult_ristretto255(out.data(), s.data(), e.data()) != 0)
    throw Error(Errc::InvalidCiphertext, "ristretto255: invalid point or identity result");
  return out;
}

Ristretto255::Element Ristretto255::op(const Element& a, const Element& b) {
  Element out{};
  if (crypto_core_ristretto255_add(out.data(), a.data(), b.data()) != 0)
    throw Error(Errc::InvalidCiphertext, "ristretto255: invalid point");
  return out;
}

Ristretto255::Element Ristretto255::op_inverse(const Element& a, const Element& b) {
  Element out{};
  if (crypto_core_ristretto255_sub(out.data(), a.data(), b.data()) != 0)
    throw Error(Errc::InvalidCiphertext, "ristretto255: invalid point");
  return out;
}

Ristretto255::Scalar Ristretto255::scalar_mul(const Scalar& a, const Scalar& b) {
  Scalar out{};
  crypto_core_ristretto255_scalar_mul(out.data(), a.data(), b.data());
  return out;
}

Ristretto255::Scalar Ristretto255::scalar_invert(const Scalar& a) {
  Scalar out{};
  if (crypto_core_ristretto255_scalar_invert(out.data(), a.data()) != 0)
    throw Error(Errc::InvalidArgument, "ristretto255: zero scalar has no inverse");
  return out;
}

Ristretto255::Scalar Ristretto255::random_scalar(RandomSource& rng) {
  ensure_sodium();
  for (;;) {
    auto wide = rng.bytes<crypto_core_ristretto255_NONREDUCEDSCALARBYTES>();
    Scalar out{};
    crypto_core_ristretto255_scalar_reduce(out.data(), wide.data());
    if (!is_zero(view(out))) return out;
  }
}

Ristretto255::Element Ristretto255::random_element(RandomSource& rng) {
  ensure_sodium();
  auto wide = rng.bytes<crypto_core_ristretto255_HASHBYTES>();
  Element out{};
  crypto_core_ristretto255_from_hash(out.data(), wide.data());
  return out;
}

bool Ristretto255::is_valid(const Element& e) {
  ensure_sodium();
  return crypto_core_ristretto255_is_valid_point(e.data()) == 1;
}

std::uint32_t ToyGroup::pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m) {
  std::uint64_t result = 1;
  base %= m;
  while (e > 0) {
    if (e & 1) result = result * base % m;
    base = base * base % m;
    e >>= 1;
  }
  return static_cast<std::uint32_t>(result);
}

ToyGroup::Element ToyGroup::exp(Element e, Scalar s) { return pow_mod(e, s, kModulus); }

}  // namespace sv::crypto
