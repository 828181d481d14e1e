#pragma once

#include <cstdint>

#include "streamvault/common/bytes.hpp"
#include "streamvault/common/random.hpp"

namespace sv::crypto {

// Prime-order groups used by the re-encryption scheme. Both expose the same
// static interface so the ElGamal algebra in pre.hpp is written once:
//   base_exp(s)        g^s
//   exp(e, s)          e^s
//   op(a, b)           a * b
//   op_inverse(a, b)   a * b^-1
//   scalar_mul / scalar_invert / random_scalar / random_element

/// ristretto255 (prime order 2^252 + ...). Elements are canonical 32-byte
/// encodings.
struct Ristretto255 {
  using Scalar = FixedBytes<32>;
  using Element = FixedBytes<32>;

  static Element base_exp(const Scalar& s);
  static Element exp(const Element& e, const Scalar& s);
  static Element op(const Element& a, const Element& b);
  static Element op_inverse(const Element& a, const Element& b);
  static Scalar scalar_mul(const Scalar& a, const Scalar& b);
  static Scalar scalar_invert(const Scalar& a);
  static Scalar random_scalar(RandomSource& rng);
  static Element random_element(RandomSource& rng);
  static bool is_valid(const Element& e);
};

/// Quadratic-residue subgroup of Z_p^* for the safe prime p = 2q + 1 with
/// q = 65393. Small enough that discrete logs can be brute forced, which is
/// the point: tests check the re-encryption algebra exponent by exponent.
struct ToyGroup {
  using Scalar = std::uint32_t;
  using Element = std::uint32_t;

  static constexpr std::uint32_t kModulus = 130787;
  static constexpr std::uint32_t kOrder = 65393;
  static constexpr std::uint32_t kGenerator = 4;

  static Element base_exp(Scalar s) { return exp(kGenerator, s); }
  static Element exp(Element e, Scalar s);
  static Element op(Element a, Element b) {
    return static_cast<Element>(std::uint64_t{a} * b % kModulus);
  }
  static Element op_inverse(Element a, Element b) { return op(a, exp(b, kOrder - 1)); }
  static Scalar scalar_mul(Scalar a, Scalar b) {
    return static_cast<Scalar>(std::uint64_t{a} * b % kOrder);
  }
  static Scalar scalar_invert(Scalar a) { return pow_mod(a, kOrder - 2, kOrder); }
  static Scalar random_scalar(RandomSource& rng) {
    return static_cast<Scalar>(1 + rng.next_u64() % (kOrder - 1));
  }
  static Element random_element(RandomSource& rng) { return base_exp(random_scalar(rng)); }
  static bool is_valid(Element e) { return e != 0 && e < kModulus && exp(e, kOrder) == 1; }

  static std::uint32_t pow_mod(std::uint64_t base, std::uint64_t e, std::uint64_t m);
};

}  // namespace sv::crypto
