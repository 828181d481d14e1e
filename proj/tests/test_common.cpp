#include <doctest.h>

#include "streamvault/common/bytes.hpp"
#include "streamvault/common/error.hpp"
#include "streamvault/common/random.hpp"

using namespace sv;

TEST_CASE("hex round trip and rejects bad input") {
  Bytes b{0x00, 0x7f, 0xff, 0x10};
  CHECK(to_hex(b) == "007fff10");
  CHECK(from_hex("007fff10") == b);
  CHECK(from_hex("007FFF10") == b);
  CHECK_THROWS_AS(from_hex("abc"), Error);
  CHECK_THROWS_AS(from_hex("zz"), Error);
  CHECK_THROWS_AS(fixed_from_hex<4>("0011"), Error);
}

TEST_CASE("writer and reader agree on big-endian layout") {
  ByteWriter w;
  w.u8(1).u16(0x0203).u32(0x04050607).u64(0x08090a0b0c0d0e0full).i64(-2).var(as_bytes("hi"));
  const Bytes expected = from_hex("010203040506070809" "0a0b0c0d0e0f" "fffffffffffffffe" "00000002" "6869");
  CHECK(w.bytes() == expected);

  ByteReader r(w.bytes());
  CHECK(r.u8() == 1);
  CHECK(r.u16() == 0x0203);
  CHECK(r.u32() == 0x04050607);
  CHECK(r.u64() == 0x08090a0b0c0d0e0full);
  CHECK(r.i64() == -2);
  auto v = r.var();
  CHECK(std::string(v.begin(), v.end()) == "hi");
  CHECK(r.done());
  r.expect_done();
}

TEST_CASE("reader reports truncation as Malformed") {
  Bytes b{0, 0, 0, 9, 1};
  ByteReader r(b);
  try {
    r.var();
    FAIL("expected throw");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::Malformed);
  }
  ByteReader r2(b);
  r2.u8();
  CHECK_THROWS_AS(r2.expect_done(), Error);
}

TEST_CASE("deterministic random repeats per seed and differs across seeds") {
  DeterministicRandom a(5), b(5), c(6);
  auto x = a.bytes<32>();
  CHECK(x == b.bytes<32>());
  CHECK(x != c.bytes<32>());
  CHECK(a.bytes<32>() != x);
}

TEST_CASE("error names are stable") {
  CHECK(std::string(errc_name(Errc::PermissionDenied)) == "PermissionDenied");
  CHECK(static_cast<int>(Errc::PermissionDenied) == 43);
  Error e(Errc::BadTag);
  CHECK(e.code() == Errc::BadTag);
}
