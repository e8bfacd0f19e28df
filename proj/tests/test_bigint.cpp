#include <random>

#include "doctest.h"
#include "qmf/bigint.hpp"
#include "qmf/rational.hpp"

using qmf::BigInt;
using qmf::Rational;

TEST_CASE("bigint basics") {
  CHECK(BigInt(0).is_zero());
  CHECK(BigInt(-5).to_i64() == -5);
  CHECK((BigInt(123456789) * BigInt(987654321)).to_string() == "121932631112635269");
  CHECK(BigInt::from_string("-12345678901234567890123").to_string() ==
        "-12345678901234567890123");
  CHECK(BigInt::from_string("000123") == BigInt(123));
  CHECK_THROWS(BigInt::from_string(""));
  CHECK_THROWS(BigInt::from_string("12a3"));
}

TEST_CASE("bit access and shifts") {
  BigInt v = BigInt::from_string("1311768467463790320");  // 0x123456789ABCDEF0
  CHECK(v.bit_length() == 61);
  CHECK(!v.bit(0));
  CHECK(v.bit(4));
  CHECK(((v << 7) >> 7) == v);
  CHECK(v.low_bits(16) == BigInt(0xDEF0));
  CHECK(BigInt::pow2(100).bit_length() == 101);
}

TEST_CASE("division identity holds on random values") {
  std::mt19937_64 rng(17);
  for (int it = 0; it < 300; ++it) {
    BigInt a = BigInt::random_bits(rng, 20 + rng() % 300);
    BigInt b = BigInt::random_bits(rng, 1 + rng() % 200);
    if (b.is_zero()) continue;
    if (rng() & 1) a = -a;
    if (rng() & 1) b = -b;
    BigInt q, r;
    BigInt::divmod(a, b, q, r);
    CHECK(q * b + r == a);
    CHECK(r.abs() < b.abs());
    // truncated division: remainder carries the dividend's sign
    if (!r.is_zero()) CHECK(r.is_negative() == a.is_negative());
  }
  CHECK_THROWS(BigInt(3) / BigInt(0));
}

TEST_CASE("gcd and modular inverse") {
  std::mt19937_64 rng(23);
  for (int it = 0; it < 100; ++it) {
    BigInt a = BigInt::random_bits(rng, 1 + rng() % 120);
    BigInt b = BigInt::random_bits(rng, 1 + rng() % 120);
    BigInt g = BigInt::gcd(a, b);
    if (!a.is_zero() && !b.is_zero()) {
      CHECK((a % g).is_zero());
      CHECK((b % g).is_zero());
    }
  }
  BigInt N(1000003);  // prime
  for (std::int64_t c : {2ll, 3ll, 999999ll}) {
    BigInt inv = BigInt::mod_inverse(BigInt(c), N);
    CHECK(BigInt::mod_floor(inv * BigInt(c), N) == BigInt(1));
  }
  CHECK_THROWS(BigInt::mod_inverse(BigInt(4), BigInt(6)));
}

TEST_CASE("rational reduction and arithmetic") {
  Rational r(6, -8);
  CHECK(r.num() == BigInt(-3));
  CHECK(r.den() == BigInt(4));
  CHECK(Rational(0, 17) == Rational(0));
  CHECK(Rational(1, 3) + Rational(1, 6) == Rational(1, 2));
  CHECK(Rational(2, 3) * Rational(3, 2) == Rational(1));
  CHECK_THROWS(Rational(1, 0));
  CHECK(Rational(1, 3).to_double() == doctest::Approx(1.0 / 3.0));
  // huge dyadic ratios convert without overflow (they underflow to zero)
  Rational tiny(BigInt(1), BigInt::pow2(8192));
  CHECK(tiny.to_double() == 0.0);
  Rational big(BigInt::pow2(100), BigInt(3));
  CHECK(big.to_double() == doctest::Approx(std::ldexp(1.0, 100) / 3.0));
}
