#include <doctest.h>

#include <random>
#include <stdexcept>

#include "hoqmc/gf2poly.hpp"
#include "oracles.hpp"

using hoqmc::gf2::BinaryPolynomial;
namespace gf2 = hoqmc::gf2;

TEST_SUITE("gf2poly") {

TEST_CASE("degree and coefficients") {
  CHECK(BinaryPolynomial(0).degree() == -1);
  CHECK(BinaryPolynomial(1).degree() == 0);
  CHECK(BinaryPolynomial(0b1011).degree() == 3);
  CHECK(BinaryPolynomial(0b1011).coeff(1));
  CHECK_FALSE(BinaryPolynomial(0b1011).coeff(2));
  CHECK((BinaryPolynomial(0b110) + BinaryPolynomial(0b011)) == BinaryPolynomial(0b101));
  CHECK(gf2::to_string(BinaryPolynomial(0b111)) == "x^2+x+1");
  CHECK(gf2::to_string(BinaryPolynomial(0)) == "0");
}

TEST_CASE("mul_mod agrees with schoolbook product then reduction") {
  std::mt19937_64 rng(7);
  for (int d = 1; d <= 30; ++d) {
    const auto p = gf2::default_modulus(d);
    for (int t = 0; t < 50; ++t) {
      const std::uint64_t mask = (std::uint64_t{1} << d) - 1;
      const std::uint64_t a = rng() & mask, b = rng() & mask;
      const auto expect = oracle::polymod(oracle::clmul(a, b), p.bits());
      CHECK(gf2::mul_mod(BinaryPolynomial(a), BinaryPolynomial(b), p).bits() == expect);
    }
  }
}

TEST_CASE("irreducibility matches trial division up to degree 14") {
  for (std::uint64_t v = 2; v < (std::uint64_t{1} << 15); ++v) {
    REQUIRE_MESSAGE(gf2::is_irreducible(BinaryPolynomial(v)) == oracle::irreducible_trial(v), v);
  }
}

TEST_CASE("default modulus is the smallest irreducible of each degree") {
  CHECK(gf2::default_modulus(1).bits() == 2);
  CHECK(gf2::default_modulus(2).bits() == 7);
  CHECK(gf2::default_modulus(3).bits() == 11);
  CHECK(gf2::default_modulus(4).bits() == 19);
  for (int d = 1; d <= 16; ++d) {
    const auto p = gf2::default_modulus(d);
    CHECK(p.degree() == d);
    CHECK(oracle::irreducible_trial(p.bits()));
    for (std::uint64_t v = std::uint64_t{1} << d; v < p.bits(); ++v) CHECK_FALSE(oracle::irreducible_trial(v));
  }
  CHECK(gf2::default_modulus(63).degree() == 63);
}

TEST_CASE("gcd of products") {
  const BinaryPolynomial a(oracle::clmul(0b111, 0b1011));
  const BinaryPolynomial b(oracle::clmul(0b111, 0b1101));
  CHECK(gf2::gcd(a, b) == BinaryPolynomial(0b111));
  CHECK(gf2::gcd(BinaryPolynomial(0b1011), BinaryPolynomial(0)) == BinaryPolynomial(0b1011));
}

TEST_CASE("errors") {
  CHECK_THROWS_WITH_AS(gf2::mod(BinaryPolynomial(5), BinaryPolynomial(0)), "invalid modulus", std::invalid_argument);
  CHECK_THROWS_AS(gf2::is_irreducible(BinaryPolynomial(1)), std::invalid_argument);
  CHECK_THROWS_AS(gf2::default_modulus(0), std::invalid_argument);
  CHECK_THROWS_AS(gf2::default_modulus(64), std::invalid_argument);
}

}
