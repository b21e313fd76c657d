#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "hoqmc/gf2poly.hpp"
#include "hoqmc/polylattice.hpp"
#include "oracles.hpp"

using namespace hoqmc;
using lattice::BinaryPolynomial;
using lattice::GeneratingVector;

namespace {

GeneratingVector random_vector(int s, int m, int alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  GeneratingVector gv;
  gv.modulus = gf2::default_modulus(m);
  gv.m = m;
  gv.alpha = alpha;
  gv.s = s;
  for (int i = 0; i < alpha * s; ++i) gv.components.emplace_back(1 + rng() % ((std::uint64_t{1} << m) - 1));
  gv.weight_fingerprint = "test";
  return gv;
}

// Digit l (1-based) of a P-digit coordinate.
int digit(std::uint64_t y, int l, int precision) { return static_cast<int>((y >> (precision - l)) & 1U); }

}  // namespace

TEST_SUITE("polylattice") {

TEST_CASE("Laurent digits match the series expansion of n q / p") {
  std::mt19937_64 rng(11);
  for (int m = 1; m <= 20; ++m) {
    const auto p = gf2::default_modulus(m);
    for (int t = 0; t < 40; ++t) {
      const std::uint64_t q = 1 + rng() % ((std::uint64_t{1} << m) - 1);
      const std::uint64_t n = rng() % (std::uint64_t{1} << m);
      const auto got = lattice::laurent_digits(n, BinaryPolynomial(q), p, m);
      const auto want = oracle::laurent_digits(n, q, p.bits(), m);
      REQUIRE(got.size() == want.size());
      for (int l = 0; l < m; ++l) CHECK(got[static_cast<std::size_t>(l)] == want[static_cast<std::size_t>(l)]);
      std::uint64_t packed = 0;
      for (int l = 0; l < m; ++l) packed = (packed << 1) | static_cast<std::uint64_t>(want[static_cast<std::size_t>(l)]);
      CHECK(lattice::laurent_value(n, BinaryPolynomial(q), p, m) == packed);
    }
  }
}

TEST_CASE("1/p digits for p = x^2+x+1") {
  // 1/(x^2+x+1) = x^-2 + x^-3 + x^-5 + x^-6 + ...
  const auto d = lattice::laurent_digits(1, BinaryPolynomial(1), BinaryPolynomial(7), 2);
  CHECK(d == std::vector<std::uint8_t>{0, 1});
  CHECK(lattice::laurent_value(2, BinaryPolynomial(1), BinaryPolynomial(7), 2) == 0b11);
}

TEST_CASE("interlacing places digit l of slot k at position alpha(l-1)+k") {
  const std::vector<std::vector<std::uint8_t>> seqs = {{1, 0, 1}, {0, 1, 1}};
  const auto y = lattice::interlace(seqs);
  // a1 b1 a2 b2 a3 b3 = 1 0 0 1 1 1
  CHECK(y == 0b100111);
  CHECK((lattice::spread_to_slot(0b101, 0, 2, 3) | lattice::spread_to_slot(0b011, 1, 2, 3)) == y);
  const std::vector<std::vector<std::uint8_t>> bad = {{1, 0}, {1}};
  CHECK_THROWS_AS(lattice::interlace(bad), std::invalid_argument);
}

TEST_CASE("fast generation matches per-point definition") {
  for (int alpha : {1, 2, 3}) {
    for (int m : {1, 3, 6, 9}) {
      const auto gv = random_vector(4, m, alpha, static_cast<std::uint64_t>(100 * alpha + m));
      const auto ref = lattice::generate_points_reference(gv);
      CHECK(lattice::generate_points(gv, ExecutionPolicy::serial).coords == ref.coords);
      CHECK(lattice::generate_points(gv, ExecutionPolicy::parallel).coords == ref.coords);
    }
  }
}

TEST_CASE("reference generation follows the digit definition") {
  const auto gv = random_vector(2, 5, 2, 3);
  const auto pts = lattice::generate_points_reference(gv);
  const int P = gv.precision();
  for (std::uint64_t n = 0; n < gv.n_points(); ++n) {
    for (int j = 0; j < gv.s; ++j) {
      for (int k = 0; k < gv.alpha; ++k) {
        const auto xi = oracle::laurent_digits(n, gv.component(j, k).bits(), gv.modulus.bits(), gv.m);
        for (int l = 1; l <= gv.m; ++l) CHECK(digit(pts.at(n, j), gv.alpha * (l - 1) + k + 1, P) == xi[static_cast<std::size_t>(l - 1)]);
      }
    }
  }
}

TEST_CASE("non-interlaced coordinates are permutations of i/N") {
  for (int m = 1; m <= 10; ++m) {
    const auto gv = random_vector(3, m, 1, static_cast<std::uint64_t>(m));
    const auto pts = lattice::generate_points(gv);
    for (int j = 0; j < 3; ++j) {
      std::vector<std::uint64_t> col;
      for (std::size_t n = 0; n < pts.n_points; ++n) col.push_back(pts.at(n, j));
      std::sort(col.begin(), col.end());
      for (std::size_t i = 0; i < col.size(); ++i) REQUIRE(col[i] == i);
    }
  }
}

TEST_CASE("character sums over the net are 0 or 1") {
  for (int m = 1; m <= 4; ++m) {
    const auto gv = random_vector(2, m, 2, static_cast<std::uint64_t>(50 + m));
    const auto pts = lattice::generate_points(gv);
    const int P = gv.precision();
    for (std::uint64_t k1 = 0; k1 < (std::uint64_t{1} << P); ++k1) {
      for (std::uint64_t k2 = 0; k2 < (std::uint64_t{1} << P); ++k2) {
        int sum = 0;
        for (std::size_t n = 0; n < pts.n_points; ++n) sum += oracle::wal(k1, pts.at(n, 0), P) * oracle::wal(k2, pts.at(n, 1), P);
        REQUIRE((sum == 0 || sum == static_cast<int>(pts.n_points)));
      }
    }
  }
}

TEST_CASE("partial point sets leave unchosen slots at zero") {
  const auto gv = random_vector(2, 4, 2, 9);
  const std::vector<BinaryPolynomial> chosen = {gv.components[0], gv.components[1], gv.components[2]};
  const auto part = lattice::generate_partial_points(gv.modulus, 4, 2, chosen);
  const auto full = lattice::generate_points(gv);
  REQUIRE(part.s == 2);
  const std::uint64_t slot1 = lattice::spread_to_slot(0b1111, 1, 2, 4);
  for (std::size_t n = 0; n < part.n_points; ++n) {
    CHECK(part.at(n, 0) == full.at(n, 0));
    CHECK((part.at(n, 1) & slot1) == 0);
    CHECK(part.at(n, 1) == (full.at(n, 1) & ~slot1));
  }
}

TEST_CASE("generating vector file round trip") {
  const auto gv = random_vector(3, 7, 2, 21);
  std::stringstream ss;
  lattice::write_generating_vector(ss, gv);
  const std::string text = ss.str();
  CHECK(text.rfind("b=2\nm=7\nalpha=2\ns=3\n", 0) == 0);
  CHECK(lattice::read_generating_vector(ss) == gv);

  std::stringstream commented("# note\n" + text);
  CHECK(lattice::read_generating_vector(commented) == gv);

  std::string missing = text.substr(0, text.rfind("q6="));
  std::stringstream bad(missing);
  CHECK_THROWS_AS(lattice::read_generating_vector(bad), std::invalid_argument);
}

TEST_CASE("invalid vectors") {
  auto gv = random_vector(2, 4, 2, 1);
  gv.components[0] = BinaryPolynomial(0);
  CHECK_THROWS_WITH_AS(gv.validate(), "invalid component", std::invalid_argument);
  gv = random_vector(2, 4, 2, 1);
  gv.components[1] = BinaryPolynomial(16);
  CHECK_THROWS_WITH_AS(gv.validate(), "invalid component", std::invalid_argument);
  gv = random_vector(2, 4, 2, 1);
  gv.modulus = BinaryPolynomial(7);
  CHECK_THROWS_WITH_AS(gv.validate(), "invalid modulus", std::invalid_argument);
  gv = random_vector(1, 32, 2, 1);
  CHECK_THROWS_WITH_AS(gv.validate(), "precision overflow", std::invalid_argument);
}

TEST_CASE("exact dyadic decimals") {
  CHECK(lattice::exact_dyadic_decimal(3, 2) == "0.75");
  CHECK(lattice::exact_dyadic_decimal(0, 5) == "0");
  CHECK(lattice::exact_dyadic_decimal(1, 4) == "0.0625");
  const auto tiny = lattice::exact_dyadic_decimal(1, 63);
  CHECK(tiny.size() == 2 + 63);
  CHECK(tiny == "0.000000000000000000108420217248550443400745280086994171142578125");
  CHECK(lattice::exact_dyadic_decimal(1, 10) == "0.0009765625");
  CHECK_THROWS_AS(lattice::exact_dyadic_decimal(4, 2), std::invalid_argument);
}

}
