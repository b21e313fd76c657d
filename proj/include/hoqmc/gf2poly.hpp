#pragma once

// Polynomials over GF(2) packed into a single 64-bit word.
//
// Bit i of the word is the coefficient of x^i, so x^2 + x + 1 is stored as 7.
// Addition is carry-free (xor).  The largest representable degree is 63.

#include <bit>
#include <cstdint>
#include <string>

namespace hoqmc::gf2 {

class BinaryPolynomial {
 public:
  constexpr BinaryPolynomial() = default;
  constexpr explicit BinaryPolynomial(std::uint64_t bits) : bits_(bits) {}

  [[nodiscard]] constexpr std::uint64_t bits() const { return bits_; }
  [[nodiscard]] constexpr bool is_zero() const { return bits_ == 0; }

  /// Index of the highest set bit; -1 for the zero polynomial.
  [[nodiscard]] constexpr int degree() const {
    return bits_ == 0 ? -1 : 63 - std::countl_zero(bits_);
  }

  [[nodiscard]] constexpr bool coeff(int i) const { return (bits_ >> i) & 1U; }

  friend constexpr BinaryPolynomial operator+(BinaryPolynomial a, BinaryPolynomial b) {
    return BinaryPolynomial(a.bits_ ^ b.bits_);
  }
  friend constexpr bool operator==(BinaryPolynomial, BinaryPolynomial) = default;
  friend constexpr auto operator<=>(BinaryPolynomial a, BinaryPolynomial b) {
    return a.bits_ <=> b.bits_;
  }

 private:
  std::uint64_t bits_ = 0;
};

inline constexpr int kMaxDegree = 63;

/// a mod p.  Throws std::invalid_argument("invalid modulus") for p = 0.
BinaryPolynomial mod(BinaryPolynomial a, BinaryPolynomial p);

/// (a * b) mod p.  Operands of degree >= deg(p) are reduced first.
/// Throws std::invalid_argument("invalid modulus") for p = 0.
BinaryPolynomial mul_mod(BinaryPolynomial a, BinaryPolynomial b, BinaryPolynomial p);

BinaryPolynomial gcd(BinaryPolynomial a, BinaryPolynomial b);

/// Ben-Or irreducibility test.  Throws std::invalid_argument("degree must be
/// positive") for constant polynomials.
bool is_irreducible(BinaryPolynomial p);

/// Lexicographically smallest irreducible polynomial of the given degree
/// (1 <= degree <= 63).  Results are computed once and cached.
BinaryPolynomial default_modulus(int degree);

/// Human-readable form, e.g. "x^2+x+1".
std::string to_string(BinaryPolynomial p);

}  // namespace hoqmc::gf2
