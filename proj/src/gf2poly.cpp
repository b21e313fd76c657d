#include "hoqmc/gf2poly.hpp"

#include <array>
#include <mutex>
#include <stdexcept>

namespace hoqmc::gf2 {

namespace {

void require_modulus(BinaryPolynomial p) {
  if (p.is_zero()) throw std::invalid_argument("invalid modulus");
}

// x * r mod p, assuming deg(r) < deg(p).
inline std::uint64_t times_x(std::uint64_t r, std::uint64_t p, int deg_p) {
  r <<= 1;
  if ((r >> deg_p) & 1U) r ^= p;
  return r;
}

}  // namespace

BinaryPolynomial mod(BinaryPolynomial a, BinaryPolynomial p) {
  require_modulus(p);
  const int dp = p.degree();
  std::uint64_t r = a.bits();
  for (int d = a.degree(); d >= dp; --d) {
    if ((r >> d) & 1U) r ^= p.bits() << (d - dp);
  }
  return BinaryPolynomial(r);
}

BinaryPolynomial mul_mod(BinaryPolynomial a, BinaryPolynomial b, BinaryPolynomial p) {
  require_modulus(p);
  const int dp = p.degree();
  if (dp == 0) return BinaryPolynomial(0);
  a = mod(a, p);
  b = mod(b, p);
  // Horner over the bits of b, most significant first.
  std::uint64_t r = 0;
  for (int i = b.degree(); i >= 0; --i) {
    r = times_x(r, p.bits(), dp);
    if (b.coeff(i)) r ^= a.bits();
  }
  return BinaryPolynomial(r);
}

BinaryPolynomial gcd(BinaryPolynomial a, BinaryPolynomial b) {
  while (!b.is_zero()) {
    BinaryPolynomial r = mod(a, b);
    a = b;
    b = r;
  }
  return a;
}

bool is_irreducible(BinaryPolynomial p) {
  const int n = p.degree();
  if (n < 1) throw std::invalid_argument("degree must be positive");
  if (n == 1) return true;
  // p is irreducible iff gcd(x^(2^i) - x, p) = 1 for all i <= n/2.
  const BinaryPolynomial x(2);
  BinaryPolynomial power = mod(x, p);
  for (int i = 1; i <= n / 2; ++i) {
    power = mul_mod(power, power, p);
    if (gcd(p, power + mod(x, p)).degree() > 0) return false;
  }
  return true;
}

BinaryPolynomial default_modulus(int degree) {
  if (degree < 1 || degree > kMaxDegree) throw std::invalid_argument("degree out of range");
  static std::array<std::uint64_t, kMaxDegree + 1> cache{};
  static std::mutex lock;
  std::scoped_lock guard(lock);
  if (cache[degree] == 0) {
    const std::uint64_t lead = std::uint64_t{1} << degree;
    for (std::uint64_t low = 0;; ++low) {
      BinaryPolynomial candidate(lead | low);
      if (is_irreducible(candidate)) {
        cache[degree] = candidate.bits();
        break;
      }
    }
  }
  return BinaryPolynomial(cache[degree]);
}

std::string to_string(BinaryPolynomial p) {
  if (p.is_zero()) return "0";
  std::string out;
  for (int i = p.degree(); i >= 0; --i) {
    if (!p.coeff(i)) continue;
    if (!out.empty()) out += '+';
    if (i == 0) {
      out += '1';
    } else if (i == 1) {
      out += 'x';
    } else {
      out += "x^" + std::to_string(i);
    }
  }
  return out;
}

}  // namespace hoqmc::gf2
