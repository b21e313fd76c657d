#pragma once

// Interlaced polynomial lattice point sets over GF(2).
//
// A generating vector holds alpha * s component polynomials.  Component
// q_{alpha(j-1)+k} produces, for each point index n, the m base-2 digits of the
// formal Laurent series n(x) q(x) / p(x); the alpha digit streams of dimension j
// are then interlaced into one coordinate carrying alpha * m digits.
//
// Coordinates are kept as scaled integers: value = integer * 2^-(alpha m).

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "hoqmc/execution.hpp"
#include "hoqmc/gf2poly.hpp"

namespace hoqmc::lattice {

using gf2::BinaryPolynomial;

inline constexpr int kMaxPrecision = 63;

struct GeneratingVector {
  BinaryPolynomial modulus;
  int m = 0;
  int alpha = 0;
  int s = 0;
  std::vector<BinaryPolynomial> components;  // alpha * s entries, dimension-major
  std::string weight_fingerprint;

  [[nodiscard]] int precision() const { return alpha * m; }
  [[nodiscard]] std::size_t n_points() const { return std::size_t{1} << m; }
  [[nodiscard]] BinaryPolynomial component(int dim, int slot) const {
    return components[static_cast<std::size_t>(dim * alpha + slot)];
  }

  /// Checks every structural invariant; throws std::invalid_argument naming the
  /// first violation ("precision overflow" when alpha * m > 63).
  void validate() const;

  friend bool operator==(const GeneratingVector&, const GeneratingVector&) = default;
};

struct InterlacedPointSet {
  std::size_t n_points = 0;
  int s = 0;
  int precision = 0;
  std::vector<std::uint64_t> coords;  // row-major, n_points x s

  [[nodiscard]] std::uint64_t at(std::size_t n, int j) const {
    return coords[n * static_cast<std::size_t>(s) + static_cast<std::size_t>(j)];
  }
  [[nodiscard]] std::span<const std::uint64_t> row(std::size_t n) const {
    return {coords.data() + n * static_cast<std::size_t>(s), static_cast<std::size_t>(s)};
  }
  [[nodiscard]] double coordinate(std::size_t n, int j) const;
  /// Point n as doubles in [0,1)^s.
  void point(std::size_t n, std::span<double> out) const;
};

/// Digits xi_1..xi_m of n(x) q(x) / p(x); xi_l multiplies x^-l.
/// Throws std::invalid_argument("invalid component") if q = 0 or deg q >= m.
std::vector<std::uint8_t> laurent_digits(std::uint64_t n, BinaryPolynomial q,
                                         BinaryPolynomial p, int m);

/// Same digits packed into an m-bit integer, xi_1 in the most significant bit.
std::uint64_t laurent_value(std::uint64_t n, BinaryPolynomial q, BinaryPolynomial p, int m);

/// Interlaces alpha digit sequences of equal length m.  Output digit
/// alpha(l-1)+k (1-based, most significant first) is digit l of sequence k.
/// Returned scaled by 2^(alpha m).  Throws on mismatched lengths.
std::uint64_t interlace(std::span<const std::vector<std::uint8_t>> digit_sequences);

/// Places the m-bit value v (as returned by laurent_value) into interlace slot
/// `slot` (0-based) of an alpha*m-digit word.
std::uint64_t spread_to_slot(std::uint64_t v, int slot, int alpha, int m);

/// Point set of a complete generating vector.  The parallel policy fills
/// dimensions concurrently; output is identical for either policy.
InterlacedPointSet generate_points(const GeneratingVector& gv,
                                   ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Direct per-point evaluation of the definition.  Serial reference for tests.
InterlacedPointSet generate_points_reference(const GeneratingVector& gv);

/// Point set of a partially chosen vector: `chosen` lists the first components
/// in CBC order; the point set has ceil(|chosen| / alpha) dimensions and the
/// unchosen slots of the last dimension contribute zero digits.
InterlacedPointSet generate_partial_points(BinaryPolynomial modulus, int m, int alpha,
                                           std::span<const BinaryPolynomial> chosen);

/// Generating-vector text file: `b=2`, `m=`, `alpha=`, `s=`, `modulus=`,
/// `weights=`, then alpha*s lines `q<i>=`.  Polynomials are written as the
/// unsigned integer of their coefficient bits.
void write_generating_vector(std::ostream& os, const GeneratingVector& gv);
GeneratingVector read_generating_vector(std::istream& is);
void save_generating_vector(const std::string& path, const GeneratingVector& gv);
GeneratingVector load_generating_vector(const std::string& path);

/// Exact decimal expansion of integer * 2^-precision (terminates after at most
/// `precision` fractional digits), e.g. (3, 2) -> "0.75".
std::string exact_dyadic_decimal(std::uint64_t value, int precision);

}  // namespace hoqmc::lattice
