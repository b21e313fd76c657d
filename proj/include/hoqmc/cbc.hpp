#pragma once

// Component-by-component construction of interlaced polynomial lattice rules.
//
// The criterion for a point set {y_n} in s interlaced dimensions is
//
//   E = (1/N) sum_n sum_{u != {}} gamma_u prod_{j in u} C omega(y_{n,j}),
//
// the point-mean form of the weighted dual-net sum.  For the weight family in
// weights.hpp it factorises per point as P_n * S_n - 1, with P_n the product over
// product-structured coordinates of (1 + C gamma_j omega) and S_n = sum_l l! V_n(l)
// accumulated over SPOD coordinates by
//
//   V^(j)(l) = V^(j-1)(l) + C omega(y_j) sum_{nu=1}^{min(alpha,l)} 2^{delta} beta_j^nu V^(j-1)(l-nu).
//
// Slots are filled in the order (dim 1, slot 1..alpha), (dim 2, ...), ...; while
// searching slot k of a dimension its later slots contribute zero digits.

#include <cstdint>
#include <vector>

#include "hoqmc/execution.hpp"
#include "hoqmc/polylattice.hpp"
#include "hoqmc/weights.hpp"

namespace hoqmc::cbc {

using lattice::BinaryPolynomial;
using lattice::GeneratingVector;
using lattice::InterlacedPointSet;

/// Highest SPOD order kept in V_n(l): min(alpha * s_spod, 60), lowered further
/// when the bound l! (max(1, 2 C omega(0)) max_j beta_j)^l underflows.
int spod_order_cap(const WeightSpec& w, int s, int precision);

/// Criterion recomputed from scratch on a (possibly partial) point set.
/// Throws std::overflow_error("criterion overflow") on non-finite values.
double criterion(const InterlacedPointSet& points, const WeightSpec& w,
                 ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Candidate `value` replaces the running best when it is smaller by more than
/// a relative 1e-12; exact and roundoff ties keep the earlier (smaller) polynomial.
bool improves(double value, double best);

struct CBCOptions {
  ExecutionPolicy policy = ExecutionPolicy::parallel;
  /// 0 searches all 2^m - 1 candidates.  Otherwise each slot searches a
  /// deterministic random subset of this size (sorted ascending).
  std::size_t max_candidates = 0;
  std::uint64_t candidate_seed = 0x5eedULL;
  /// Zero selects gf2::default_modulus(m).
  BinaryPolynomial modulus{};
  /// Keep every candidate's criterion value per slot (for inspection).
  bool record_candidate_values = false;
};

struct CBCResult {
  GeneratingVector vector;
  std::vector<double> criterion_trace;  // minimised E after each of the alpha*s slots
  double elapsed = 0.0;                 // seconds
  std::vector<std::vector<BinaryPolynomial>> slot_candidates;  // only when recorded
  std::vector<std::vector<double>> slot_candidate_values;      // only when recorded
};

/// Throws std::invalid_argument("precision overflow") when alpha*m > 63 and
/// std::overflow_error("criterion overflow") on non-finite criterion values.
CBCResult cbc_construct(int s, int m, const WeightSpec& w, const CBCOptions& options = {});

}  // namespace hoqmc::cbc
