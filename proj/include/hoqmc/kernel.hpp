#pragma once

// Walsh-series kernel of the higher-order worst-case error.
//
// For a coordinate y with P = alpha*m binary digits,
//
//   omega(y) = sum_{k=1}^{2^P - 1} 2^{-mu_alpha(k)} wal_k(y),
//
// where mu_alpha(k) adds the alpha largest 1-based bit positions of k.  Terms
// with k >= 2^P are dropped.  The digit DP runs in O(alpha P); alpha = 2 and 3
// have O(1) closed forms of the same recursion.

#include <array>
#include <bit>
#include <cstdint>
#include <vector>

namespace hoqmc::cbc {

/// 0 for k = 0, else a_1 + ... + a_min(alpha,rho) for k = 2^(a_1-1) + ... with
/// a_1 > a_2 > ... > 0.
int mu_alpha(std::uint64_t k, int alpha);

/// (-1)^(sum_i kappa_i xi_i): bit i-1 of k pairs with digit i of y, where y is a
/// `precision`-digit coordinate stored scaled by 2^precision.
int wal(std::uint64_t k, std::uint64_t y, int precision);

/// Fast omega(y).  Throws std::invalid_argument("order must be >= 2") for
/// alpha < 2.
double kernel_omega(std::uint64_t y, int alpha, int precision);

/// Digit-position DP for any alpha >= 2.
double kernel_omega_dp(std::uint64_t y, int alpha, int precision);

/// omega for fixed (alpha, precision) as a lookup: for alpha = 2 and 3, once
/// the leading digit position of y is fixed omega is a polynomial in
/// c = 2^-P + 2y of degree alpha - 1, so one table row per bit width suffices.
/// Other orders fall back to the digit DP.
class KernelTable {
 public:
  KernelTable(int alpha, int precision);

  [[nodiscard]] double operator()(std::uint64_t y) const {
    if (alpha_ > 3) return kernel_omega_dp(y, alpha_, precision_);
    const auto& r = rows_[static_cast<std::size_t>(std::bit_width(y))];
    const double c = eps_ + scale_ * static_cast<double>(y);
    return r[0] + c * (r[1] + c * r[2]);
  }

 private:
  int alpha_;
  int precision_;
  double eps_;
  double scale_;
  std::vector<std::array<double, 3>> rows_;
};

namespace detail {
// Unchecked closed forms used inside the CBC inner loop.
double omega_alpha2(std::uint64_t y, int precision);
double omega_alpha3(std::uint64_t y, int precision);
}  // namespace detail

}  // namespace hoqmc::cbc
