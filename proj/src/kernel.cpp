#include "hoqmc/kernel.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <stdexcept>

namespace hoqmc::cbc {

namespace {

// 1-based position of the first non-zero digit of y, or P + 1 for y = 0.
inline int first_nonzero_digit(std::uint64_t y, int precision) {
  return y == 0 ? precision + 1 : precision - (static_cast<int>(std::bit_width(y)) - 1);
}

void check_args(int alpha, int precision) {
  if (alpha < 2) throw std::invalid_argument("order must be >= 2");
  if (precision < 1 || precision > 63) throw std::invalid_argument("precision overflow");
}

}  // namespace

int mu_alpha(std::uint64_t k, int alpha) {
  int mu = 0;
  for (int taken = 0; k != 0 && taken < alpha; ++taken) {
    const int pos = static_cast<int>(std::bit_width(k));  // a_i, 1-based
    mu += pos;
    k &= ~(std::uint64_t{1} << (pos - 1));
  }
  return mu;
}

int wal(std::uint64_t k, std::uint64_t y, int precision) {
  int parity = 0;
  for (int i = 1; i <= precision && (k >> (i - 1)) != 0; ++i) {
    parity ^= static_cast<int>(((k >> (i - 1)) & (y >> (precision - i))) & 1U);
  }
  return parity ? -1 : 1;
}

// Sum over subsets K of {1..P}.  Scanning positions from P down to 1, E[r]
// holds the elementary symmetric sum e_r of x_i = s_i 2^-i over the positions
// already scanned.  Sets with fewer than alpha elements contribute e_1..e_{alpha-1};
// a set whose alpha-th largest element is a contributes x_a e_{alpha-1}(>a)
// times the sum over subsets of {1..a-1} of prod s_i, which is 2^(a-1) when
// digits 1..a-1 vanish and 0 otherwise.
double kernel_omega_dp(std::uint64_t y, int alpha, int precision) {
  check_args(alpha, precision);
  std::array<double, 64> e{};
  e[0] = 1.0;
  const int t = first_nonzero_digit(y, precision);
  double tail = 0.0;
  for (int a = precision; a >= 1; --a) {
    const double sign = ((y >> (precision - a)) & 1U) ? -1.0 : 1.0;
    if (a <= t) tail += 0.5 * sign * e[static_cast<std::size_t>(alpha - 1)];
    const double x = sign * std::ldexp(1.0, -a);
    for (int r = alpha - 1; r >= 1; --r) e[static_cast<std::size_t>(r)] += x * e[static_cast<std::size_t>(r - 1)];
  }
  double omega = tail;
  for (int r = 1; r <= alpha - 1; ++r) omega += e[static_cast<std::size_t>(r)];
  return omega;
}

namespace detail {

// e_1 over positions >= a equals (2^(1-a) - 2^-P) - 2 * (digits of y at >= a).
// Below the first non-zero digit t every s_i is +1, so the tail sums collapse
// to geometric series.  c = 2^-P + 2Y.
double omega_alpha2(std::uint64_t y, int precision) {
  const double Y = std::ldexp(static_cast<double>(y), -precision);
  const double eps = std::ldexp(1.0, -precision);
  const double c = eps + 2.0 * Y;
  const int t = first_nonzero_digit(y, precision);
  const int n1 = std::min(t - 1, precision);
  double omega = (1.0 - c) + 0.5 * ((1.0 - std::ldexp(1.0, -n1)) - n1 * c);
  if (t <= precision) omega -= 0.5 * (3.0 * std::ldexp(1.0, -t) - c);
  return omega;
}

// e_2 = (p_1^2 - p_2) / 2 with the digit-independent power sum
// p_2(>=a) = (4^(1-a) - 4^-P) / 3.
double omega_alpha3(std::uint64_t y, int precision) {
  const double Y = std::ldexp(static_cast<double>(y), -precision);
  const double eps = std::ldexp(1.0, -precision);
  const double eps2 = eps * eps;
  const double c = eps + 2.0 * Y;
  const int t = first_nonzero_digit(y, precision);
  const int n1 = std::min(t - 1, precision);
  const double g2 = std::ldexp(1.0, -n1);
  const double g4 = g2 * g2;

  const double e1_full = 1.0 - c;
  const double e2_full = 0.5 * (e1_full * e1_full - (1.0 - eps2) / 3.0);

  const double sq_sum = (1.0 - g4) / 3.0 - 2.0 * c * (1.0 - g2) + n1 * c * c;
  const double p2_sum = ((1.0 - g4) / 3.0 - n1 * eps2) / 3.0;
  double omega = e1_full + e2_full + 0.25 * (sq_sum - p2_sum);

  if (t <= precision) {
    const double gt = std::ldexp(1.0, -t);
    const double e1 = 3.0 * gt - c;
    const double e2 = 0.5 * (e1 * e1 - (gt * gt - eps2) / 3.0);
    omega -= 0.5 * e2;
  }
  return omega;
}

}  // namespace detail

// Coefficients follow from omega_alpha2 / omega_alpha3 with t = P + 1 - bit_width(y).
KernelTable::KernelTable(int alpha, int precision)
    : alpha_(alpha), precision_(precision), eps_(std::ldexp(1.0, -precision)),
      scale_(std::ldexp(2.0, -precision)), rows_(static_cast<std::size_t>(precision) + 1) {
  check_args(alpha, precision);
  const double eps2 = eps_ * eps_;
  for (int bw = 0; bw <= precision; ++bw) {
    const int t = precision + 1 - bw;
    const int n1 = std::min(t - 1, precision);
    const double g2 = std::ldexp(1.0, -n1);
    const double lead = t <= precision ? 1.0 : 0.0;
    const double gt = std::ldexp(1.0, -t);
    auto& r = rows_[static_cast<std::size_t>(bw)];
    if (alpha == 2) {
      r = {1.0 + 0.5 * (1.0 - g2) - lead * 1.5 * gt, -1.0 - 0.5 * n1 + 0.5 * lead, 0.0};
    } else if (alpha == 3) {
      const double g4 = g2 * g2;
      const double p2_sum = ((1.0 - g4) / 3.0 - n1 * eps2) / 3.0;
      r = {1.0 + 0.5 * (1.0 - (1.0 - eps2) / 3.0) + 0.25 * ((1.0 - g4) / 3.0 - p2_sum) -
               lead * 0.25 * (9.0 * gt * gt - (gt * gt - eps2) / 3.0),
           -2.0 - 0.5 * (1.0 - g2) + lead * 1.5 * gt, 0.5 + 0.25 * n1 - 0.25 * lead};
    }
  }
}

double kernel_omega(std::uint64_t y, int alpha, int precision) {
  check_args(alpha, precision);
  switch (alpha) {
    case 2: return detail::omega_alpha2(y, precision);
    case 3: return detail::omega_alpha3(y, precision);
    default: return kernel_omega_dp(y, alpha, precision);
  }
}

}  // namespace hoqmc::cbc
