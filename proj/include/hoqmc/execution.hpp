#pragma once

// Execution policy shared by the data-parallel kernels, plus the deterministic
// reduction they all funnel through.  Every kernel has a serial path that is
// kept as the reference; the parallel path must reproduce it bit for bit.

#include <cstddef>
#include <span>

namespace hoqmc {

enum class ExecutionPolicy { serial, parallel };

/// Pairwise (cascade) summation with a fixed split order.  The result depends
/// only on the input sequence, never on thread count.
inline double pairwise_sum(std::span<const double> v) {
  constexpr std::size_t kBlock = 32;
  if (v.size() <= kBlock) {
    double s = 0.0;
    for (double x : v) s += x;
    return s;
  }
  const std::size_t half = v.size() / 2;
  return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

/// Number of OpenMP threads the parallel policy will use.
int max_threads();

}  // namespace hoqmc
