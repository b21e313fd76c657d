#pragma once

// Equal-weight QMC and plain Monte Carlo estimators, convergence records and
// the log-log rate fit used by the studies.

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "hoqmc/execution.hpp"
#include "hoqmc/polylattice.hpp"

namespace hoqmc::quad {

/// g(t) for t in [0,1]^s.  Must be safe to call concurrently.
using Integrand = std::function<double(std::span<const double> t)>;

/// (1/N) sum_n g(t_n), reduced pairwise in point order.
double qmc_integrate(const lattice::InterlacedPointSet& points, const Integrand& g,
                     ExecutionPolicy policy = ExecutionPolicy::parallel);

struct MCResult {
  double mean = 0.0;                 // average of the repetition means
  double l2_error = 0.0;             // RMS deviation of repetition means from the reference
  std::vector<double> repetitions;
};

/// R independent N-point estimates.  Sample n of repetition r, coordinate j,
/// is drawn from a counter-based stream, so results do not depend on threads.
/// Throws std::invalid_argument for R < 2 or N = 0.
MCResult mc_estimate(std::size_t n, int s, int repetitions, std::uint64_t seed, const Integrand& g,
                     double reference, ExecutionPolicy policy = ExecutionPolicy::parallel);

struct ConvergenceRow {
  int m = 0;
  std::size_t n = 0;
  double estimate = 0.0;
  double reference = 0.0;
  double abs_error = 0.0;
  double seconds = 0.0;
};

struct ConvergenceRecord {
  std::vector<std::pair<std::string, std::string>> metadata;
  std::vector<ConvergenceRow> rows;

  /// Throws std::invalid_argument unless n exceeds the previous row's n.
  void add(const ConvergenceRow& row);
};

/// Least-squares slope of log(y) against log(x).
double fit_slope(std::span<const double> x, std::span<const double> y);

/// Slope of abs_error against n over the last `last` rows (all rows if 0).
double fit_slope(const ConvergenceRecord& record, std::size_t last = 5);

}  // namespace hoqmc::quad
