#include "hoqmc/quadrature.hpp"

#include <cmath>
#include <stdexcept>

#include <omp.h>

#include "hoqmc/random.hpp"

namespace hoqmc {

int max_threads() { return omp_get_max_threads(); }

namespace quad {

double qmc_integrate(const lattice::InterlacedPointSet& points, const Integrand& g, ExecutionPolicy policy) {
  const std::size_t n = points.n_points;
  std::vector<double> values(n);
  const bool par = policy == ExecutionPolicy::parallel;
#pragma omp parallel if (par)
  {
    std::vector<double> t(static_cast<std::size_t>(points.s));
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < n; ++i) {
      points.point(i, t);
      values[i] = g(t);
    }
  }
  return pairwise_sum(values) / static_cast<double>(n);
}

MCResult mc_estimate(std::size_t n, int s, int repetitions, std::uint64_t seed, const Integrand& g,
                     double reference, ExecutionPolicy policy) {
  if (repetitions < 2) throw std::invalid_argument("at least two repetitions required");
  if (n == 0) throw std::invalid_argument("sample size must be positive");
  if (s < 1) throw std::invalid_argument("s must be positive");
  const auto dim = static_cast<std::size_t>(s);
  const bool par = policy == ExecutionPolicy::parallel;

  MCResult result;
  std::vector<double> values(n);
  for (int r = 0; r < repetitions; ++r) {
    const std::uint64_t key = rng::splitmix64(seed) + static_cast<std::uint64_t>(r);
#pragma omp parallel if (par)
    {
      std::vector<double> t(dim);
#pragma omp for schedule(dynamic, 16)
      for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < dim; ++j) t[j] = rng::uniform(key, i * dim + j);
        values[i] = g(t);
      }
    }
    result.repetitions.push_back(pairwise_sum(values) / static_cast<double>(n));
  }
  result.mean = pairwise_sum(result.repetitions) / repetitions;
  std::vector<double> sq;
  for (double e : result.repetitions) sq.push_back((e - reference) * (e - reference));
  result.l2_error = std::sqrt(pairwise_sum(sq) / repetitions);
  return result;
}

void ConvergenceRecord::add(const ConvergenceRow& row) {
  if (!rows.empty() && row.n <= rows.back().n) throw std::invalid_argument("N must increase across rows");
  rows.push_back(row);
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("slope fit needs two or more points");
  double mx = 0.0, my = 0.0;
  const auto k = static_cast<double>(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) throw std::invalid_argument("slope fit needs positive values");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= k;
  my /= k;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

double fit_slope(const ConvergenceRecord& record, std::size_t last) {
  const std::size_t total = record.rows.size();
  const std::size_t take = (last == 0 || last > total) ? total : last;
  std::vector<double> x, y;
  for (std::size_t i = total - take; i < total; ++i) {
    x.push_back(static_cast<double>(record.rows[i].n));
    y.push_back(record.rows[i].abs_error);
  }
  return fit_slope(x, y);
}

}  // namespace quad
}  // namespace hoqmc
