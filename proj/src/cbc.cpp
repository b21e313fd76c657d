#include "hoqmc/cbc.hpp"

#include <algorithm>
#include <bit>
#include <cfloat>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "hoqmc/gf2poly.hpp"
#include "hoqmc/kernel.hpp"
#include "hoqmc/random.hpp"

namespace hoqmc::cbc {

namespace {

constexpr int kOrderHardCap = 60;
constexpr double kTieTolerance = 1e-12;

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

void check_finite(double v) {
  if (!std::isfinite(v)) throw std::overflow_error("criterion overflow");
}

// Calls f with a callable y -> omega(y) for fixed alpha and precision.
template <class F>
decltype(auto) with_kernel(int alpha, int precision, F&& f) {
  const KernelTable table(alpha, precision);
  return f([&table](std::uint64_t y) { return table(y); });
}

// Per-point running state of the criterion over the dimensions chosen so far.
struct PointState {
  std::size_t n = 0;
  int order_cap = 0;              // L
  std::vector<double> prod;       // P_n
  std::vector<double> spod;       // V_n(0..L), row-major
  std::vector<double> spod_sum;   // S_n = sum_l l! V_n(l)
  std::vector<double> fact;       // l!, l = 0..L

  PointState(std::size_t n_points, int cap)
      : n(n_points), order_cap(cap), prod(n_points, 1.0),
        spod(n_points * static_cast<std::size_t>(cap + 1), 0.0), spod_sum(n_points, 1.0),
        fact(static_cast<std::size_t>(cap + 1)) {
    for (std::size_t i = 0; i < n; ++i) spod[i * stride()] = 1.0;
    for (int l = 0; l <= cap; ++l) fact[static_cast<std::size_t>(l)] = factorial(l);
  }

  [[nodiscard]] std::size_t stride() const { return static_cast<std::size_t>(order_cap + 1); }

  // W_n for coordinate j; E after choosing it is base + mean(W_n omega_n).
  void weights(const WeightSpec& w, int j, std::vector<double>& out) const {
    out.resize(n);
    if (w.is_product_coordinate(j)) {
      const double cg = w.walsh_constant * w.product_factor(j);
      for (std::size_t i = 0; i < n; ++i) out[i] = cg * prod[i] * spod_sum[i];
      return;
    }
    std::vector<double> ot(static_cast<std::size_t>(w.alpha + 1));
    for (int nu = 1; nu <= w.alpha; ++nu) ot[static_cast<std::size_t>(nu)] = w.order_term(j, nu);
    for (std::size_t i = 0; i < n; ++i) {
      const double* v = &spod[i * stride()];
      double d = 0.0;
      for (int l = 1; l <= order_cap; ++l) {
        double inner = 0.0;
        for (int nu = 1; nu <= std::min(w.alpha, l); ++nu) inner += ot[static_cast<std::size_t>(nu)] * v[l - nu];
        d += fact[static_cast<std::size_t>(l)] * inner;
      }
      out[i] = w.walsh_constant * prod[i] * d;
    }
  }

  [[nodiscard]] double base_mean() const {
    std::vector<double> t(n);
    for (std::size_t i = 0; i < n; ++i) t[i] = prod[i] * spod_sum[i] - 1.0;
    return pairwise_sum(t) / static_cast<double>(n);
  }

  // Folds coordinate j with kernel values omega_n into the state.
  void absorb(const WeightSpec& w, int j, std::span<const double> omega) {
    if (w.is_product_coordinate(j)) {
      const double cg = w.walsh_constant * w.product_factor(j);
      for (std::size_t i = 0; i < n; ++i) prod[i] *= 1.0 + cg * omega[i];
      return;
    }
    std::vector<double> ot(static_cast<std::size_t>(w.alpha + 1));
    for (int nu = 1; nu <= w.alpha; ++nu) ot[static_cast<std::size_t>(nu)] = w.order_term(j, nu);
    for (std::size_t i = 0; i < n; ++i) {
      double* v = &spod[i * stride()];
      const double c = w.walsh_constant * omega[i];
      // Descending l reads only lower, not yet updated, entries.
      for (int l = order_cap; l >= 1; --l) {
        double inner = 0.0;
        for (int nu = 1; nu <= std::min(w.alpha, l); ++nu) inner += ot[static_cast<std::size_t>(nu)] * v[l - nu];
        v[l] += c * inner;
      }
      double sum = 0.0;
      for (int l = 0; l <= order_cap; ++l) sum += fact[static_cast<std::size_t>(l)] * v[l];
      spod_sum[i] = sum;
    }
  }
};

std::vector<BinaryPolynomial> slot_candidates(int m, const CBCOptions& opt, int slot_index) {
  const std::uint64_t total = (std::uint64_t{1} << m) - 1;
  std::vector<std::uint64_t> pool(total);
  for (std::uint64_t i = 0; i < total; ++i) pool[i] = i + 1;
  std::size_t take = pool.size();
  if (opt.max_candidates > 0 && opt.max_candidates < pool.size()) {
    // Partial Fisher-Yates on a counter-based stream keyed by slot.
    take = opt.max_candidates;
    const std::uint64_t key = rng::splitmix64(opt.candidate_seed) ^ static_cast<std::uint64_t>(slot_index);
    for (std::size_t i = 0; i < take; ++i) {
      const std::size_t r = i + static_cast<std::size_t>(rng::bits(key, i) % (pool.size() - i));
      std::swap(pool[i], pool[r]);
    }
    pool.resize(take);
    std::sort(pool.begin(), pool.end());
  }
  std::vector<BinaryPolynomial> out;
  out.reserve(take);
  for (auto v : pool) out.emplace_back(v);
  return out;
}

std::vector<std::uint64_t> slot_columns(BinaryPolynomial q, BinaryPolynomial p, int m, int slot, int alpha) {
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    cols[static_cast<std::size_t>(i)] =
        lattice::spread_to_slot(lattice::laurent_value(std::uint64_t{1} << i, q, p, m), slot, alpha, m);
  }
  return cols;
}

// sum_n W_n omega(b_n ^ z_n) with z the slot contribution of one candidate.
// Both orders store terms by natural index and reduce with pairwise_sum, so
// the serial and Gray-code paths agree bit for bit.
template <class Omega>
double slot_sum_natural(std::span<const double> W, std::span<const std::uint64_t> b,
                        std::span<const std::uint64_t> cols, std::vector<std::uint64_t>& z,
                        std::vector<double>& terms, Omega omega) {
  const std::size_t n = W.size();
  z[0] = 0;
  terms[0] = W[0] * omega(b[0]);
  for (std::size_t i = 1; i < n; ++i) {
    z[i] = z[i & (i - 1)] ^ cols[static_cast<std::size_t>(std::countr_zero(i))];
    terms[i] = W[i] * omega(b[i] ^ z[i]);
  }
  return pairwise_sum(terms);
}

template <class Omega>
double slot_sum_gray(std::span<const double> W, std::span<const std::uint64_t> b,
                     std::span<const std::uint64_t> cols, std::vector<double>& terms, Omega omega) {
  const std::size_t n = W.size();
  std::uint64_t y = 0;
  terms[0] = W[0] * omega(b[0]);
  for (std::size_t g = 1; g < n; ++g) {
    y ^= cols[static_cast<std::size_t>(std::countr_zero(g))];
    const std::size_t i = g ^ (g >> 1);
    terms[i] = W[i] * omega(b[i] ^ y);
  }
  return pairwise_sum(terms);
}

}  // namespace

bool improves(double value, double best) {
  if (!std::isfinite(best)) return value < best;
  return value < best - kTieTolerance * std::abs(best);
}

int spod_order_cap(const WeightSpec& w, int s, int precision) {
  int spod_dims = 0;
  double beta_max = 0.0;
  for (int j = 1; j <= s; ++j) {
    if (w.is_product_coordinate(j)) continue;
    ++spod_dims;
    beta_max = std::max(beta_max, w.beta(j));
  }
  int cap = std::min(w.alpha * spod_dims, kOrderHardCap);
  if (cap == 0 || beta_max == 0.0) return cap;
  const double factor = std::max(1.0, 2.0 * w.walsh_constant * kernel_omega(0, w.alpha, precision)) * beta_max;
  const double floor = std::log(DBL_MIN);
  for (int l = 1; l <= cap; ++l) {
    if (std::lgamma(l + 1.0) + l * std::log(factor) < floor) return l - 1;
  }
  return cap;
}

double criterion(const InterlacedPointSet& points, const WeightSpec& w, ExecutionPolicy policy) {
  w.validate();
  const int s = points.s;
  const int cap = spod_order_cap(w, s, points.precision);
  const std::size_t n = points.n_points;
  std::vector<double> terms(n);
  std::vector<double> fact(static_cast<std::size_t>(cap + 1));
  for (int l = 0; l <= cap; ++l) fact[static_cast<std::size_t>(l)] = factorial(l);

  with_kernel(w.alpha, points.precision, [&](auto omega) {
    auto point_term = [&](std::size_t i, std::vector<double>& v) {
      std::fill(v.begin(), v.end(), 0.0);
      v[0] = 1.0;
      double prod = 1.0;
      for (int j = 1; j <= s; ++j) {
        const double om = omega(points.at(i, j - 1));
        if (w.is_product_coordinate(j)) {
          prod *= 1.0 + w.walsh_constant * w.product_factor(j) * om;
          continue;
        }
        for (int l = cap; l >= 1; --l) {
          double inner = 0.0;
          for (int nu = 1; nu <= std::min(w.alpha, l); ++nu) inner += w.order_term(j, nu) * v[static_cast<std::size_t>(l - nu)];
          v[static_cast<std::size_t>(l)] += w.walsh_constant * om * inner;
        }
      }
      double sum = 0.0;
      for (int l = 0; l <= cap; ++l) sum += fact[static_cast<std::size_t>(l)] * v[static_cast<std::size_t>(l)];
      terms[i] = prod * sum - 1.0;
    };
    const bool par = policy == ExecutionPolicy::parallel;
#pragma omp parallel if (par)
    {
      std::vector<double> v(static_cast<std::size_t>(cap + 1));
#pragma omp for schedule(static)
      for (std::size_t i = 0; i < n; ++i) point_term(i, v);
    }
  });
  const double e = pairwise_sum(terms) / static_cast<double>(n);
  check_finite(e);
  return e;
}

CBCResult cbc_construct(int s, int m, const WeightSpec& w, const CBCOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  w.validate();
  if (s < 1) throw std::invalid_argument("s must be positive");
  if (m < 1) throw std::invalid_argument("m must be positive");
  const int alpha = w.alpha;
  const int precision = alpha * m;
  if (precision > lattice::kMaxPrecision) throw std::invalid_argument("precision overflow");

  const BinaryPolynomial p = opt.modulus.is_zero() ? gf2::default_modulus(m) : opt.modulus;
  if (p.degree() != m || !gf2::is_irreducible(p)) throw std::invalid_argument("invalid modulus");

  CBCResult result;
  result.vector.modulus = p;
  result.vector.m = m;
  result.vector.alpha = alpha;
  result.vector.s = s;
  result.vector.weight_fingerprint = w.fingerprint();

  const std::size_t n = std::size_t{1} << m;
  const double inv_n = 1.0 / static_cast<double>(n);
  PointState state(n, spod_order_cap(w, s, precision));
  std::vector<double> W;
  std::vector<std::uint64_t> b(n);
  std::vector<double> omega_n(n);
  const bool par = opt.policy == ExecutionPolicy::parallel;

  with_kernel(alpha, precision, [&](auto omega) {
    for (int j = 1; j <= s; ++j) {
      state.weights(w, j, W);
      for (double x : W) check_finite(x);
      const double base = state.base_mean();
      check_finite(base);
      std::fill(b.begin(), b.end(), 0);

      for (int slot = 0; slot < alpha; ++slot) {
        const auto candidates = slot_candidates(m, opt, (j - 1) * alpha + slot);
        const auto nc = static_cast<std::ptrdiff_t>(candidates.size());
        std::vector<double> values(candidates.size());

#pragma omp parallel if (par)
        {
          std::vector<double> terms(n);
          std::vector<std::uint64_t> z(par ? 0 : n);
#pragma omp for schedule(dynamic, 4)
          for (std::ptrdiff_t c = 0; c < nc; ++c) {
            const auto cols = slot_columns(candidates[static_cast<std::size_t>(c)], p, m, slot, alpha);
            const double sum = par ? slot_sum_gray(W, b, cols, terms, omega)
                                   : slot_sum_natural(W, b, cols, z, terms, omega);
            values[static_cast<std::size_t>(c)] = base + inv_n * sum;
          }
        }

        std::size_t best = 0;
        for (std::size_t c = 0; c < values.size(); ++c) {
          check_finite(values[c]);
          if (c > 0 && improves(values[c], values[best])) best = c;
        }
        const BinaryPolynomial chosen = candidates[best];
        result.vector.components.push_back(chosen);
        result.criterion_trace.push_back(values[best]);
        if (opt.record_candidate_values) {
          result.slot_candidates.push_back(candidates);
          result.slot_candidate_values.push_back(std::move(values));
        }

        const auto cols = slot_columns(chosen, p, m, slot, alpha);
        std::vector<std::uint64_t> z(n);
        for (std::size_t i = 1; i < n; ++i) {
          z[i] = z[i & (i - 1)] ^ cols[static_cast<std::size_t>(std::countr_zero(i))];
        }
        for (std::size_t i = 0; i < n; ++i) b[i] ^= z[i];
      }

      for (std::size_t i = 0; i < n; ++i) omega_n[i] = omega(b[i]);
      state.absorb(w, j, omega_n);
    }
  });

  result.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace hoqmc::cbc
