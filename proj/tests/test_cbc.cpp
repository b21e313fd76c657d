#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "hoqmc/cbc.hpp"
#include "hoqmc/kernel.hpp"
#include "oracles.hpp"

using namespace hoqmc;
using namespace hoqmc::cbc;

namespace {

oracle::Weights as_oracle(const WeightSpec& w) {
  oracle::Weights o;
  o.alpha = w.alpha;
  o.C = w.walsh_constant;
  o.beta = [w](int j) { return w.beta(j); };
  o.product = [w](int j) { return w.is_product_coordinate(j); };
  return o;
}

double oracle_criterion(const InterlacedPointSet& pts, const WeightSpec& w) {
  const auto omega = oracle::omega_all(w.alpha, pts.precision);
  std::vector<std::vector<std::uint64_t>> rows;
  for (std::size_t n = 0; n < pts.n_points; ++n) {
    auto r = pts.row(n);
    rows.emplace_back(r.begin(), r.end());
  }
  return oracle::criterion(rows, as_oracle(w), omega);
}

WeightSpec make_weights(WeightKind kind, int alpha = 2) {
  WeightSpec w;
  w.kind = kind;
  w.alpha = alpha;
  w.theta = 0.4;  // large enough that every dimension matters
  w.zeta = 1.5;
  w.walsh_constant = 0.5;
  return w;
}

GeneratingVector vector_from(const std::vector<BinaryPolynomial>& q, int s, int m, int alpha) {
  GeneratingVector gv;
  gv.modulus = gf2::default_modulus(m);
  gv.m = m;
  gv.alpha = alpha;
  gv.s = s;
  gv.components = q;
  return gv;
}

}  // namespace

TEST_SUITE("cbc") {

TEST_CASE("criterion matches the subset-sum oracle") {
  for (auto kind : {WeightKind::product, WeightKind::spod, WeightKind::hybrid}) {
    for (int alpha : {2, 3}) {
      for (int m : {2, 4}) {
        auto w = make_weights(kind, alpha);
        w.hybrid_cutoff = 1;
        const auto res = cbc_construct(3, m, w, {.policy = ExecutionPolicy::serial});
        const auto pts = lattice::generate_points(res.vector);
        const double want = oracle_criterion(pts, w);
        CHECK(criterion(pts, w, ExecutionPolicy::serial) == doctest::Approx(want).epsilon(1e-10));
        CHECK(criterion(pts, w, ExecutionPolicy::parallel) == doctest::Approx(want).epsilon(1e-10));
        CHECK(res.criterion_trace.back() == doctest::Approx(want).epsilon(1e-10));
      }
    }
  }
}

TEST_CASE("every slot picks the argmin of the recomputed criterion") {
  for (auto kind : {WeightKind::product, WeightKind::spod}) {
    for (int s = 1; s <= 4; ++s) {
      for (int m = 1; m <= 5; ++m) {
        if (s * m > 16) continue;
        const auto w = make_weights(kind);
        CBCOptions opt;
        opt.record_candidate_values = true;
        const auto res = cbc_construct(s, m, w, opt);
        REQUIRE(res.slot_candidates.size() == static_cast<std::size_t>(2 * s));
        std::vector<BinaryPolynomial> chosen;
        for (std::size_t t = 0; t < res.slot_candidates.size(); ++t) {
          const auto& cands = res.slot_candidates[t];
          REQUIRE(cands.size() == (std::size_t{1} << m) - 1);
          std::vector<double> exact;
          for (std::size_t c = 0; c < cands.size(); ++c) {
            auto trial = chosen;
            trial.push_back(cands[c]);
            const auto pts = lattice::generate_partial_points(res.vector.modulus, m, 2, trial);
            exact.push_back(oracle_criterion(pts, w));
            REQUIRE(res.slot_candidate_values[t][c] == doctest::Approx(exact.back()).epsilon(1e-10));
          }
          const double best = *std::min_element(exact.begin(), exact.end());
          const auto pick = res.vector.components[t];
          const auto pos = static_cast<std::size_t>(std::find(cands.begin(), cands.end(), pick) - cands.begin());
          REQUIRE(pos < cands.size());
          CHECK(exact[pos] <= best + 1e-10 * std::abs(best));
          for (std::size_t c = 0; c < pos; ++c) CHECK(exact[c] > exact[pos] - 1e-10 * std::abs(best));
          // Kept value is the running minimum up to the 1e-12 relative tie band.
          const double low = *std::min_element(res.slot_candidate_values[t].begin(), res.slot_candidate_values[t].end());
          CHECK(res.criterion_trace[t] <= low + 1e-12 * std::abs(low));
          chosen.push_back(pick);
        }
      }
    }
  }
}

TEST_CASE("s = 1, m = 3 matches the exhaustive search over 49 pairs") {
  const auto w = make_weights(WeightKind::product);
  const auto res = cbc_construct(1, 3, w);
  double best = std::numeric_limits<double>::infinity();
  std::vector<BinaryPolynomial> arg;
  for (std::uint64_t a = 1; a < 8; ++a) {
    for (std::uint64_t b = 1; b < 8; ++b) {
      const auto gv = vector_from({BinaryPolynomial(a), BinaryPolynomial(b)}, 1, 3, 2);
      const double v = oracle_criterion(lattice::generate_points(gv), w);
      if (arg.empty() || v < best - 1e-12 * std::abs(best)) {
        best = v;
        arg = gv.components;
      }
    }
  }
  CHECK(res.vector.components == arg);
  CHECK(res.criterion_trace.back() == doctest::Approx(best).epsilon(1e-12));
}

TEST_CASE("single product dimension reduces to one kernel sum") {
  const auto w = make_weights(WeightKind::product);
  const auto gv = vector_from({BinaryPolynomial(3), BinaryPolynomial(5)}, 1, 4, 2);
  const auto pts = lattice::generate_points(gv);
  double sum = 0.0;
  for (std::size_t n = 0; n < pts.n_points; ++n) sum += kernel_omega(pts.at(n, 0), 2, 8);
  CHECK(criterion(pts, w) == doctest::Approx(w.product_factor(1) * w.walsh_constant * sum / 16).epsilon(1e-13));
}

TEST_CASE("SPOD with one active coordinate equals product weights") {
  auto spod = make_weights(WeightKind::spod);
  spod.explicit_beta = {0.3};
  auto prod = spod;
  prod.kind = WeightKind::product;
  const auto res = cbc_construct(3, 4, make_weights(WeightKind::spod));
  const auto pts = lattice::generate_points(res.vector);
  CHECK(criterion(pts, spod) == doctest::Approx(criterion(pts, prod)).epsilon(1e-13));
}

TEST_CASE("zero weights give zero criterion") {
  auto w = make_weights(WeightKind::spod);
  w.explicit_beta = {0.0, 0.0, 0.0};
  const auto res = cbc_construct(3, 3, make_weights(WeightKind::spod));
  CHECK(criterion(lattice::generate_points(res.vector), w) == 0.0);
}

TEST_CASE("serial and parallel searches agree bit for bit") {
  for (auto kind : {WeightKind::product, WeightKind::spod}) {
    const auto w = make_weights(kind);
    const auto a = cbc_construct(6, 7, w, {.policy = ExecutionPolicy::serial});
    const auto b = cbc_construct(6, 7, w, {.policy = ExecutionPolicy::parallel});
    CHECK(a.vector == b.vector);
    CHECK(a.criterion_trace == b.criterion_trace);
    const auto c = cbc_construct(6, 7, w, {.policy = ExecutionPolicy::parallel});
    CHECK(c.vector == b.vector);
  }
}

TEST_CASE("trace is positive and the vector is well formed") {
  const auto res = cbc_construct(8, 6, make_weights(WeightKind::spod, 3));
  REQUIRE(res.criterion_trace.size() == 24);
  for (double v : res.criterion_trace) CHECK(v > 0.0);
  CHECK(res.vector.weight_fingerprint == make_weights(WeightKind::spod, 3).fingerprint());
  CHECK_NOTHROW(res.vector.validate());
}

TEST_CASE("restricted candidate sets are deterministic sorted subsets") {
  const auto w = make_weights(WeightKind::spod);
  CBCOptions opt;
  opt.max_candidates = 20;
  opt.record_candidate_values = true;
  const auto a = cbc_construct(3, 8, w, opt);
  const auto b = cbc_construct(3, 8, w, opt);
  CHECK(a.vector == b.vector);
  for (const auto& cands : a.slot_candidates) {
    CHECK(cands.size() == 20);
    CHECK(std::is_sorted(cands.begin(), cands.end(), [](auto x, auto y) { return x.bits() < y.bits(); }));
    CHECK(std::adjacent_find(cands.begin(), cands.end()) == cands.end());
    for (auto q : cands) CHECK((q.bits() >= 1 && q.bits() < 256));
  }
  CHECK(a.slot_candidates[0] != a.slot_candidates[1]);
  opt.candidate_seed = 7;
  const auto c = cbc_construct(3, 8, w, opt);
  CHECK(c.slot_candidates[0] != a.slot_candidates[0]);
  opt.max_candidates = 1000;  // more than exist: full search
  const auto d = cbc_construct(3, 8, w, opt);
  CHECK(d.slot_candidates[0].size() == 255);
}

TEST_CASE("tie rule") {
  CHECK(improves(1.0, 2.0));
  CHECK_FALSE(improves(1.0, 1.0));
  CHECK_FALSE(improves(1.0 - 1e-14, 1.0));
  CHECK(improves(0.5, std::numeric_limits<double>::infinity()));
}

TEST_CASE("order cap") {
  auto w = make_weights(WeightKind::spod);
  CHECK(spod_order_cap(w, 3, 8) == 6);
  CHECK(spod_order_cap(w, 100, 8) <= 60);
  w.kind = WeightKind::product;
  CHECK(spod_order_cap(w, 100, 8) == 0);
}

TEST_CASE("errors") {
  const auto w = make_weights(WeightKind::spod);
  CHECK_THROWS_WITH_AS(cbc_construct(1, 32, w), "precision overflow", std::invalid_argument);
  CBCOptions opt;
  opt.modulus = BinaryPolynomial(0b10101);  // x^4 + x^2 + 1 = (x^2 + x + 1)^2
  CHECK_THROWS_WITH_AS(cbc_construct(1, 4, w, opt), "invalid modulus", std::invalid_argument);
  auto huge = w;
  huge.theta = 1e300;
  CHECK_THROWS_WITH_AS(cbc_construct(4, 4, huge), "criterion overflow", std::overflow_error);
}

}
