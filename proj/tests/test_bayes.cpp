#include <doctest.h>

#include <cmath>

#include "hoqmc/bayes.hpp"
#include "hoqmc/cbc.hpp"
#include "oracles.hpp"

using namespace hoqmc;
using namespace hoqmc::bayes;

namespace {

const std::vector<double> kObs = {0.2, 0.5, 0.7};

lattice::InterlacedPointSet rule(int s, int m) {
  cbc::WeightSpec w;
  w.alpha = 2;
  w.theta = 0.2;
  return lattice::generate_points(cbc::cbc_construct(s, m, w).vector);
}

forward::ForwardModel small_model(int s, int level = 7) {
  return {forward::UncertaintyModel::kl(s), forward::FEMConfig{.degree = 1, .level = level}, kObs, 0.25};
}

}  // namespace

TEST_SUITE("bayes") {

TEST_CASE("potential") {
  Eigen::VectorXd delta(3);
  delta << 1.0, 2.0, 3.0;
  const ObservationSetup id(kObs, {}, delta);
  const std::vector<double> zero = {0.0, 0.0, 0.0};
  CHECK(id.potential(zero) == 7.0);
  const std::vector<double> same = {1.0, 2.0, 3.0};
  CHECK(id.potential(same) == 0.0);
  const ObservationSetup scaled(kObs, 4.0 * Eigen::MatrixXd::Identity(3, 3), delta);
  CHECK(scaled.potential(zero) == 1.75);

  Eigen::MatrixXd g(3, 3);
  g << 2.0, 0.5, 0.0, 0.5, 1.0, 0.2, 0.0, 0.2, 3.0;
  const ObservationSetup full(kObs, g, delta);
  const Eigen::Vector3d r(1.0, 2.0, 3.0);
  CHECK(full.potential(zero) == doctest::Approx(0.5 * r.dot(g.inverse() * r)).epsilon(1e-14));
}

TEST_CASE("invalid covariance") {
  Eigen::MatrixXd g = Eigen::MatrixXd::Identity(3, 3);
  g(2, 2) = -1.0;
  CHECK_THROWS_AS(ObservationSetup(kObs, g), std::invalid_argument);
  CHECK_THROWS_AS(ObservationSetup(kObs, Eigen::MatrixXd::Identity(2, 2)), std::invalid_argument);
  Eigen::MatrixXd asym = Eigen::MatrixXd::Identity(3, 3);
  asym(0, 1) = 0.5;
  CHECK_THROWS_AS(ObservationSetup(kObs, asym), std::invalid_argument);
}

TEST_CASE("density flush") {
  CHECK(density(0.0) == 1.0);
  CHECK(density(1.0) == std::exp(-1.0));
  CHECK(density(kPhiFlush + 1.0) == 0.0);
}

TEST_CASE("synthetic data") {
  const auto fm = small_model(4);
  const auto y = default_y_star(4);
  CHECK(y == std::vector<double>{0.3, -0.7, 0.2, 0.0});
  const ObservationSetup templ(kObs, {}, {}, 2024);
  const auto clean = synthesize_data(fm, y, templ, false);
  const auto out = fm(y);
  CHECK(clean.potential(out.observations) == 0.0);
  const auto a = synthesize_data(fm, y, templ);
  const auto b = synthesize_data(fm, y, templ);
  CHECK(a.data() == b.data());
  CHECK(a.data() != clean.data());
  const auto c = synthesize_data(fm, y, ObservationSetup(kObs, {}, {}, 7));
  CHECK(c.data() != a.data());
  // eta = L z with Gamma = 4 I doubles the noise.
  const auto d = synthesize_data(fm, y, ObservationSetup(kObs, 4.0 * Eigen::MatrixXd::Identity(3, 3), {}, 2024));
  for (int i = 0; i < 3; ++i) CHECK(d.data()(i) - clean.data()(i) == doctest::Approx(2.0 * (a.data()(i) - clean.data()(i))));
}

TEST_CASE("constant quantity of interest") {
  const auto pts = rule(2, 6);
  const ObservationSetup setup(kObs, {}, Eigen::Vector3d(1.0, 2.0, 0.5));
  for (double c : {4.0, 3.7}) {
    const PointEvaluator eval = [c](std::span<const double> y, double& phi, std::span<double> obs) {
      phi = c;
      for (std::size_t k = 0; k < obs.size(); ++k) obs[k] = y[0] + static_cast<double>(k);
    };
    const auto est = ratio_estimate(eval, setup, pts);
    CHECK(est.posterior_mean == doctest::Approx(c).epsilon(1e-15));
    if (c == 4.0) CHECK(est.posterior_mean == c);
  }
}

TEST_CASE("flat likelihood returns the prior mean") {
  const auto pts = rule(3, 7);
  const auto fm = small_model(3);
  const ObservationSetup setup(kObs, 1e300 * Eigen::MatrixXd::Identity(3, 3));
  const auto est = ratio_estimate(fm, setup, pts);
  CHECK(est.z == 1.0);
  CHECK(est.posterior_mean == est.prior_mean);
}

TEST_CASE("mass and weighted-mean bounds") {
  const auto pts = rule(4, 7);
  const auto fm = small_model(4);
  const auto setup = synthesize_data(fm, default_y_star(4), ObservationSetup(kObs, {}, {}, 3));
  const auto est = ratio_estimate(fm, setup, pts);
  CHECK(est.z > 0.0);
  CHECK(est.z <= 1.0);
  CHECK(est.posterior_mean >= est.phi_min);
  CHECK(est.posterior_mean <= est.phi_max);
  CHECK(est.n == 128);
  CHECK(est.s == 4);
  const auto serial = ratio_estimate(fm, setup, pts, ExecutionPolicy::serial);
  CHECK(serial.posterior_mean == est.posterior_mean);
  CHECK(serial.z == est.z);
}

TEST_CASE("degenerate data underflows") {
  const auto pts = rule(2, 4);
  const auto fm = small_model(2);
  const ObservationSetup setup(kObs, 1e-6 * Eigen::MatrixXd::Identity(3, 3), Eigen::Vector3d(1e3, 1e3, 1e3));
  CHECK_THROWS_WITH_AS(ratio_estimate(fm, setup, pts), "posterior mass underflow", std::runtime_error);
}

TEST_CASE("posterior mean matches a tensor Gauss-Legendre oracle at s = 2") {
  const auto fm = small_model(2);
  const auto setup = synthesize_data(fm, default_y_star(2), ObservationSetup(kObs, {}, {}, 2024));
  std::vector<double> x, w;
  oracle::gauss_legendre32(x, w);
  double z = 0.0, zp = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < x.size(); ++j) {
      const std::vector<double> y = {x[i], x[j]};
      const auto out = fm(y);
      const double theta = std::exp(-setup.potential(out.observations));
      const double weight = 0.25 * w[i] * w[j];
      z += weight * theta;
      zp += weight * theta * out.qoi;
    }
  }
  const auto est = ratio_estimate(fm, setup, rule(2, 14));
  CHECK(std::abs(est.posterior_mean - zp / z) <= 1e-6);
  CHECK(std::abs(est.z - z) <= 1e-6);
}

TEST_CASE("zero-noise data at the origin pulls the posterior toward it") {
  const auto fm = small_model(4);
  const std::vector<double> origin(4, 0.0);
  const auto setup = synthesize_data(fm, origin, ObservationSetup(kObs, 0.01 * Eigen::MatrixXd::Identity(3, 3)), false);
  const auto est = ratio_estimate(fm, setup, rule(4, 10));
  const double phi0 = fm(origin).qoi;
  CHECK(std::abs(est.posterior_mean - phi0) < std::abs(est.prior_mean - phi0));
}

TEST_CASE("posterior mean depends Lipschitz continuously on the data") {
  const auto fm = small_model(3);
  const auto pts = rule(3, 8);
  auto setup = synthesize_data(fm, default_y_star(3), ObservationSetup(kObs, {}, {}, 11));
  const double base = ratio_estimate(fm, setup, pts).posterior_mean;
  const Eigen::VectorXd delta = setup.data();
  std::vector<double> slopes;
  for (double eps : {1e-2, 1e-3, 1e-4}) {
    Eigen::VectorXd moved = delta;
    moved(1) += eps;
    setup.set_data(moved);
    slopes.push_back((ratio_estimate(fm, setup, pts).posterior_mean - base) / eps);
  }
  CHECK(std::abs(slopes[0]) > 0.0);
  CHECK(slopes[1] == doctest::Approx(slopes[0]).epsilon(0.05));
  CHECK(slopes[2] == doctest::Approx(slopes[1]).epsilon(0.01));
}

}
