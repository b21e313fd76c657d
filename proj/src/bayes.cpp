#include "hoqmc/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hoqmc/random.hpp"

namespace hoqmc::bayes {

ObservationSetup::ObservationSetup(std::vector<double> obs_points, Eigen::MatrixXd gamma, Eigen::VectorXd data,
                                   std::uint64_t noise_seed)
    : obs_points_(std::move(obs_points)), gamma_(std::move(gamma)), data_(std::move(data)),
      noise_seed_(noise_seed) {
  const auto k = static_cast<Eigen::Index>(obs_points_.size());
  if (k == 0) throw std::invalid_argument("at least one observation point required");
  for (double x : obs_points_) {
    if (!(x > 0.0 && x < 1.0)) throw std::invalid_argument("observation point outside (0,1)");
  }
  if (gamma_.size() == 0) gamma_ = Eigen::MatrixXd::Identity(k, k);
  if (data_.size() == 0) data_ = Eigen::VectorXd::Zero(k);
  if (gamma_.rows() != k || gamma_.cols() != k) throw std::invalid_argument("covariance size mismatch");
  if (data_.size() != k) throw std::invalid_argument("data size mismatch");
  if ((gamma_ - gamma_.transpose()).cwiseAbs().maxCoeff() > 1e-12 * gamma_.cwiseAbs().maxCoeff()) {
    throw std::invalid_argument("covariance not symmetric positive definite");
  }
  llt_.compute(gamma_);
  if (llt_.info() != Eigen::Success) throw std::invalid_argument("covariance not symmetric positive definite");
}

void ObservationSetup::set_data(Eigen::VectorXd data) {
  if (data.size() != static_cast<Eigen::Index>(obs_points_.size())) throw std::invalid_argument("data size mismatch");
  data_ = std::move(data);
}

double ObservationSetup::potential(std::span<const double> observations) const {
  if (observations.size() != obs_points_.size()) throw std::invalid_argument("observation size mismatch");
  const Eigen::Map<const Eigen::VectorXd> g(observations.data(), static_cast<Eigen::Index>(observations.size()));
  const Eigen::VectorXd w = llt_.matrixL().solve(data_ - g);
  return 0.5 * w.squaredNorm();
}

double density(double phi) { return phi > kPhiFlush ? 0.0 : std::exp(-phi); }

ObservationSetup synthesize_data(const forward::ForwardModel& model, std::span<const double> y_star,
                                 const ObservationSetup& setup, bool add_noise) {
  if (model.obs_points() != setup.obs_points()) throw std::invalid_argument("observation points differ from model");
  const auto out = model(y_star);
  const auto k = static_cast<Eigen::Index>(setup.size());
  Eigen::VectorXd delta = Eigen::Map<const Eigen::VectorXd>(out.observations.data(), k);
  if (add_noise) {
    Eigen::VectorXd z(k);
    for (Eigen::Index i = 0; i < k; ++i) z(i) = rng::normal(setup.noise_seed(), static_cast<std::uint64_t>(i));
    const Eigen::MatrixXd l = setup.gamma().llt().matrixL();
    delta += l * z;
  }
  ObservationSetup result = setup;
  result.set_data(std::move(delta));
  return result;
}

RatioEstimate ratio_estimate(const PointEvaluator& eval, const ObservationSetup& setup,
                             const lattice::InterlacedPointSet& points, ExecutionPolicy policy) {
  const std::size_t n = points.n_points;
  const int s = points.s;
  const std::size_t k = setup.size();
  std::vector<double> theta(n), theta_phi(n), phi(n);

  const bool par = policy == ExecutionPolicy::parallel;
#pragma omp parallel if (par)
  {
    std::vector<double> y(static_cast<std::size_t>(s));
    std::vector<double> obs(k);
#pragma omp for schedule(dynamic, 16)
    for (std::size_t i = 0; i < n; ++i) {
      points.point(i, y);
      for (double& v : y) v = 2.0 * v - 1.0;
      double f = 0.0;
      eval(y, f, obs);
      const double t = density(setup.potential(obs));
      phi[i] = f;
      theta[i] = t;
      theta_phi[i] = t * f;
    }
  }

  RatioEstimate r;
  r.n = n;
  r.s = s;
  const double inv_n = 1.0 / static_cast<double>(n);
  r.z = pairwise_sum(theta) * inv_n;
  r.z_prime = pairwise_sum(theta_phi) * inv_n;
  r.prior_mean = pairwise_sum(phi) * inv_n;
  const auto [lo, hi] = std::minmax_element(phi.begin(), phi.end());
  r.phi_min = *lo;
  r.phi_max = *hi;
  if (!(r.z >= 1e-300)) throw std::runtime_error("posterior mass underflow");
  r.posterior_mean = r.z_prime / r.z;
  return r;
}

RatioEstimate ratio_estimate(const forward::ForwardModel& model, const ObservationSetup& setup,
                             const lattice::InterlacedPointSet& points, ExecutionPolicy policy) {
  if (points.s != model.model().s) throw std::invalid_argument("point set dimension differs from model");
  if (model.obs_points() != setup.obs_points()) throw std::invalid_argument("observation points differ from model");
  const PointEvaluator eval = [&model](std::span<const double> y, double& phi, std::span<double> obs) {
    const auto out = model(y);
    phi = out.qoi;
    std::copy(out.observations.begin(), out.observations.end(), obs.begin());
  };
  return ratio_estimate(eval, setup, points, policy);
}

std::vector<double> default_y_star(int s) {
  std::vector<double> y(static_cast<std::size_t>(std::max(s, 0)), 0.0);
  const double head[] = {0.3, -0.7, 0.2};
  for (std::size_t i = 0; i < y.size() && i < 3; ++i) y[i] = head[i];
  return y;
}

}  // namespace hoqmc::bayes
