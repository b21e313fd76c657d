#pragma once

// Gaussian-noise Bayesian inversion under the uniform prior on [-1,1]^s.
//
//   Phi(y)  = 1/2 (delta - G(y))^T Gamma^-1 (delta - G(y))
//   Theta   = exp(-Phi)
//   E[phi | delta] = Z' / Z,  Z = E[Theta],  Z' = E[Theta phi]
//
// Both integrals use the same QMC rule and share one forward solve per point.

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "hoqmc/execution.hpp"
#include "hoqmc/forward.hpp"
#include "hoqmc/polylattice.hpp"

namespace hoqmc::bayes {

/// Densities with Phi above this are flushed to zero.
inline constexpr double kPhiFlush = 700.0;

class ObservationSetup {
 public:
  ObservationSetup() : ObservationSetup({0.2, 0.5, 0.7}) {}
  /// Gamma defaults to the identity and the data to zero.  Throws
  /// std::invalid_argument if Gamma is not symmetric positive definite.
  explicit ObservationSetup(std::vector<double> obs_points, Eigen::MatrixXd gamma = {},
                            Eigen::VectorXd data = {}, std::uint64_t noise_seed = 0);

  [[nodiscard]] const std::vector<double>& obs_points() const { return obs_points_; }
  [[nodiscard]] const Eigen::MatrixXd& gamma() const { return gamma_; }
  [[nodiscard]] const Eigen::VectorXd& data() const { return data_; }
  [[nodiscard]] std::uint64_t noise_seed() const { return noise_seed_; }
  [[nodiscard]] std::size_t size() const { return obs_points_.size(); }

  void set_data(Eigen::VectorXd data);

  /// Phi for predicted observations, via triangular solves with the cached
  /// Cholesky factor.
  [[nodiscard]] double potential(std::span<const double> observations) const;

 private:
  std::vector<double> obs_points_;
  Eigen::MatrixXd gamma_;
  Eigen::VectorXd data_;
  std::uint64_t noise_seed_ = 0;
  Eigen::LLT<Eigen::MatrixXd> llt_;
};

/// Theta = exp(-Phi), or 0 when Phi > kPhiFlush.
double density(double phi);

/// delta = G(y*) + eta, eta ~ N(0, Gamma) drawn from the counter-based stream
/// keyed by the template's noise seed.  With add_noise = false, eta = 0.
ObservationSetup synthesize_data(const forward::ForwardModel& model, std::span<const double> y_star,
                                 const ObservationSetup& setup, bool add_noise = true);

struct RatioEstimate {
  double z = 0.0;
  double z_prime = 0.0;
  double posterior_mean = 0.0;
  double prior_mean = 0.0;  // (1/N) sum phi_n from the same pass
  double phi_min = 0.0;
  double phi_max = 0.0;
  std::size_t n = 0;
  int s = 0;
};

/// Maps y in [-1,1]^s to (phi, observations).
using PointEvaluator = std::function<void(std::span<const double> y, double& phi, std::span<double> obs)>;

/// Ratio estimator over a point set in [0,1]^s (y = 2t - 1).  Throws
/// std::runtime_error("posterior mass underflow") when Z < 1e-300.
RatioEstimate ratio_estimate(const PointEvaluator& eval, const ObservationSetup& setup,
                             const lattice::InterlacedPointSet& points,
                             ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Same with the forward model's QoI and observations.
RatioEstimate ratio_estimate(const forward::ForwardModel& model, const ObservationSetup& setup,
                             const lattice::InterlacedPointSet& points,
                             ExecutionPolicy policy = ExecutionPolicy::parallel);

/// Default synthetic truth: (0.3, -0.7, 0.2, 0, ...) cut to length s.
std::vector<double> default_y_star(int s);

}  // namespace hoqmc::bayes
