#pragma once

// Affine-parametric diffusion coefficient u(x, y) = <u> + sum_j y_j psi_j(x),
// y in [-1,1]^s, and the forward map y -> (QoI, observations).
//
// Two bases:
//   kl         psi_{2k-1} = (2k-1)^-zeta cos(k pi x),  psi_{2k} = (2k)^-zeta sin(k pi x)
//   indicator  psi_j = theta j^-zeta on D_j = (x_{j-1}, x_j),  x_j = (j/s)^a

#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "hoqmc/fem1d.hpp"

namespace hoqmc::forward {

enum class BasisKind { kl, indicator };

BasisKind parse_basis(const std::string& name);
std::string to_string(BasisKind kind);

struct UncertaintyModel {
  BasisKind basis = BasisKind::kl;
  int s = 1;
  double mean = 2.0;     // <u>
  double theta = 0.25;   // indicator amplitude
  double zeta = 2.0;
  double grading = 0.2;  // indicator partition exponent a
  double source = 100.0; // f = source * x (kl) or f = source (indicator)

  static UncertaintyModel kl(int s, double zeta = 2.0, double mean = 2.0);
  static UncertaintyModel indicator(int s, double theta = 0.25, double zeta = 2.0, double mean = 1.0,
                                    double grading = 0.2);

  /// psi_j(x), 1-based j.
  [[nodiscard]] double psi(int j, double x) const;
  /// sup_x |psi_j(x)|.
  [[nodiscard]] double psi_sup(int j) const;
  /// <u> minus the worst-case perturbation over y in [-1,1]^s.  Indicator
  /// supports are disjoint, so only the largest amplitude counts there.
  [[nodiscard]] double margin() const;
  /// Partition 0 = x_0 < ... < x_s = 1 of the indicator basis.
  [[nodiscard]] std::vector<double> partition() const;
  [[nodiscard]] fem::SourceTerm source_term() const;

  /// Throws std::invalid_argument("ellipticity violated") when margin() <= 0,
  /// or for out-of-range fields.
  void validate() const;
};

using ParameterVector = std::vector<double>;

/// Throws std::invalid_argument("parameter out of range") unless |y_j| <= 1.
void check_parameters(std::span<const double> y, int s);

/// Entries beyond s_prime set to zero.  Throws if s_prime is outside [0, |y|].
ParameterVector truncate(std::span<const double> y, int s_prime);

/// Coefficient for parameter y.  kl -> smooth callable, indicator ->
/// per-cell constants.  Records u_min = <u> - sum_j |y_j| sup|psi_j| (kl) or the
/// smallest cell value (indicator).
fem::DiffusionCoefficient coefficient_field(const UncertaintyModel& model, std::span<const double> y);

struct FEMConfig {
  int degree = 1;
  int level = 10;        // uniform mesh h = 2^-level
  bool graded = false;   // graded mesh aligned with the indicator partition
  int graded_refine = 0; // uniform splits per graded cell (2^refine)

  [[nodiscard]] std::shared_ptr<const fem::Mesh1D> make_mesh(const UncertaintyModel& model) const;
};

struct Outputs {
  double qoi = 0.0;
  std::vector<double> observations;
};

/// Forward map with the basis tabulated once at the mesh's Gauss points.
/// Evaluation is const and safe to call from many threads.
class ForwardModel {
 public:
  ForwardModel(UncertaintyModel model, FEMConfig fem, std::vector<double> obs_points, double qoi_point);

  [[nodiscard]] const UncertaintyModel& model() const { return model_; }
  [[nodiscard]] const FEMConfig& fem_config() const { return fem_; }
  [[nodiscard]] const fem::Mesh1D& mesh() const { return *mesh_; }
  [[nodiscard]] const std::vector<double>& obs_points() const { return obs_points_; }
  [[nodiscard]] double qoi_point() const { return qoi_point_; }

  /// Coefficient values at the Gauss points for parameter y (length s).
  void coefficient_samples(std::span<const double> y, std::vector<double>& out) const;

  [[nodiscard]] fem::FEMSolution solve(std::span<const double> y) const;
  [[nodiscard]] Outputs operator()(std::span<const double> y) const;

 private:
  UncertaintyModel model_;
  FEMConfig fem_;
  std::vector<double> obs_points_;
  double qoi_point_;
  std::shared_ptr<const fem::Mesh1D> mesh_;
  fem::SourceTerm source_;
  Eigen::MatrixXd table_;        // kl: Gauss points x s
  std::vector<int> owner_;       // indicator: 0-based cell of each Gauss point
};

/// One-off convenience wrapper around ForwardModel.
Outputs forward_outputs(const UncertaintyModel& model, std::span<const double> y, const FEMConfig& fem,
                        std::span<const double> obs_points, double qoi_point);

}  // namespace hoqmc::forward
