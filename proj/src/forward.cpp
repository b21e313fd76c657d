#include "hoqmc/forward.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hoqmc::forward {

BasisKind parse_basis(const std::string& name) {
  if (name == "kl") return BasisKind::kl;
  if (name == "indicator") return BasisKind::indicator;
  throw std::invalid_argument("unknown basis: " + name);
}

std::string to_string(BasisKind kind) { return kind == BasisKind::kl ? "kl" : "indicator"; }

UncertaintyModel UncertaintyModel::kl(int s, double zeta, double mean) {
  UncertaintyModel m;
  m.basis = BasisKind::kl;
  m.s = s;
  m.zeta = zeta;
  m.mean = mean;
  return m;
}

UncertaintyModel UncertaintyModel::indicator(int s, double theta, double zeta, double mean, double grading) {
  UncertaintyModel m;
  m.basis = BasisKind::indicator;
  m.s = s;
  m.theta = theta;
  m.zeta = zeta;
  m.mean = mean;
  m.grading = grading;
  return m;
}

double UncertaintyModel::psi_sup(int j) const {
  const double decay = std::pow(static_cast<double>(j), -zeta);
  return basis == BasisKind::kl ? decay : theta * decay;
}

double UncertaintyModel::psi(int j, double x) const {
  if (basis == BasisKind::kl) {
    const int k = (j + 1) / 2;
    const double arg = k * std::numbers::pi * x;
    return psi_sup(j) * (j % 2 == 1 ? std::cos(arg) : std::sin(arg));
  }
  const double lo = j == 1 ? 0.0 : std::pow(static_cast<double>(j - 1) / s, grading);
  const double hi = j == s ? 1.0 : std::pow(static_cast<double>(j) / s, grading);
  return (x > lo && x < hi) ? psi_sup(j) : 0.0;
}

double UncertaintyModel::margin() const {
  if (basis == BasisKind::indicator) {
    // Largest amplitude is j = 1.
    return mean - (s > 0 ? psi_sup(1) : 0.0);
  }
  double sum = 0.0;
  for (int j = 1; j <= s; ++j) sum += psi_sup(j);
  return mean - sum;
}

std::vector<double> UncertaintyModel::partition() const {
  std::vector<double> x(static_cast<std::size_t>(s) + 1);
  x[0] = 0.0;
  for (int j = 1; j < s; ++j) x[static_cast<std::size_t>(j)] = std::pow(static_cast<double>(j) / s, grading);
  x[static_cast<std::size_t>(s)] = 1.0;
  return x;
}

fem::SourceTerm UncertaintyModel::source_term() const {
  return basis == BasisKind::kl ? fem::SourceTerm::linear(source) : fem::SourceTerm::constant(source);
}

void UncertaintyModel::validate() const {
  if (s < 0) throw std::invalid_argument("s must be non-negative");
  if (!(mean > 0.0)) throw std::invalid_argument("mean coefficient must be positive");
  if (!(zeta > 0.0)) throw std::invalid_argument("zeta must be positive");
  if (basis == BasisKind::indicator) {
    if (s < 1) throw std::invalid_argument("indicator basis needs s >= 1");
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(grading > 0.0)) throw std::invalid_argument("grading exponent must be positive");
  }
  if (!(margin() > 0.0)) throw std::invalid_argument("ellipticity violated");
}

void check_parameters(std::span<const double> y, int s) {
  if (static_cast<int>(y.size()) != s) throw std::invalid_argument("parameter dimension mismatch");
  for (double v : y) {
    if (!(v >= -1.0 && v <= 1.0)) throw std::invalid_argument("parameter out of range");
  }
}

ParameterVector truncate(std::span<const double> y, int s_prime) {
  if (s_prime < 0 || s_prime > static_cast<int>(y.size())) throw std::invalid_argument("truncation out of range");
  ParameterVector out(y.begin(), y.end());
  std::fill(out.begin() + s_prime, out.end(), 0.0);
  return out;
}

fem::DiffusionCoefficient coefficient_field(const UncertaintyModel& model, std::span<const double> y) {
  model.validate();
  check_parameters(y, model.s);
  if (model.basis == BasisKind::indicator) {
    std::vector<double> values(static_cast<std::size_t>(model.s));
    for (int j = 1; j <= model.s; ++j) {
      values[static_cast<std::size_t>(j - 1)] = model.mean + y[static_cast<std::size_t>(j - 1)] * model.psi_sup(j);
    }
    return fem::DiffusionCoefficient::piecewise_constant(model.partition(), std::move(values));
  }
  double u_min = model.mean;
  for (int j = 1; j <= model.s; ++j) u_min -= std::abs(y[static_cast<std::size_t>(j - 1)]) * model.psi_sup(j);
  std::vector<double> yy(y.begin(), y.end());
  return fem::DiffusionCoefficient::smooth(
      [model, yy = std::move(yy)](double x) {
        double u = model.mean;
        for (int j = 1; j <= model.s; ++j) u += yy[static_cast<std::size_t>(j - 1)] * model.psi(j, x);
        return u;
      },
      u_min);
}

std::shared_ptr<const fem::Mesh1D> FEMConfig::make_mesh(const UncertaintyModel& model) const {
  if (degree != 1 && degree != 2) throw std::invalid_argument("degree must be 1 or 2");
  if (graded) {
    return std::make_shared<const fem::Mesh1D>(fem::Mesh1D::graded(std::max(model.s, 1), model.grading, graded_refine));
  }
  return std::make_shared<const fem::Mesh1D>(fem::Mesh1D::uniform(level));
}

ForwardModel::ForwardModel(UncertaintyModel model, FEMConfig fem, std::vector<double> obs_points, double qoi_point)
    : model_(model), fem_(fem), obs_points_(std::move(obs_points)), qoi_point_(qoi_point),
      mesh_(fem.make_mesh(model)), source_(model.source_term()) {
  model_.validate();
  for (double x : obs_points_) {
    if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("x outside [0,1]");
  }
  if (!(qoi_point_ >= 0.0 && qoi_point_ <= 1.0)) throw std::out_of_range("x outside [0,1]");

  const auto pts = mesh_->quadrature_points();
  if (model_.basis == BasisKind::kl) {
    table_.resize(static_cast<Eigen::Index>(pts.size()), model_.s);
    for (int j = 1; j <= model_.s; ++j) {
      for (std::size_t q = 0; q < pts.size(); ++q) table_(static_cast<Eigen::Index>(q), j - 1) = model_.psi(j, pts[q]);
    }
  } else {
    const auto part = model_.partition();
    owner_.resize(pts.size());
    for (std::size_t q = 0; q < pts.size(); ++q) {
      auto it = std::upper_bound(part.begin() + 1, part.end() - 1, pts[q]);
      owner_[q] = static_cast<int>(it - part.begin()) - 1;
    }
  }
}

void ForwardModel::coefficient_samples(std::span<const double> y, std::vector<double>& out) const {
  check_parameters(y, model_.s);
  if (model_.basis == BasisKind::kl) {
    const Eigen::Map<const Eigen::VectorXd> yv(y.data(), static_cast<Eigen::Index>(y.size()));
    out.resize(static_cast<std::size_t>(table_.rows()));
    Eigen::Map<Eigen::VectorXd> ov(out.data(), table_.rows());
    ov.setConstant(model_.mean);
    ov.noalias() += table_ * yv;
    return;
  }
  out.resize(owner_.size());
  for (std::size_t q = 0; q < owner_.size(); ++q) {
    const int j = owner_[q];
    out[q] = model_.mean + y[static_cast<std::size_t>(j)] * model_.psi_sup(j + 1);
  }
}

fem::FEMSolution ForwardModel::solve(std::span<const double> y) const {
  std::vector<double> u;
  coefficient_samples(y, u);
  return fem::solve_sampled(u, source_, mesh_, fem_.degree);
}

Outputs ForwardModel::operator()(std::span<const double> y) const {
  const auto sol = solve(y);
  Outputs out;
  out.qoi = fem::evaluate(sol, qoi_point_);
  out.observations.reserve(obs_points_.size());
  for (double x : obs_points_) out.observations.push_back(fem::evaluate(sol, x));
  return out;
}

Outputs forward_outputs(const UncertaintyModel& model, std::span<const double> y, const FEMConfig& fem,
                        std::span<const double> obs_points, double qoi_point) {
  const ForwardModel fm(model, fem, std::vector<double>(obs_points.begin(), obs_points.end()), qoi_point);
  return fm(y);
}

}  // namespace hoqmc::forward
