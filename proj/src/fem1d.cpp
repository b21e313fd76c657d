#include "hoqmc/fem1d.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <lapacke.h>

namespace hoqmc::fem {

namespace {

constexpr double kXi1 = 0.53846931010568309104;
constexpr double kXi2 = 0.90617984593866399280;
constexpr double kW0 = 128.0 / 225.0;
constexpr double kW1 = 0.47862867049936646804;
constexpr double kW2 = 0.23692688505618908751;

void check_degree(int degree) {
  if (degree != 1 && degree != 2) throw std::invalid_argument("degree must be 1 or 2");
}

// Unknown index of local dof k on element e, or -1 on the boundary.
int global_index(std::size_t e, int k, int degree, std::size_t n_elements) {
  const auto ei = static_cast<int>(e);
  if (degree == 1) {
    const std::size_t node = e + static_cast<std::size_t>(k);
    if (node == 0 || node == n_elements) return -1;
    return static_cast<int>(node) - 1;
  }
  if (k == 1) return 2 * ei;
  const std::size_t node = e + (k == 0 ? 0 : 1);
  if (node == 0 || node == n_elements) return -1;
  return 2 * static_cast<int>(node) - 1;
}

}  // namespace

const std::array<double, 5> GaussRule5::nodes = {0.5 * (1.0 - kXi2), 0.5 * (1.0 - kXi1), 0.5,
                                                 0.5 * (1.0 + kXi1), 0.5 * (1.0 + kXi2)};
const std::array<double, 5> GaussRule5::weights = {0.5 * kW2, 0.5 * kW1, 0.5 * kW0, 0.5 * kW1,
                                                   0.5 * kW2};

Mesh1D::Mesh1D(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2 || nodes_.front() != 0.0 || nodes_.back() != 1.0) {
    throw std::invalid_argument("mesh must start at 0 and end at 1");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) throw std::invalid_argument("mesh nodes must be strictly increasing");
  }
}

Mesh1D Mesh1D::uniform(int level) {
  if (level < 0 || level > 30) throw std::invalid_argument("mesh level out of range");
  const std::size_t n = std::size_t{1} << level;
  std::vector<double> x(n + 1);
  for (std::size_t i = 0; i <= n; ++i) x[i] = std::ldexp(static_cast<double>(i), -level);
  return Mesh1D(std::move(x));
}

Mesh1D Mesh1D::graded(int s, double a, int refine) {
  if (s < 1) throw std::invalid_argument("graded mesh needs s >= 1");
  if (!(a > 0.0)) throw std::invalid_argument("grading exponent must be positive");
  if (refine < 0 || refine > 20) throw std::invalid_argument("refinement out of range");
  const int sub = 1 << refine;
  std::vector<double> x;
  x.reserve(static_cast<std::size_t>(s) * static_cast<std::size_t>(sub) + 1);
  x.push_back(0.0);
  double prev = 0.0;
  for (int j = 1; j <= s; ++j) {
    const double next = j == s ? 1.0 : std::pow(static_cast<double>(j) / s, a);
    for (int k = 1; k < sub; ++k) x.push_back(prev + (next - prev) * k / sub);
    x.push_back(next);
    prev = next;
  }
  return Mesh1D(std::move(x));
}

std::size_t Mesh1D::locate(double x) const {
  auto it = std::lower_bound(nodes_.begin() + 1, nodes_.end() - 1, x);
  return static_cast<std::size_t>(it - nodes_.begin()) - 1;
}

std::vector<double> Mesh1D::quadrature_points() const {
  std::vector<double> pts(n_elements() * GaussRule5::size);
  for (std::size_t e = 0; e < n_elements(); ++e) {
    for (int q = 0; q < GaussRule5::size; ++q) {
      pts[e * GaussRule5::size + static_cast<std::size_t>(q)] = left(e) + width(e) * GaussRule5::nodes[static_cast<std::size_t>(q)];
    }
  }
  return pts;
}

DiffusionCoefficient DiffusionCoefficient::piecewise_constant(std::vector<double> breakpoints,
                                                              std::vector<double> values) {
  if (breakpoints.size() != values.size() + 1 || values.empty()) {
    throw std::invalid_argument("breakpoints must number values + 1");
  }
  if (breakpoints.front() != 0.0 || breakpoints.back() != 1.0) {
    throw std::invalid_argument("breakpoints must span [0,1]");
  }
  for (std::size_t i = 1; i < breakpoints.size(); ++i) {
    if (!(breakpoints[i] > breakpoints[i - 1])) throw std::invalid_argument("breakpoints must increase");
  }
  const double lo = *std::min_element(values.begin(), values.end());
  if (!(lo > 0.0)) throw std::invalid_argument("ellipticity violated");
  return {Pieces{std::move(breakpoints), std::move(values)}, lo};
}

DiffusionCoefficient DiffusionCoefficient::smooth(std::function<double(double)> u, double u_min) {
  if (!(u_min > 0.0)) throw std::invalid_argument("ellipticity violated");
  return {Smooth{std::move(u)}, u_min};
}

DiffusionCoefficient DiffusionCoefficient::sampled(std::vector<double> values, double u_min) {
  if (!(u_min > 0.0)) throw std::invalid_argument("ellipticity violated");
  return {Sampled{std::move(values)}, u_min};
}

double DiffusionCoefficient::operator()(double x) const {
  if (const auto* p = std::get_if<Pieces>(&rep_)) {
    auto it = std::upper_bound(p->breakpoints.begin() + 1, p->breakpoints.end() - 1, x);
    return p->values[static_cast<std::size_t>(it - p->breakpoints.begin()) - 1];
  }
  if (const auto* s = std::get_if<Smooth>(&rep_)) return s->u(x);
  throw std::logic_error("sampled coefficient has no point values");
}

void DiffusionCoefficient::sample(const Mesh1D& mesh, std::vector<double>& out) const {
  if (const auto* s = std::get_if<Sampled>(&rep_)) {
    if (s->values.size() != mesh.n_elements() * GaussRule5::size) {
      throw std::invalid_argument("sampled coefficient does not match mesh");
    }
    out = s->values;
    return;
  }
  const auto pts = mesh.quadrature_points();
  out.resize(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) out[i] = (*this)(pts[i]);
}

double SourceTerm::operator()(double x) const {
  switch (kind_) {
    case Kind::constant: return c_;
    case Kind::linear: return c_ * x;
    case Kind::callable: return f_(x);
  }
  return 0.0;
}

void SourceTerm::element_load(double a, double h, int degree, std::span<double> out) const {
  const double b = a + h;
  if (kind_ == Kind::callable) {
    std::fill(out.begin(), out.end(), 0.0);
    for (int q = 0; q < GaussRule5::size; ++q) {
      const double t = GaussRule5::nodes[static_cast<std::size_t>(q)];
      const double fw = f_(a + h * t) * GaussRule5::weights[static_cast<std::size_t>(q)] * h;
      if (degree == 1) {
        out[0] += fw * (1.0 - t);
        out[1] += fw * t;
      } else {
        out[0] += fw * (1.0 - t) * (1.0 - 2.0 * t);
        out[1] += fw * 4.0 * t * (1.0 - t);
        out[2] += fw * t * (2.0 * t - 1.0);
      }
    }
    return;
  }
  if (kind_ == Kind::constant) {
    if (degree == 1) {
      out[0] = out[1] = 0.5 * c_ * h;
    } else {
      out[0] = out[2] = c_ * h / 6.0;
      out[1] = 2.0 * c_ * h / 3.0;
    }
    return;
  }
  if (degree == 1) {
    out[0] = c_ * h * (2.0 * a + b) / 6.0;
    out[1] = c_ * h * (a + 2.0 * b) / 6.0;
  } else {
    out[0] = c_ * h * a / 6.0;
    out[1] = c_ * h * (a + b) / 3.0;
    out[2] = c_ * h * b / 6.0;
  }
}

double BandedSystem::at(int i, int j) const {
  if (i > j) std::swap(i, j);
  if (j - i > kd) return 0.0;
  return band[static_cast<std::size_t>(kd + i - j + j * (kd + 1))];
}

BandedSystem assemble_sampled(std::span<const double> u_gauss, const SourceTerm& f, const Mesh1D& mesh,
                              int degree) {
  check_degree(degree);
  const std::size_t ne = mesh.n_elements();
  if (u_gauss.size() != ne * GaussRule5::size) throw std::invalid_argument("coefficient sample size mismatch");
  for (double u : u_gauss) {
    if (!(u > 0.0)) throw std::invalid_argument("ellipticity violated");
  }

  BandedSystem sys;
  sys.n = static_cast<int>(ne) * degree - 1;
  sys.kd = degree;
  sys.band.assign(static_cast<std::size_t>(sys.kd + 1) * static_cast<std::size_t>(std::max(sys.n, 0)), 0.0);
  sys.rhs.assign(static_cast<std::size_t>(std::max(sys.n, 0)), 0.0);
  if (sys.n <= 0) return sys;

  const int nloc = degree + 1;
  std::array<double, 9> k{};
  std::array<double, 3> load{};
  std::array<int, 3> idx{};
  // Local order for P2 is (left, mid, right).
  for (std::size_t e = 0; e < ne; ++e) {
    const double h = mesh.width(e);
    const double* u = &u_gauss[e * GaussRule5::size];
    k.fill(0.0);
    if (degree == 1) {
      double mean = 0.0;
      for (int q = 0; q < GaussRule5::size; ++q) mean += GaussRule5::weights[static_cast<std::size_t>(q)] * u[q];
      const double c = mean / h;
      k = {c, -c, 0, -c, c, 0, 0, 0, 0};
    } else {
      for (int q = 0; q < GaussRule5::size; ++q) {
        const double t = GaussRule5::nodes[static_cast<std::size_t>(q)];
        const double d[3] = {4.0 * t - 3.0, 4.0 - 8.0 * t, 4.0 * t - 1.0};
        const double c = GaussRule5::weights[static_cast<std::size_t>(q)] * u[q] / h;
        for (int i = 0; i < 3; ++i)
          for (int j = 0; j < 3; ++j) k[static_cast<std::size_t>(3 * i + j)] += c * d[i] * d[j];
      }
    }
    f.element_load(mesh.left(e), h, degree, std::span<double>(load.data(), static_cast<std::size_t>(nloc)));
    for (int i = 0; i < nloc; ++i) idx[static_cast<std::size_t>(i)] = global_index(e, i, degree, ne);
    for (int i = 0; i < nloc; ++i) {
      const int gi = idx[static_cast<std::size_t>(i)];
      if (gi < 0) continue;
      sys.rhs[static_cast<std::size_t>(gi)] += load[static_cast<std::size_t>(i)];
      for (int j = 0; j < nloc; ++j) {
        const int gj = idx[static_cast<std::size_t>(j)];
        if (gj < gi) continue;
        sys.upper(gi, gj) += k[static_cast<std::size_t>(3 * i + j)];
      }
    }
  }
  return sys;
}

BandedSystem assemble(const DiffusionCoefficient& u, const SourceTerm& f, const Mesh1D& mesh, int degree) {
  std::vector<double> ug;
  u.sample(mesh, ug);
  return assemble_sampled(ug, f, mesh, degree);
}

std::vector<double> solve_banded(BandedSystem sys) {
  if (sys.n <= 0) return {};
  const lapack_int info = LAPACKE_dpbsv(LAPACK_COL_MAJOR, 'U', sys.n, sys.kd, 1, sys.band.data(),
                                        sys.kd + 1, sys.rhs.data(), sys.n);
  if (info != 0) throw std::runtime_error("singular system");
  return std::move(sys.rhs);
}

FEMSolution solve_sampled(std::span<const double> u_gauss, const SourceTerm& f,
                          std::shared_ptr<const Mesh1D> mesh, int degree) {
  FEMSolution sol;
  sol.degree = degree;
  if (f.is_zero()) {
    check_degree(degree);
    for (double u : u_gauss) {
      if (!(u > 0.0)) throw std::invalid_argument("ellipticity violated");
    }
    sol.dofs.assign(mesh->n_elements() * static_cast<std::size_t>(degree) - 1, 0.0);
  } else {
    sol.dofs = solve_banded(assemble_sampled(u_gauss, f, *mesh, degree));
  }
  sol.mesh = std::move(mesh);
  return sol;
}

FEMSolution solve(const DiffusionCoefficient& u, const SourceTerm& f, std::shared_ptr<const Mesh1D> mesh,
                  int degree) {
  std::vector<double> ug;
  u.sample(*mesh, ug);
  return solve_sampled(ug, f, std::move(mesh), degree);
}

double evaluate(const FEMSolution& sol, double x) {
  if (!(x >= 0.0 && x <= 1.0)) throw std::out_of_range("x outside [0,1]");
  const Mesh1D& mesh = *sol.mesh;
  const std::size_t ne = mesh.n_elements();
  const std::size_t e = mesh.locate(x);
  auto dof = [&](int k) {
    const int g = global_index(e, k, sol.degree, ne);
    return g < 0 ? 0.0 : sol.dofs[static_cast<std::size_t>(g)];
  };
  const double t = (x - mesh.left(e)) / mesh.width(e);
  if (sol.degree == 1) return dof(0) * (1.0 - t) + dof(1) * t;
  return dof(0) * (1.0 - t) * (1.0 - 2.0 * t) + dof(1) * 4.0 * t * (1.0 - t) + dof(2) * t * (2.0 * t - 1.0);
}

}  // namespace hoqmc::fem
