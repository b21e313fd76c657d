#pragma once

// Galerkin finite elements for  -(u q')' = f  on (0,1),  q(0) = q(1) = 0.
//
// Continuous P1 or P2 elements.  Stiffness integrals use 5-point Gauss-Legendre
// per element (exact for element-wise constant u); loads for constant and
// linear f are integrated exactly.  The SPD banded system is factorised
// directly.

#include <array>
#include <functional>
#include <memory>
#include <span>
#include <variant>
#include <vector>

namespace hoqmc::fem {

/// 5-point Gauss-Legendre rule mapped to [0,1]; weights sum to 1.
struct GaussRule5 {
  static constexpr int size = 5;
  static const std::array<double, 5> nodes;
  static const std::array<double, 5> weights;
};

class Mesh1D {
 public:
  /// Throws std::invalid_argument unless strictly increasing from 0 to 1.
  explicit Mesh1D(std::vector<double> nodes);

  /// h = 2^-level.
  static Mesh1D uniform(int level);
  /// Partition x_j = (j/s)^a, j = 0..s, each cell split into 2^refine equal parts.
  static Mesh1D graded(int s, double a, int refine = 0);

  [[nodiscard]] const std::vector<double>& nodes() const { return nodes_; }
  [[nodiscard]] std::size_t n_elements() const { return nodes_.size() - 1; }
  [[nodiscard]] double left(std::size_t e) const { return nodes_[e]; }
  [[nodiscard]] double width(std::size_t e) const { return nodes_[e + 1] - nodes_[e]; }
  /// Element containing x (the left one at interior nodes).  Requires 0 <= x <= 1.
  [[nodiscard]] std::size_t locate(double x) const;
  /// Gauss node coordinates, n_elements x 5, row-major.
  [[nodiscard]] std::vector<double> quadrature_points() const;

 private:
  std::vector<double> nodes_;
};

class DiffusionCoefficient {
 public:
  /// Value values[i] on (breakpoints[i], breakpoints[i+1]).
  static DiffusionCoefficient piecewise_constant(std::vector<double> breakpoints,
                                                 std::vector<double> values);
  /// Callable coefficient with a known lower bound.
  static DiffusionCoefficient smooth(std::function<double(double)> u, double u_min);
  /// Values at the Gauss points of a specific mesh (n_elements x 5).
  static DiffusionCoefficient sampled(std::vector<double> values, double u_min);

  [[nodiscard]] double u_min() const { return u_min_; }
  /// Point value; not available for sampled coefficients.
  [[nodiscard]] double operator()(double x) const;
  /// Values at the Gauss points of `mesh`.
  void sample(const Mesh1D& mesh, std::vector<double>& out) const;

 private:
  struct Pieces {
    std::vector<double> breakpoints;
    std::vector<double> values;
  };
  struct Smooth {
    std::function<double(double)> u;
  };
  struct Sampled {
    std::vector<double> values;
  };
  std::variant<Pieces, Smooth, Sampled> rep_;
  double u_min_ = 0.0;

  DiffusionCoefficient(std::variant<Pieces, Smooth, Sampled> rep, double u_min)
      : rep_(std::move(rep)), u_min_(u_min) {}
};

class SourceTerm {
 public:
  static SourceTerm constant(double c) { return SourceTerm(Kind::constant, c, {}); }
  /// f(x) = c x.
  static SourceTerm linear(double c) { return SourceTerm(Kind::linear, c, {}); }
  static SourceTerm callable(std::function<double(double)> f) {
    return SourceTerm(Kind::callable, 0.0, std::move(f));
  }

  [[nodiscard]] double operator()(double x) const;
  [[nodiscard]] bool is_zero() const { return kind_ != Kind::callable && c_ == 0.0; }

  /// Element load vector (2 entries for P1, 3 for P2 ordered left, mid, right).
  void element_load(double a, double h, int degree, std::span<double> out) const;

 private:
  enum class Kind { constant, linear, callable };
  SourceTerm(Kind k, double c, std::function<double(double)> f) : kind_(k), c_(c), f_(std::move(f)) {}
  Kind kind_;
  double c_;
  std::function<double(double)> f_;
};

/// Symmetric banded matrix in LAPACK upper band storage, plus right-hand side.
/// Unknown numbering: P1 node i -> i-1; P2 node i -> 2i-1, midpoint of element e -> 2e.
struct BandedSystem {
  int n = 0;
  int kd = 0;
  std::vector<double> band;  // (kd+1) x n, column-major
  std::vector<double> rhs;

  [[nodiscard]] double at(int i, int j) const;
  double& upper(int i, int j) { return band[static_cast<std::size_t>(kd + i - j + j * (kd + 1))]; }
};

struct FEMSolution {
  std::shared_ptr<const Mesh1D> mesh;
  int degree = 1;
  std::vector<double> dofs;  // interior unknowns only
};

/// Throws std::invalid_argument("ellipticity violated") if any Gauss-point sample
/// is <= 0 and std::invalid_argument for degree outside {1, 2}.
BandedSystem assemble(const DiffusionCoefficient& u, const SourceTerm& f, const Mesh1D& mesh,
                      int degree);

/// Same, from coefficient values already sampled at the Gauss points.
BandedSystem assemble_sampled(std::span<const double> u_gauss, const SourceTerm& f,
                              const Mesh1D& mesh, int degree);

/// Banded Cholesky solve.  Throws std::runtime_error("singular system") when
/// the matrix is not positive definite.
std::vector<double> solve_banded(BandedSystem system);

FEMSolution solve(const DiffusionCoefficient& u, const SourceTerm& f,
                  std::shared_ptr<const Mesh1D> mesh, int degree);
FEMSolution solve_sampled(std::span<const double> u_gauss, const SourceTerm& f,
                          std::shared_ptr<const Mesh1D> mesh, int degree);

/// Throws std::out_of_range("x outside [0,1]").
double evaluate(const FEMSolution& sol, double x);

}  // namespace hoqmc::fem
