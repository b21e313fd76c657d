#pragma once

// Weight families that drive the CBC criterion.
//
// All three come from one formula over an index set u and per-coordinate
// orders nu_j in {1..alpha}:
//
//   gamma_u = sum_{nu_u} (nu_{u∩E})! |nu_{u∩E^c}|! prod_{j in u} 2^{delta(nu_j,alpha)} beta_j^{nu_j}
//
// with E = {1..J}.  Product weights take E = N, SPOD weights take E = {}.
// beta_j = theta * j^-zeta, 1-based j.

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace hoqmc::cbc {

enum class WeightKind { product, spod, hybrid };

WeightKind parse_weight_kind(const std::string& name);
std::string to_string(WeightKind kind);

struct WeightSpec {
  WeightKind kind = WeightKind::spod;
  double theta = 0.2;
  double zeta = 2.0;
  int alpha = 2;
  double walsh_constant = 0.1;
  int hybrid_cutoff = 0;  // J; only read for kind == hybrid
  // When non-empty, replaces theta * j^-zeta: beta_j = explicit_beta[j-1] and
  // beta_j = 0 past the end.
  std::vector<double> explicit_beta;

  /// Throws std::invalid_argument for alpha < 2, theta <= 0, zeta <= 1,
  /// non-positive walsh constant or negative J.
  void validate() const;

  /// beta_j for 1-based j.
  [[nodiscard]] double beta(int j) const;

  /// True when coordinate j (1-based) carries product structure.
  [[nodiscard]] bool is_product_coordinate(int j) const;

  /// gamma_j = sum_{nu=1}^{alpha} nu! 2^{delta(nu,alpha)} beta_j^nu.
  [[nodiscard]] double product_factor(int j) const;

  /// 2^{delta(nu,alpha)} beta_j^nu.
  [[nodiscard]] double order_term(int j, int nu) const;

  /// Text recording kind, theta, zeta, alpha, C and J; stored in vector files.
  [[nodiscard]] std::string fingerprint() const;
};

/// gamma_u for a set of 1-based coordinates.  With `orders` given, returns the
/// single summand for that order vector instead of the sum.  gamma_{} = 1.
double gamma_weight(std::span<const int> u, const WeightSpec& w,
                    std::optional<std::span<const int>> orders = std::nullopt);

enum class WalshConstantChoice { default_choice, theoretical, yoshiki };

WalshConstantChoice parse_walsh_constant_choice(const std::string& name);

/// Constant used inside the criterion.  default -> 0.1; yoshiki -> 1.0;
/// theoretical -> C_{alpha,2} * 2^alpha (interval change from [-1,1] to [0,1]).
/// Throws std::invalid_argument for b != 2.
double walsh_constant_default(int alpha, int b = 2,
                              WalshConstantChoice choice = WalshConstantChoice::default_choice);

}  // namespace hoqmc::cbc
