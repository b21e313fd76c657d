#include "hoqmc/weights.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace hoqmc::cbc {

namespace {

double factorial(int n) {
  double f = 1.0;
  for (int i = 2; i <= n; ++i) f *= i;
  return f;
}

}  // namespace

WeightKind parse_weight_kind(const std::string& name) {
  if (name == "product") return WeightKind::product;
  if (name == "spod") return WeightKind::spod;
  if (name == "hybrid") return WeightKind::hybrid;
  throw std::invalid_argument("unknown weight kind: " + name);
}

std::string to_string(WeightKind kind) {
  switch (kind) {
    case WeightKind::product: return "product";
    case WeightKind::spod: return "spod";
    case WeightKind::hybrid: return "hybrid";
  }
  return "?";
}

void WeightSpec::validate() const {
  if (alpha < 2) throw std::invalid_argument("order must be >= 2");
  if (explicit_beta.empty()) {
    if (!(theta > 0.0)) throw std::invalid_argument("theta must be positive");
    if (!(zeta > 1.0)) throw std::invalid_argument("zeta must exceed 1");
  }
  for (double b : explicit_beta) {
    if (!(b >= 0.0)) throw std::invalid_argument("beta must be non-negative");
  }
  if (!(walsh_constant > 0.0)) throw std::invalid_argument("walsh constant must be positive");
  if (hybrid_cutoff < 0) throw std::invalid_argument("hybrid cutoff must be non-negative");
}

double WeightSpec::beta(int j) const {
  if (!explicit_beta.empty()) {
    return j <= static_cast<int>(explicit_beta.size()) ? explicit_beta[static_cast<std::size_t>(j - 1)] : 0.0;
  }
  return theta * std::pow(static_cast<double>(j), -zeta);
}

bool WeightSpec::is_product_coordinate(int j) const {
  switch (kind) {
    case WeightKind::product: return true;
    case WeightKind::spod: return false;
    case WeightKind::hybrid: return j <= hybrid_cutoff;
  }
  return false;
}

double WeightSpec::order_term(int j, int nu) const {
  const double t = std::pow(beta(j), nu);
  return nu == alpha ? 2.0 * t : t;
}

double WeightSpec::product_factor(int j) const {
  double g = 0.0;
  for (int nu = 1; nu <= alpha; ++nu) g += factorial(nu) * order_term(j, nu);
  return g;
}

std::string WeightSpec::fingerprint() const {
  std::ostringstream os;
  os.precision(17);
  os << "kind:" << to_string(kind) << ";theta:" << theta << ";zeta:" << zeta << ";alpha:" << alpha
     << ";C:" << walsh_constant << ";J:" << (kind == WeightKind::hybrid ? hybrid_cutoff : 0);
  if (!explicit_beta.empty()) {
    os << ";beta:";
    for (std::size_t i = 0; i < explicit_beta.size(); ++i) os << (i ? "," : "") << explicit_beta[i];
  }
  return os.str();
}

double gamma_weight(std::span<const int> u, const WeightSpec& w,
                    std::optional<std::span<const int>> orders) {
  if (u.empty()) return 1.0;
  if (orders && orders->size() != u.size()) throw std::invalid_argument("order vector size mismatch");

  auto summand = [&](std::span<const int> nu) {
    double prod_fact = 1.0;
    int order_sum = 0;
    double terms = 1.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      if (nu[i] < 1 || nu[i] > w.alpha) throw std::invalid_argument("order out of range");
      if (w.is_product_coordinate(u[i])) {
        prod_fact *= factorial(nu[i]);
      } else {
        order_sum += nu[i];
      }
      terms *= w.order_term(u[i], nu[i]);
    }
    return prod_fact * factorial(order_sum) * terms;
  };

  if (orders) return summand(*orders);

  // Enumerate nu in {1..alpha}^|u| as an odometer.
  std::vector<int> nu(u.size(), 1);
  double total = 0.0;
  while (true) {
    total += summand(nu);
    std::size_t i = 0;
    while (i < nu.size() && nu[i] == w.alpha) nu[i++] = 1;
    if (i == nu.size()) break;
    ++nu[i];
  }
  return total;
}

WalshConstantChoice parse_walsh_constant_choice(const std::string& name) {
  if (name == "default") return WalshConstantChoice::default_choice;
  if (name == "theoretical") return WalshConstantChoice::theoretical;
  if (name == "yoshiki") return WalshConstantChoice::yoshiki;
  throw std::invalid_argument("unknown walsh constant choice: " + name);
}

double walsh_constant_default(int alpha, int b, WalshConstantChoice choice) {
  if (b != 2) throw std::invalid_argument("only base 2 is supported");
  switch (choice) {
    case WalshConstantChoice::default_choice: return 0.1;
    case WalshConstantChoice::yoshiki: return 1.0;
    case WalshConstantChoice::theoretical: break;
  }
  if (alpha < 2) throw std::invalid_argument("order must be >= 2");
  const double bd = b;
  const double two_sin = 2.0 * std::sin(std::numbers::pi / bd);
  double lead = 2.0 / std::pow(two_sin, alpha);
  for (int z = 1; z <= alpha - 1; ++z) lead = std::max(lead, 1.0 / std::pow(two_sin, z));
  const double middle = std::pow(1.0 + 1.0 / bd + 1.0 / (bd * (bd + 1.0)), alpha - 2);
  const double tail = 3.0 + 2.0 / bd + (2.0 * bd + 1.0) / (bd - 1.0);
  return lead * middle * tail * std::pow(2.0, alpha);
}

}  // namespace hoqmc::cbc
