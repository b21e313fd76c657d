#include "hoqmc/polylattice.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>

namespace hoqmc::lattice {

namespace {

void check_component(BinaryPolynomial q, int m) {
  if (q.is_zero() || q.degree() >= m) throw std::invalid_argument("invalid component");
}

void check_modulus(BinaryPolynomial p, int m) {
  if (m < 1 || p.degree() != m) throw std::invalid_argument("invalid modulus");
}

// Column i of the generating matrix of one interlaced dimension: the
// interlaced digits of x^i * q_k / p over the given slots.
std::vector<std::uint64_t> interlaced_columns(BinaryPolynomial p, int m, int alpha,
                                              std::span<const BinaryPolynomial> slots) {
  std::vector<std::uint64_t> cols(static_cast<std::size_t>(m), 0);
  for (int k = 0; k < static_cast<int>(slots.size()); ++k) {
    for (int i = 0; i < m; ++i) {
      cols[static_cast<std::size_t>(i)] ^=
          spread_to_slot(laurent_value(std::uint64_t{1} << i, slots[k], p, m), k, alpha, m);
    }
  }
  return cols;
}

// coords[n*s + j] for all n, using c(n) = c(n & (n-1)) ^ col[ctz n].
void fill_dimension(std::vector<std::uint64_t>& coords, std::size_t n_points, int s, int j,
                    std::span<const std::uint64_t> cols) {
  const auto stride = static_cast<std::size_t>(s);
  coords[static_cast<std::size_t>(j)] = 0;
  for (std::size_t n = 1; n < n_points; ++n) {
    coords[n * stride + j] =
        coords[(n & (n - 1)) * stride + j] ^ cols[static_cast<std::size_t>(std::countr_zero(n))];
  }
}

}  // namespace

void GeneratingVector::validate() const {
  if (m < 1) throw std::invalid_argument("m must be positive");
  if (alpha < 1) throw std::invalid_argument("alpha must be positive");
  if (s < 1) throw std::invalid_argument("s must be positive");
  if (alpha * m > kMaxPrecision) throw std::invalid_argument("precision overflow");
  check_modulus(modulus, m);
  if (components.size() != static_cast<std::size_t>(alpha) * static_cast<std::size_t>(s)) {
    throw std::invalid_argument("component count must equal alpha*s");
  }
  for (auto q : components) check_component(q, m);
}

double InterlacedPointSet::coordinate(std::size_t n, int j) const {
  return std::ldexp(static_cast<double>(at(n, j)), -precision);
}

void InterlacedPointSet::point(std::size_t n, std::span<double> out) const {
  const auto r = row(n);
  for (std::size_t j = 0; j < r.size(); ++j) {
    out[j] = std::ldexp(static_cast<double>(r[j]), -precision);
  }
}

std::uint64_t laurent_value(std::uint64_t n, BinaryPolynomial q, BinaryPolynomial p, int m) {
  check_modulus(p, m);
  check_component(q, m);
  if (m < 64 && (n >> m) != 0) throw std::invalid_argument("point index out of range");
  // Only the fractional part of n q / p matters: start from r = n q mod p.
  std::uint64_t r = gf2::mul_mod(BinaryPolynomial(n), q, p).bits();
  std::uint64_t out = 0;
  for (int l = 0; l < m; ++l) {
    r <<= 1;
    const std::uint64_t digit = (r >> m) & 1U;
    if (digit) r ^= p.bits();
    out = (out << 1) | digit;
  }
  return out;
}

std::vector<std::uint8_t> laurent_digits(std::uint64_t n, BinaryPolynomial q, BinaryPolynomial p,
                                         int m) {
  const std::uint64_t v = laurent_value(n, q, p, m);
  std::vector<std::uint8_t> digits(static_cast<std::size_t>(m));
  for (int l = 0; l < m; ++l) digits[static_cast<std::size_t>(l)] = (v >> (m - 1 - l)) & 1U;
  return digits;
}

std::uint64_t spread_to_slot(std::uint64_t v, int slot, int alpha, int m) {
  const int precision = alpha * m;
  std::uint64_t out = 0;
  for (int l = 0; l < m; ++l) {
    if ((v >> (m - 1 - l)) & 1U) out |= std::uint64_t{1} << (precision - 1 - (alpha * l + slot));
  }
  return out;
}

std::uint64_t interlace(std::span<const std::vector<std::uint8_t>> digit_sequences) {
  const int alpha = static_cast<int>(digit_sequences.size());
  if (alpha == 0) throw std::invalid_argument("interlace needs at least one sequence");
  const int m = static_cast<int>(digit_sequences.front().size());
  if (alpha * m > kMaxPrecision) throw std::invalid_argument("precision overflow");
  std::uint64_t out = 0;
  for (int k = 0; k < alpha; ++k) {
    const auto& seq = digit_sequences[static_cast<std::size_t>(k)];
    if (static_cast<int>(seq.size()) != m) throw std::invalid_argument("mismatched digit lengths");
    std::uint64_t v = 0;
    for (auto d : seq) v = (v << 1) | (d & 1U);
    out |= spread_to_slot(v, k, alpha, m);
  }
  return out;
}

InterlacedPointSet generate_points(const GeneratingVector& gv, ExecutionPolicy policy) {
  gv.validate();
  InterlacedPointSet ps;
  ps.n_points = gv.n_points();
  ps.s = gv.s;
  ps.precision = gv.precision();
  ps.coords.assign(ps.n_points * static_cast<std::size_t>(gv.s), 0);

  auto fill = [&](int j) {
    std::span<const BinaryPolynomial> slots(gv.components.data() + static_cast<std::size_t>(j) * gv.alpha,
                                            static_cast<std::size_t>(gv.alpha));
    const auto cols = interlaced_columns(gv.modulus, gv.m, gv.alpha, slots);
    fill_dimension(ps.coords, ps.n_points, gv.s, j, cols);
  };

  if (policy == ExecutionPolicy::parallel) {
#pragma omp parallel for schedule(static)
    for (int j = 0; j < gv.s; ++j) fill(j);
  } else {
    for (int j = 0; j < gv.s; ++j) fill(j);
  }
  return ps;
}

InterlacedPointSet generate_points_reference(const GeneratingVector& gv) {
  gv.validate();
  InterlacedPointSet ps;
  ps.n_points = gv.n_points();
  ps.s = gv.s;
  ps.precision = gv.precision();
  ps.coords.resize(ps.n_points * static_cast<std::size_t>(gv.s));
  std::vector<std::vector<std::uint8_t>> streams(static_cast<std::size_t>(gv.alpha));
  for (std::size_t n = 0; n < ps.n_points; ++n) {
    for (int j = 0; j < gv.s; ++j) {
      for (int k = 0; k < gv.alpha; ++k) {
        streams[static_cast<std::size_t>(k)] = laurent_digits(n, gv.component(j, k), gv.modulus, gv.m);
      }
      ps.coords[n * static_cast<std::size_t>(gv.s) + j] = interlace(streams);
    }
  }
  return ps;
}

InterlacedPointSet generate_partial_points(BinaryPolynomial modulus, int m, int alpha,
                                           std::span<const BinaryPolynomial> chosen) {
  check_modulus(modulus, m);
  if (alpha < 1 || alpha * m > kMaxPrecision) throw std::invalid_argument("precision overflow");
  for (auto q : chosen) check_component(q, m);
  const int dims = static_cast<int>((chosen.size() + static_cast<std::size_t>(alpha) - 1) /
                                    static_cast<std::size_t>(alpha));
  InterlacedPointSet ps;
  ps.n_points = std::size_t{1} << m;
  ps.s = dims;
  ps.precision = alpha * m;
  ps.coords.assign(ps.n_points * static_cast<std::size_t>(dims), 0);
  for (int j = 0; j < dims; ++j) {
    const std::size_t first = static_cast<std::size_t>(j) * alpha;
    const std::size_t count = std::min<std::size_t>(static_cast<std::size_t>(alpha), chosen.size() - first);
    const auto cols = interlaced_columns(modulus, m, alpha, chosen.subspan(first, count));
    fill_dimension(ps.coords, ps.n_points, dims, j, cols);
  }
  return ps;
}

void write_generating_vector(std::ostream& os, const GeneratingVector& gv) {
  gv.validate();
  os << "b=2\n"
     << "m=" << gv.m << '\n'
     << "alpha=" << gv.alpha << '\n'
     << "s=" << gv.s << '\n'
     << "modulus=" << gv.modulus.bits() << '\n'
     << "weights=" << gv.weight_fingerprint << '\n';
  for (std::size_t i = 0; i < gv.components.size(); ++i) {
    os << 'q' << (i + 1) << '=' << gv.components[i].bits() << '\n';
  }
}

GeneratingVector read_generating_vector(std::istream& is) {
  std::map<std::string, std::string> kv;
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("malformed line: " + line);
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  auto get = [&](const std::string& key) -> const std::string& {
    auto it = kv.find(key);
    if (it == kv.end()) throw std::invalid_argument("missing key: " + key);
    return it->second;
  };
  auto get_int = [&](const std::string& key) { return std::stoi(get(key)); };
  auto get_poly = [&](const std::string& key) { return BinaryPolynomial(std::stoull(get(key))); };

  if (get("b") != "2") throw std::invalid_argument("unsupported base");
  GeneratingVector gv;
  gv.m = get_int("m");
  gv.alpha = get_int("alpha");
  gv.s = get_int("s");
  gv.modulus = get_poly("modulus");
  gv.weight_fingerprint = get("weights");
  const std::size_t count = static_cast<std::size_t>(gv.alpha) * static_cast<std::size_t>(gv.s);
  gv.components.reserve(count);
  for (std::size_t i = 1; i <= count; ++i) gv.components.push_back(get_poly("q" + std::to_string(i)));
  gv.validate();
  return gv;
}

void save_generating_vector(const std::string& path, const GeneratingVector& gv) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_generating_vector(os, gv);
  if (!os) throw std::runtime_error("write failed: " + path);
}

GeneratingVector load_generating_vector(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_generating_vector(is);
}

__extension__ typedef unsigned __int128 uint128_t;

std::string exact_dyadic_decimal(std::uint64_t value, int precision) {
  if (precision < 0 || precision > kMaxPrecision) throw std::invalid_argument("precision overflow");
  if (precision < 64 && (value >> precision) != 0) throw std::invalid_argument("value out of range");
  if (value == 0) return "0";
  const uint128_t mask = (static_cast<uint128_t>(1) << precision) - 1;
  uint128_t frac = value;
  std::string out = "0.";
  while (frac != 0) {
    frac *= 10;
    out += static_cast<char>('0' + static_cast<int>(frac >> precision));
    frac &= mask;
  }
  return out;
}

}  // namespace hoqmc::lattice
