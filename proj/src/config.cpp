#include "hoqmc/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

namespace hoqmc::harness {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& text) {
  const std::string t = trim(text);
  T v{};
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
  if (t.empty() || ec != std::errc() || ptr != t.data() + t.size()) {
    throw std::invalid_argument("not a number: '" + text + "'");
  }
  return v;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::vector<double> parse_list(const std::string& text) {
  std::vector<double> out;
  const std::string t = trim(text);
  if (t.empty()) return out;
  std::stringstream ss(t);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number<double>(item));
  return out;
}

std::string format_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + format_double(v[i]);
  return out;
}

bool parse_bool(const std::string& text) {
  const std::string t = trim(text);
  if (t == "true" || t == "1" || t == "yes" || t == "on") return true;
  if (t == "false" || t == "0" || t == "no" || t == "off") return false;
  throw std::invalid_argument("not a boolean: '" + text + "'");
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

#define HOQMC_INT_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_number<decltype(c.name)>(v); }, \
        [](const ExperimentConfig& c) { return std::to_string(c.name); }}
#define HOQMC_DOUBLE_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_number<double>(v); }, \
        [](const ExperimentConfig& c) { return format_double(c.name); }}
#define HOQMC_LIST_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_list(v); }, \
        [](const ExperimentConfig& c) { return format_list(c.name); }}
#define HOQMC_STRING_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = trim(v); }, \
        [](const ExperimentConfig& c) { return c.name; }}
#define HOQMC_RANGE_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_range(v); }, \
        [](const ExperimentConfig& c) { return to_string(c.name); }}
#define HOQMC_BOOL_FIELD(name) \
  Field{#name, [](ExperimentConfig& c, const std::string& v) { c.name = parse_bool(v); }, \
        [](const ExperimentConfig& c) { return std::string(c.name ? "true" : "false"); }}

const std::vector<Field>& fields() {
  static const std::vector<Field> table = {
      Field{"experiment", [](ExperimentConfig& c, const std::string& v) { c.experiment = parse_experiment(trim(v)); },
            [](const ExperimentConfig& c) { return to_string(c.experiment); }},
      Field{"basis", [](ExperimentConfig& c, const std::string& v) { c.basis = forward::parse_basis(trim(v)); },
            [](const ExperimentConfig& c) { return forward::to_string(c.basis); }},
      HOQMC_RANGE_FIELD(s),
      HOQMC_INT_FIELD(alpha),
      HOQMC_DOUBLE_FIELD(zeta),
      HOQMC_DOUBLE_FIELD(theta),
      HOQMC_DOUBLE_FIELD(walsh_constant),
      Field{"weights", [](ExperimentConfig& c, const std::string& v) { c.weights = cbc::parse_weight_kind(trim(v)); },
            [](const ExperimentConfig& c) { return cbc::to_string(c.weights); }},
      HOQMC_INT_FIELD(hybrid_cutoff),
      HOQMC_RANGE_FIELD(m),
      HOQMC_INT_FIELD(m_ref),
      HOQMC_INT_FIELD(cbc_candidates),
      HOQMC_INT_FIELD(candidate_seed),
      Field{"mean",
            [](ExperimentConfig& c, const std::string& v) {
              if (trim(v) == "auto") {
                c.mean.reset();
              } else {
                c.mean = parse_number<double>(v);
              }
            },
            [](const ExperimentConfig& c) { return c.mean ? format_double(*c.mean) : std::string("auto"); }},
      HOQMC_DOUBLE_FIELD(indicator_theta),
      HOQMC_DOUBLE_FIELD(grading),
      HOQMC_DOUBLE_FIELD(source),
      HOQMC_INT_FIELD(fem_level),
      HOQMC_INT_FIELD(fem_degree),
      HOQMC_BOOL_FIELD(graded),
      HOQMC_INT_FIELD(graded_refine),
      HOQMC_RANGE_FIELD(fem_levels),
      HOQMC_STRING_FIELD(fem_problem),
      HOQMC_LIST_FIELD(obs_points),
      HOQMC_DOUBLE_FIELD(qoi_point),
      HOQMC_LIST_FIELD(gamma),
      HOQMC_INT_FIELD(noise_seed),
      HOQMC_BOOL_FIELD(noise),
      HOQMC_LIST_FIELD(y_star),
      HOQMC_LIST_FIELD(data),
      HOQMC_STRING_FIELD(estimator),
      HOQMC_INT_FIELD(mc_reps),
      HOQMC_INT_FIELD(mc_seed),
      HOQMC_INT_FIELD(s_ref),
      HOQMC_STRING_FIELD(policy),
      HOQMC_STRING_FIELD(output),
      HOQMC_STRING_FIELD(gv_cache),
  };
  return table;
}

#undef HOQMC_INT_FIELD
#undef HOQMC_DOUBLE_FIELD
#undef HOQMC_LIST_FIELD
#undef HOQMC_STRING_FIELD
#undef HOQMC_RANGE_FIELD
#undef HOQMC_BOOL_FIELD

const Field& find_field(const std::string& key) {
  for (const auto& f : fields()) {
    if (f.key == key) return f;
  }
  throw ConfigError(key, "unknown key");
}

}  // namespace

Experiment parse_experiment(const std::string& name) {
  if (name == "cbc") return Experiment::cbc;
  if (name == "points") return Experiment::points;
  if (name == "prior") return Experiment::prior;
  if (name == "posterior") return Experiment::posterior;
  if (name == "fem-study") return Experiment::fem_study;
  if (name == "trunc-study") return Experiment::trunc_study;
  throw std::invalid_argument("unknown experiment: " + name);
}

std::string to_string(Experiment e) {
  switch (e) {
    case Experiment::cbc: return "cbc";
    case Experiment::points: return "points";
    case Experiment::prior: return "prior";
    case Experiment::posterior: return "posterior";
    case Experiment::fem_study: return "fem-study";
    case Experiment::trunc_study: return "trunc-study";
  }
  return "?";
}

IntRange parse_range(const std::string& text) {
  const std::string t = trim(text);
  const auto dots = t.find("..");
  IntRange r;
  if (dots == std::string::npos) {
    r.lo = r.hi = parse_number<int>(t);
  } else {
    r.lo = parse_number<int>(t.substr(0, dots));
    r.hi = parse_number<int>(t.substr(dots + 2));
  }
  if (r.hi < r.lo) throw std::invalid_argument("empty range: '" + text + "'");
  return r;
}

std::string to_string(const IntRange& r) {
  return r.lo == r.hi ? std::to_string(r.lo) : std::to_string(r.lo) + ".." + std::to_string(r.hi);
}

const std::vector<std::string>& ExperimentConfig::keys() {
  static const std::vector<std::string> k = [] {
    std::vector<std::string> out;
    for (const auto& f : fields()) out.push_back(f.key);
    return out;
  }();
  return k;
}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  const Field& f = find_field(key);
  try {
    f.set(*this, value);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(key, e.what());
  }
}

std::string ExperimentConfig::get(const std::string& key) const { return find_field(key).get(*this); }

void ExperimentConfig::validate() const {
  auto require = [](bool ok, const char* key, const char* what) {
    if (!ok) throw ConfigError(key, what);
  };
  require(s.lo >= 1 && s.hi <= 4096, "s", "must lie in 1..4096");
  require(alpha >= 2 && alpha <= 8, "alpha", "must lie in 2..8");
  require(zeta > 1.0, "zeta", "must exceed 1");
  require(theta > 0.0, "theta", "must be positive");
  require(walsh_constant > 0.0, "walsh_constant", "must be positive");
  require(hybrid_cutoff >= 0, "hybrid_cutoff", "must be non-negative");
  require(m.lo >= 1 && alpha * std::max(m.hi, resolved_m_ref()) <= 63, "m", "alpha*m must not exceed 63");
  require(m_ref >= 0 && (m_ref == 0 || m_ref >= m.hi), "m_ref", "must be 0 or at least the largest m");
  require(cbc_candidates >= -1, "cbc_candidates", "must be -1, 0 or positive");
  require(!mean || *mean > 0.0, "mean", "must be positive");
  require(indicator_theta > 0.0, "indicator_theta", "must be positive");
  require(grading > 0.0, "grading", "must be positive");
  require(fem_level >= 1 && fem_level <= 20, "fem_level", "must lie in 1..20");
  require(fem_degree == 1 || fem_degree == 2, "fem_degree", "must be 1 or 2");
  require(graded_refine >= 0 && graded_refine <= 16, "graded_refine", "must lie in 0..16");
  require(fem_levels.lo >= 1 && fem_levels.hi <= 20, "fem_levels", "must lie in 1..20");
  require(fem_problem == "closed-form" || fem_problem == "parametric", "fem_problem",
          "must be closed-form or parametric");
  require(!obs_points.empty(), "obs_points", "must not be empty");
  for (double x : obs_points) require(x > 0.0 && x < 1.0, "obs_points", "must lie in (0,1)");
  require(qoi_point >= 0.0 && qoi_point <= 1.0, "qoi_point", "must lie in [0,1]");
  const std::size_t k = obs_points.size();
  require(gamma.empty() || gamma.size() == 1 || gamma.size() == k * k, "gamma", "needs 0, 1 or K*K values");
  require(data.empty() || data.size() == k, "data", "needs K values");
  for (double y : y_star) require(y >= -1.0 && y <= 1.0, "y_star", "entries must lie in [-1,1]");
  require(estimator == "qmc" || estimator == "mc", "estimator", "must be qmc or mc");
  require(mc_reps >= 2, "mc_reps", "must be at least 2");
  require(s_ref >= s.hi, "s_ref", "must be at least the largest s");
  require(policy == "parallel" || policy == "serial", "policy", "must be parallel or serial");
  require(!gv_cache.empty(), "gv_cache", "must not be empty");
}

std::string ExperimentConfig::to_text() const {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.get(*this) + "\n";
  return out;
}

void ExperimentConfig::merge_text(std::istream& is) {
  std::string line;
  while (std::getline(is, line)) {
    const std::string t = trim(line);
    if (t.empty() || t.front() == '#') continue;
    const auto eq = t.find('=');
    if (eq == std::string::npos) throw ConfigError(t, "expected key = value");
    set(trim(t.substr(0, eq)), t.substr(eq + 1));
  }
}

ExperimentConfig ExperimentConfig::from_text(std::istream& is) {
  ExperimentConfig c;
  c.merge_text(is);
  return c;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open config " + path);
  return from_text(is);
}

double ExperimentConfig::resolved_mean() const {
  if (mean) return *mean;
  return basis == forward::BasisKind::kl ? 2.0 : 1.0;
}

}  // namespace hoqmc::harness
