#pragma once

// Experiment configuration as plain `key = value` lines.
//
// Every key has a canonical text form; to_text() writes all of them and
// from_text() reads them back, so a config round-trips exactly.  Doubles are
// written with 17 significant digits.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hoqmc/forward.hpp"
#include "hoqmc/weights.hpp"

namespace hoqmc::harness {

class ConfigError : public std::invalid_argument {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::invalid_argument("config key '" + key + "': " + what), key_(std::move(key)) {}
  [[nodiscard]] const std::string& key() const { return key_; }

 private:
  std::string key_;
};

enum class Experiment { cbc, points, prior, posterior, fem_study, trunc_study };

Experiment parse_experiment(const std::string& name);
std::string to_string(Experiment e);

/// Inclusive integer range written "lo..hi" (or a single integer).
struct IntRange {
  int lo = 0;
  int hi = 0;
  friend bool operator==(const IntRange&, const IntRange&) = default;
};

IntRange parse_range(const std::string& text);
std::string to_string(const IntRange& r);

struct ExperimentConfig {
  Experiment experiment = Experiment::prior;
  forward::BasisKind basis = forward::BasisKind::kl;
  IntRange s{32, 32};              // trunc-study: doubling sequence lo, 2lo, ..., hi
  int alpha = 2;
  double zeta = 2.0;
  double theta = 0.2;              // CBC weights beta_j = theta j^-zeta
  double walsh_constant = 0.1;     // C
  cbc::WeightKind weights = cbc::WeightKind::spod;
  int hybrid_cutoff = 0;
  IntRange m{3, 12};
  int m_ref = 0;                   // 0: m.hi + 4
  long cbc_candidates = -1;        // -1: budget rule, 0: all, k: k per slot
  std::uint64_t candidate_seed = 0x5eed;
  std::optional<double> mean;      // <u>; unset: 2 (kl), 1 (indicator)
  double indicator_theta = 0.25;
  double grading = 0.2;
  double source = 100.0;
  int fem_level = 12;
  int fem_degree = 1;
  bool graded = false;
  int graded_refine = 0;
  IntRange fem_levels{4, 12};
  std::string fem_problem = "closed-form";  // or "parametric"
  std::vector<double> obs_points{0.2, 0.5, 0.7};
  double qoi_point = 0.25;
  std::vector<double> gamma;       // empty: identity; one value: g*I; K*K values: full
  std::uint64_t noise_seed = 2024;
  bool noise = true;
  std::vector<double> y_star;      // empty: (0.3, -0.7, 0.2, 0, ...)
  std::vector<double> data;        // empty: synthesised from y_star
  std::string estimator = "qmc";   // prior only: qmc or mc
  int mc_reps = 10;
  std::uint64_t mc_seed = 1;
  int s_ref = 512;                 // trunc-study reference dimension
  std::string policy = "parallel";
  std::string output;
  std::string gv_cache = "gv-cache";

  /// All keys in file order.
  static const std::vector<std::string>& keys();

  /// Throws ConfigError naming the key on unknown keys or bad values.
  void set(const std::string& key, const std::string& value);
  [[nodiscard]] std::string get(const std::string& key) const;

  /// Throws ConfigError naming the first out-of-range key.
  void validate() const;

  [[nodiscard]] std::string to_text() const;
  /// Lines `key = value`; blank lines and `#` comments skipped.
  static ExperimentConfig from_text(std::istream& is);
  static ExperimentConfig load(const std::string& path);
  /// Reads lines into an existing config (later values win).
  void merge_text(std::istream& is);

  [[nodiscard]] double resolved_mean() const;
  [[nodiscard]] int resolved_m_ref() const { return m_ref > 0 ? m_ref : m.hi + 4; }

  friend bool operator==(const ExperimentConfig&, const ExperimentConfig&) = default;
};

}  // namespace hoqmc::harness
