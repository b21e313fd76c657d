#pragma once

// Experiment drivers behind the `hoqmc` command line tool.

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "hoqmc/bayes.hpp"
#include "hoqmc/cbc.hpp"
#include "hoqmc/config.hpp"
#include "hoqmc/forward.hpp"
#include "hoqmc/quadrature.hpp"

namespace hoqmc::harness {

ExecutionPolicy execution_policy(const ExperimentConfig& cfg);
cbc::WeightSpec weight_spec(const ExperimentConfig& cfg);
forward::UncertaintyModel make_model(const ExperimentConfig& cfg, int s);
forward::FEMConfig fem_config(const ExperimentConfig& cfg);

/// Candidates per CBC slot when cbc_candidates = -1: the full search while
/// (2^m - 1) 2^m alpha s stays within 2^30 kernel evaluations, otherwise the
/// largest subset that fits (at least 64).  Returns 0 for the full search.
std::size_t auto_candidates(int s, int m, int alpha);

cbc::CBCOptions cbc_options(const ExperimentConfig& cfg, int s, int m);

/// Cache file name for a rule: depends on s, m, alpha and a hash of the weight
/// fingerprint and candidate settings.
std::string cache_path(const ExperimentConfig& cfg, int s, int m);

/// Loads the rule from the cache or builds and stores it.
lattice::GeneratingVector obtain_vector(const ExperimentConfig& cfg, int s, int m, std::ostream* log = nullptr);

/// Observation setup with the configured Gamma; data from cfg.data when given,
/// otherwise synthesised at y* with the configured noise.
bayes::ObservationSetup observation_setup(const ExperimentConfig& cfg, const forward::ForwardModel& model);

struct QmcStudy {
  quad::ConvergenceRecord prior;
  quad::ConvergenceRecord posterior;
  std::vector<double> data;  // delta actually used
  double prior_reference = 0.0;
};

/// Prior and posterior estimates for every m in cfg.m from one pass per rule,
/// each against the same estimator at m_ref.
QmcStudy qmc_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Monte Carlo prior estimates for every m; reference from the QMC rule at
/// m_ref unless given.
quad::ConvergenceRecord mc_study(const ExperimentConfig& cfg, std::optional<double> reference = std::nullopt,
                                 std::ostream* log = nullptr);

/// QoI error over FEM levels.  closed-form: y = 0 against the exact solution;
/// parametric: y = y* against level fem_levels.hi + 2.  Rows use m = level and
/// N = number of elements.
quad::ConvergenceRecord fem_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Prior QoI mean for s = s.lo, 2 s.lo, ... <= s.hi against s = s_ref, all on
/// the first coordinates of one rule with s_ref dimensions and m = m.hi.  Rows
/// use m = N = s.
quad::ConvergenceRecord trunc_study(const ExperimentConfig& cfg, std::ostream* log = nullptr);

/// Writes via a temporary file renamed on success; the temporary is removed
/// if `body` throws.
void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body);

/// `# key = value` lines for the full config plus extra metadata.
void write_header(std::ostream& os, const ExperimentConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& extra = {});

void write_csv(const std::string& path, const quad::ConvergenceRecord& record, const ExperimentConfig& cfg);

/// One row per point, coordinates as exact decimals of i / 2^(alpha m).
void write_points(const std::string& path, const lattice::InterlacedPointSet& points, const ExperimentConfig& cfg);

/// Runs the configured experiment.  Returns 0 on success, 2 on configuration
/// errors and 1 on any other failure (reported to err).
int run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err);

}  // namespace hoqmc::harness
