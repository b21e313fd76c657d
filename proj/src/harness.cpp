#include "hoqmc/harness.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace hoqmc::harness {

namespace {

namespace fs = std::filesystem;

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + fmt(v[i]);
  return out;
}

std::uint64_t fnv1a(const std::string& s) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void note(std::ostream* log, const std::string& msg) {
  if (log) *log << msg << std::endl;
}

std::vector<double> y_star_for(const ExperimentConfig& cfg, int s) {
  if (cfg.y_star.empty()) return bayes::default_y_star(s);
  std::vector<double> y(static_cast<std::size_t>(s), 0.0);
  for (std::size_t i = 0; i < y.size() && i < cfg.y_star.size(); ++i) y[i] = cfg.y_star[i];
  return y;
}

// phi(2t - 1) for the QoI of a forward model.
quad::Integrand prior_integrand(const forward::ForwardModel& fm, int s) {
  return [&fm, s](std::span<const double> t) {
    std::vector<double> y(static_cast<std::size_t>(s));
    for (std::size_t j = 0; j < y.size(); ++j) y[j] = 2.0 * t[j] - 1.0;
    return fm(y).qoi;
  };
}

}  // namespace

ExecutionPolicy execution_policy(const ExperimentConfig& cfg) {
  return cfg.policy == "serial" ? ExecutionPolicy::serial : ExecutionPolicy::parallel;
}

cbc::WeightSpec weight_spec(const ExperimentConfig& cfg) {
  cbc::WeightSpec w;
  w.kind = cfg.weights;
  w.theta = cfg.theta;
  w.zeta = cfg.zeta;
  w.alpha = cfg.alpha;
  w.walsh_constant = cfg.walsh_constant;
  w.hybrid_cutoff = cfg.hybrid_cutoff;
  return w;
}

forward::UncertaintyModel make_model(const ExperimentConfig& cfg, int s) {
  forward::UncertaintyModel m =
      cfg.basis == forward::BasisKind::kl
          ? forward::UncertaintyModel::kl(s, cfg.zeta, cfg.resolved_mean())
          : forward::UncertaintyModel::indicator(s, cfg.indicator_theta, cfg.zeta, cfg.resolved_mean(), cfg.grading);
  m.source = cfg.source;
  m.validate();
  return m;
}

forward::FEMConfig fem_config(const ExperimentConfig& cfg) {
  forward::FEMConfig f;
  f.degree = cfg.fem_degree;
  f.level = cfg.fem_level;
  f.graded = cfg.graded;
  f.graded_refine = cfg.graded_refine;
  return f;
}

std::size_t auto_candidates(int s, int m, int alpha) {
  constexpr double kBudget = 1073741824.0;  // 2^30
  const double per_candidate = std::ldexp(1.0, m) * alpha * s;
  const double all = std::ldexp(1.0, m) - 1.0;
  if (all * per_candidate <= kBudget) return 0;
  return static_cast<std::size_t>(std::max(64.0, std::floor(kBudget / per_candidate)));
}

cbc::CBCOptions cbc_options(const ExperimentConfig& cfg, int s, int m) {
  cbc::CBCOptions o;
  o.policy = execution_policy(cfg);
  o.max_candidates = cfg.cbc_candidates < 0 ? auto_candidates(s, m, cfg.alpha)
                                            : static_cast<std::size_t>(cfg.cbc_candidates);
  o.candidate_seed = cfg.candidate_seed;
  return o;
}

std::string cache_path(const ExperimentConfig& cfg, int s, int m) {
  const auto opt = cbc_options(cfg, s, m);
  const std::string key = weight_spec(cfg).fingerprint() + "|cand=" + std::to_string(opt.max_candidates) +
                          "|seed=" + std::to_string(opt.candidate_seed);
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(fnv1a(key)));
  std::ostringstream name;
  name << "gv_s" << s << "_m" << m << "_a" << cfg.alpha << '_' << hash << ".txt";
  return (fs::path(cfg.gv_cache) / name.str()).string();
}

lattice::GeneratingVector obtain_vector(const ExperimentConfig& cfg, int s, int m, std::ostream* log) {
  const std::string path = cache_path(cfg, s, m);
  const auto w = weight_spec(cfg);
  if (fs::exists(path)) {
    auto gv = lattice::load_generating_vector(path);
    if (gv.s == s && gv.m == m && gv.alpha == cfg.alpha && gv.weight_fingerprint == w.fingerprint()) return gv;
    note(log, "cache entry " + path + " does not match; rebuilding");
  }
  const auto opt = cbc_options(cfg, s, m);
  const auto res = cbc::cbc_construct(s, m, w, opt);
  note(log, "cbc s=" + std::to_string(s) + " m=" + std::to_string(m) + " alpha=" + std::to_string(cfg.alpha) +
                " candidates=" + (opt.max_candidates ? std::to_string(opt.max_candidates) : std::string("all")) +
                " E=" + fmt(res.criterion_trace.back()) + " (" + fmt(res.elapsed) + " s)");
  fs::create_directories(cfg.gv_cache);
  write_atomically(path, [&](std::ostream& os) { lattice::write_generating_vector(os, res.vector); });
  return res.vector;
}

bayes::ObservationSetup observation_setup(const ExperimentConfig& cfg, const forward::ForwardModel& model) {
  const auto k = static_cast<Eigen::Index>(cfg.obs_points.size());
  Eigen::MatrixXd gamma = Eigen::MatrixXd::Identity(k, k);
  if (cfg.gamma.size() == 1) {
    gamma *= cfg.gamma[0];
  } else if (cfg.gamma.size() == static_cast<std::size_t>(k * k)) {
    for (Eigen::Index i = 0; i < k; ++i)
      for (Eigen::Index j = 0; j < k; ++j) gamma(i, j) = cfg.gamma[static_cast<std::size_t>(i * k + j)];
  } else if (!cfg.gamma.empty()) {
    throw ConfigError("gamma", "needs 0, 1 or K*K values");
  }
  bayes::ObservationSetup setup(cfg.obs_points, gamma, {}, cfg.noise_seed);
  if (!cfg.data.empty()) {
    setup.set_data(Eigen::Map<const Eigen::VectorXd>(cfg.data.data(), k));
    return setup;
  }
  return bayes::synthesize_data(model, y_star_for(cfg, model.model().s), setup, cfg.noise);
}

QmcStudy qmc_study(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const int s = cfg.s.hi;
  const auto policy = execution_policy(cfg);
  const forward::ForwardModel fm(make_model(cfg, s), fem_config(cfg), cfg.obs_points, cfg.qoi_point);
  const auto setup = observation_setup(cfg, fm);

  QmcStudy study;
  study.data.assign(setup.data().data(), setup.data().data() + setup.data().size());

  const int m_ref = cfg.resolved_m_ref();
  const auto ref_points = lattice::generate_points(obtain_vector(cfg, s, m_ref, log), policy);
  const auto t_ref = std::chrono::steady_clock::now();
  const auto ref = bayes::ratio_estimate(fm, setup, ref_points, policy);
  note(log, "reference m=" + std::to_string(m_ref) + " prior=" + fmt(ref.prior_mean) +
                " posterior=" + fmt(ref.posterior_mean) + " (" + fmt(seconds_since(t_ref)) + " s)");
  study.prior_reference = ref.prior_mean;

  for (int m = cfg.m.lo; m <= cfg.m.hi; ++m) {
    const auto points = lattice::generate_points(obtain_vector(cfg, s, m, log), policy);
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = bayes::ratio_estimate(fm, setup, points, policy);
    const double secs = seconds_since(t0);
    study.prior.add({m, points.n_points, r.prior_mean, ref.prior_mean, std::abs(r.prior_mean - ref.prior_mean), secs});
    study.posterior.add(
        {m, points.n_points, r.posterior_mean, ref.posterior_mean, std::abs(r.posterior_mean - ref.posterior_mean), secs});
    note(log, "m=" + std::to_string(m) + " prior_err=" + fmt(study.prior.rows.back().abs_error) +
                  " posterior_err=" + fmt(study.posterior.rows.back().abs_error));
  }
  study.prior.metadata = {{"series", "qmc-prior"}, {"reference_m", std::to_string(m_ref)}};
  study.posterior.metadata = {{"series", "qmc-ratio"}, {"reference_m", std::to_string(m_ref)},
                              {"data", join(study.data)}};
  return study;
}

quad::ConvergenceRecord mc_study(const ExperimentConfig& cfg, std::optional<double> reference, std::ostream* log) {
  cfg.validate();
  const int s = cfg.s.hi;
  const auto policy = execution_policy(cfg);
  const forward::ForwardModel fm(make_model(cfg, s), fem_config(cfg), cfg.obs_points, cfg.qoi_point);
  const auto g = prior_integrand(fm, s);
  if (!reference) {
    const auto points = lattice::generate_points(obtain_vector(cfg, s, cfg.resolved_m_ref(), log), policy);
    reference = quad::qmc_integrate(points, g, policy);
  }
  quad::ConvergenceRecord rec;
  rec.metadata = {{"series", "mc"}, {"reference", fmt(*reference)}};
  for (int m = cfg.m.lo; m <= cfg.m.hi; ++m) {
    const std::size_t n = std::size_t{1} << m;
    const auto t0 = std::chrono::steady_clock::now();
    const auto r = quad::mc_estimate(n, s, cfg.mc_reps, cfg.mc_seed + static_cast<std::uint64_t>(m), g, *reference,
                                     policy);
    rec.add({m, n, r.mean, *reference, r.l2_error, seconds_since(t0)});
    note(log, "m=" + std::to_string(m) + " mc_l2=" + fmt(r.l2_error));
  }
  return rec;
}

quad::ConvergenceRecord fem_study(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const bool closed = cfg.fem_problem == "closed-form";
  // The closed-form problem is the nominal coefficient alone.
  const int s = closed ? 0 : cfg.s.hi;
  const auto model = make_model(cfg, s);
  const std::vector<double> y = y_star_for(cfg, s);
  const double x = cfg.qoi_point;

  auto qoi_at = [&](int level) {
    auto fc = fem_config(cfg);
    fc.level = level;
    fc.graded_refine = level;
    const forward::ForwardModel fm(model, fc, {}, x);
    return std::pair{fm(y).qoi, fm.mesh().n_elements()};
  };

  double reference = 0.0;
  if (closed) {
    const double u = model.mean;
    reference = model.basis == forward::BasisKind::kl ? model.source / (6.0 * u) * (x - x * x * x)
                                                      : model.source / (2.0 * u) * x * (1.0 - x);
  } else {
    reference = qoi_at(cfg.fem_levels.hi + 2).first;
  }

  quad::ConvergenceRecord rec;
  rec.metadata = {{"series", "fem-" + cfg.fem_problem}, {"x_column", "level"}};
  for (int level = cfg.fem_levels.lo; level <= cfg.fem_levels.hi; ++level) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto [q, ne] = qoi_at(level);
    rec.add({level, ne, q, reference, std::abs(q - reference), seconds_since(t0)});
    note(log, "level=" + std::to_string(level) + " err=" + fmt(rec.rows.back().abs_error));
  }
  return rec;
}

quad::ConvergenceRecord trunc_study(const ExperimentConfig& cfg, std::ostream* log) {
  cfg.validate();
  const auto policy = execution_policy(cfg);
  const auto points = lattice::generate_points(obtain_vector(cfg, cfg.s_ref, cfg.m.hi, log), policy);

  // The first s' coordinates of the rule with the remaining parameters at zero.
  auto mean_at = [&](int s_prime) {
    const forward::ForwardModel fm(make_model(cfg, s_prime), fem_config(cfg), {}, cfg.qoi_point);
    return quad::qmc_integrate(points, prior_integrand(fm, s_prime), policy);
  };

  const auto t_ref = std::chrono::steady_clock::now();
  const double reference = mean_at(cfg.s_ref);
  note(log, "reference s=" + std::to_string(cfg.s_ref) + " mean=" + fmt(reference) + " (" +
                fmt(seconds_since(t_ref)) + " s)");

  quad::ConvergenceRecord rec;
  rec.metadata = {{"series", "qmc-truncation"}, {"x_column", "s"}, {"reference_s", std::to_string(cfg.s_ref)}};
  for (int s = cfg.s.lo; s <= cfg.s.hi; s *= 2) {
    const auto t0 = std::chrono::steady_clock::now();
    const double e = mean_at(s);
    rec.add({s, static_cast<std::size_t>(s), e, reference, std::abs(e - reference), seconds_since(t0)});
    note(log, "s=" + std::to_string(s) + " err=" + fmt(rec.rows.back().abs_error));
  }
  return rec;
}

void write_atomically(const std::string& path, const std::function<void(std::ostream&)>& body) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const std::string tmp = path + ".tmp";
  try {
    {
      std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
      if (!os) throw std::runtime_error("cannot open " + tmp);
      body(os);
      os.flush();
      if (!os) throw std::runtime_error("write failed: " + tmp);
    }
    fs::rename(tmp, target);
  } catch (...) {
    std::error_code ec;
    fs::remove(tmp, ec);
    throw;
  }
}

void write_header(std::ostream& os, const ExperimentConfig& cfg,
                  const std::vector<std::pair<std::string, std::string>>& extra) {
  for (const auto& key : ExperimentConfig::keys()) {
    if (key == "output") continue;  // where the artifact lives is not part of its content
    os << "# " << key << " = " << cfg.get(key) << '\n';
  }
  for (const auto& [k, v] : extra) os << "# " << k << " = " << v << '\n';
}

void write_csv(const std::string& path, const quad::ConvergenceRecord& record, const ExperimentConfig& cfg) {
  write_atomically(path, [&](std::ostream& os) {
    auto extra = record.metadata;
    if (record.rows.size() >= 2) extra.emplace_back("slope_last5", fmt(quad::fit_slope(record, 5)));
    write_header(os, cfg, extra);
    os << "m,N,estimate,reference,abs_error,seconds\n";
    for (const auto& r : record.rows) {
      os << r.m << ',' << r.n << ',' << fmt(r.estimate) << ',' << fmt(r.reference) << ',' << fmt(r.abs_error) << ','
         << fmt(r.seconds) << '\n';
    }
  });
}

void write_points(const std::string& path, const lattice::InterlacedPointSet& points, const ExperimentConfig& cfg) {
  write_atomically(path, [&](std::ostream& os) {
    write_header(os, cfg);
    for (std::size_t n = 0; n < points.n_points; ++n) {
      for (int j = 0; j < points.s; ++j) {
        os << (j ? "," : "") << lattice::exact_dyadic_decimal(points.at(n, j), points.precision);
      }
      os << '\n';
    }
  });
}

int run(const ExperimentConfig& cfg, std::ostream& log, std::ostream& err) {
  try {
    cfg.validate();
    const std::string out = cfg.output.empty() ? to_string(cfg.experiment) + ".csv" : cfg.output;
    switch (cfg.experiment) {
      case Experiment::cbc: {
        const auto w = weight_spec(cfg);
        const auto res = cbc::cbc_construct(cfg.s.hi, cfg.m.hi, w, cbc_options(cfg, cfg.s.hi, cfg.m.hi));
        const std::string path = cfg.output.empty() ? "gv.txt" : cfg.output;
        write_atomically(path, [&](std::ostream& os) {
          write_header(os, cfg, {{"criterion", fmt(res.criterion_trace.back())}});
          lattice::write_generating_vector(os, res.vector);
        });
        log << "wrote " << path << " (E=" << fmt(res.criterion_trace.back()) << ", " << fmt(res.elapsed) << " s)\n";
        break;
      }
      case Experiment::points: {
        const auto gv = obtain_vector(cfg, cfg.s.hi, cfg.m.hi, &log);
        write_points(out, lattice::generate_points(gv, execution_policy(cfg)), cfg);
        log << "wrote " << out << '\n';
        break;
      }
      case Experiment::prior: {
        const auto rec = cfg.estimator == "mc" ? mc_study(cfg, std::nullopt, &log) : qmc_study(cfg, &log).prior;
        write_csv(out, rec, cfg);
        log << "wrote " << out << '\n';
        break;
      }
      case Experiment::posterior: {
        write_csv(out, qmc_study(cfg, &log).posterior, cfg);
        log << "wrote " << out << '\n';
        break;
      }
      case Experiment::fem_study: {
        write_csv(out, fem_study(cfg, &log), cfg);
        log << "wrote " << out << '\n';
        break;
      }
      case Experiment::trunc_study: {
        write_csv(out, trunc_study(cfg, &log), cfg);
        log << "wrote " << out << '\n';
        break;
      }
    }
    return 0;
  } catch (const ConfigError& e) {
    err << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
}

}  // namespace hoqmc::harness
