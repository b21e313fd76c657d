// hoqmc: command line front end for the experiments.
//
//   hoqmc <cbc|points|prior|posterior|fem-study|trunc-study> [--config FILE] [--key value ...]
//
// Every config key is also a flag, with '_' spelled '-'.  Flags override the file.

#include <algorithm>
#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "hoqmc/harness.hpp"

namespace {

std::string flag_name(std::string key) {
  std::replace(key.begin(), key.end(), '_', '-');
  return "--" + key;
}

}  // namespace

int main(int argc, char** argv) {
  using hoqmc::harness::ExperimentConfig;

  CLI::App app{"Higher-order QMC for parametric diffusion and Bayesian inversion"};
  app.require_subcommand(1);

  struct Sub {
    CLI::App* app = nullptr;
    std::string config_file;
    bool no_noise = false;
    std::map<std::string, std::string> values;
  };
  const char* names[] = {"cbc", "points", "prior", "posterior", "fem-study", "trunc-study"};
  std::map<std::string, Sub> subs;
  for (const char* name : names) {
    Sub& sub = subs[name];
    sub.app = app.add_subcommand(name, std::string("run the ") + name + " experiment");
    sub.app->add_option("--config", sub.config_file, "key = value file; flags take precedence");
    sub.app->add_flag("--no-noise", sub.no_noise, "synthesise data without noise");
    for (const auto& key : ExperimentConfig::keys()) {
      if (key == "experiment") continue;
      sub.app->add_option(flag_name(key), sub.values[key], "config key " + key);
    }
  }

  CLI11_PARSE(app, argc, argv);

  for (auto& [name, sub] : subs) {
    if (!sub.app->parsed()) continue;
    ExperimentConfig cfg;
    try {
      if (!sub.config_file.empty()) cfg = ExperimentConfig::load(sub.config_file);
      cfg.set("experiment", name);
      for (const auto& key : ExperimentConfig::keys()) {
        if (key == "experiment") continue;
        if (sub.app->count(flag_name(key)) > 0) cfg.set(key, sub.values[key]);
      }
      if (sub.no_noise) cfg.noise = false;
    } catch (const hoqmc::harness::ConfigError& e) {
      std::cerr << "usage error: " << e.what() << '\n';
      return 2;
    } catch (const std::exception& e) {
      std::cerr << "error: " << e.what() << '\n';
      return 1;
    }
    return hoqmc::harness::run(cfg, std::cout, std::cerr);
  }
  return 1;
}
