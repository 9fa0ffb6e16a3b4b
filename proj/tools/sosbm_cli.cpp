#include <fstream>
#include <iostream>

#include <CLI11.hpp>

#include "sosbm/experiment.hpp"

namespace {

struct Common {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<unsigned> jobs;
  std::optional<std::string> out;
  bool no_timestamp = false;
};

void add_common(CLI::App* app, Common& c) {
  app->add_option("--config", c.config, "key = value or JSON experiment config")->check(CLI::ExistingFile);
  app->add_option("--seed", c.seed, "override the config seed");
  app->add_option("--jobs", c.jobs, "worker threads (0 = hardware concurrency)");
  app->add_option("--out", c.out, "output directory");
  app->add_flag("--no-timestamp", c.no_timestamp, "omit the timestamp line so reruns are byte-identical");
}

sosbm::ExperimentConfig resolve(const Common& c) {
  sosbm::ExperimentConfig cfg = c.config.empty() ? sosbm::config_from_map({}) : sosbm::load_config(c.config);
  if (c.seed) cfg.seed = *c.seed;
  if (c.jobs) cfg.jobs = *c.jobs;
  if (c.out) cfg.out = *c.out;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Simulation and inference for skew-oscillating-sticky Brownian motion"};
  app.require_subcommand(1);

  Common sim_opts, conv_opts, ver_opts;
  auto* sim = app.add_subcommand("simulate", "write sample paths and a manifest");
  add_common(sim, sim_opts);
  auto* conv = app.add_subcommand("convergence", "Monte Carlo convergence of the local-time statistics");
  add_common(conv, conv_opts);
  auto* ver = app.add_subcommand("verify", "deterministic audits of the kernel and semigroup");
  add_common(ver, ver_opts);
  std::optional<std::string> scope;
  ver->add_option("--scope", scope, "kernel | bounds | scaling | ghat_mass | reduction | all");

  auto* est = app.add_subcommand("estimate", "estimate parameters from one path CSV");
  std::string input;
  std::optional<std::string> est_out;
  sosbm::EstimateOptions eo;
  std::string u_name = "sqrt";
  est->add_option("input", input, "path CSV")->required();
  est->add_option("--sigma-minus", eo.sigma_minus, "known volatility below 0");
  est->add_option("--sigma-plus", eo.sigma_plus, "known volatility above 0");
  est->add_flag("--joint", eo.joint, "estimate the volatilities first, then stickiness and skewness");
  est->add_option("--g", eo.g, "test function id");
  est->add_option("--u", u_name, "sqrt | log | power:<alpha>");
  est->add_option("--out", est_out, "output CSV (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : sosbm::kConfigError;
  }

  try {
    if (*sim) {
      sosbm::RunOptions o;
      o.timestamp = !sim_opts.no_timestamp;
      return sosbm::run_simulate(resolve(sim_opts), o);
    }
    if (*conv) {
      sosbm::RunOptions o;
      o.timestamp = !conv_opts.no_timestamp;
      return sosbm::run_convergence(resolve(conv_opts), o);
    }
    if (*ver) {
      sosbm::RunOptions o;
      o.timestamp = !ver_opts.no_timestamp;
      sosbm::ExperimentConfig cfg = resolve(ver_opts);
      if (scope) {
        cfg.scope = *scope;
        cfg.validate();
      }
      return sosbm::run_verify(cfg, cfg.scope, o);
    }
    if (*est) {
      eo.u = sosbm::detail::to_sequence(u_name);
      if (est_out) {
        std::ofstream os(*est_out);
        if (!os) throw sosbm::ConfigError("out", "cannot write " + *est_out);
        return sosbm::run_estimate(input, eo, os);
      }
      return sosbm::run_estimate(input, eo, std::cout);
    }
  } catch (const sosbm::ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sosbm::kConfigError;
  } catch (const sosbm::PathSchemaError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sosbm::kConfigError;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sosbm::kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return sosbm::kFail;
  }
  return sosbm::kConfigError;
}
