// Command-line front end: dataset simulation, IRLS fitting, single-chain
// sampling, experiment sweeps, and trace diagnostics.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "mcglm/harness.hpp"
#include "mcglm/version.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;    // config or input validation
constexpr int kExitNumeric = 3;  // runtime numerical failure

struct McmcOptions {
  std::string method = "independent";
  std::string data_path;
  std::size_t iters = 5000;
  std::size_t burn_in = 1500;
  std::uint64_t seed = 20240817;
  std::string trace_out;
  std::vector<double> step_sd = {0.1, 0.1};
  double c_beta = 1.0;
  double target_accept = 0.35;
  bool no_adapt = false;
  bool init_at_irls = false;
  std::vector<double> prior_mu = {0.0, 0.0};
  std::vector<double> prior_var = {100.0, 100.0};
  std::size_t samc_regions = 41;
  double samc_width = 200.0;
  double samc_t0 = 1000.0;
};

int cmd_simulate(double beta0, double beta1, std::size_t n,
                 std::uint64_t seed, const std::string& out) {
  mcglm::RngStream rng(seed);
  mcglm::Dataset d = mcglm::simulate_dataset({beta0, beta1}, n, rng);
  mcglm::save_csv_dataset(d, out);
  std::cout << "wrote " << d.n() << " observations to " << out << "\n";
  return kExitOk;
}

int cmd_fit(const std::string& data, double tol, std::size_t max_iter) {
  mcglm::Dataset d = mcglm::load_csv_dataset(data);
  mcglm::MleResult fit = mcglm::irls_fit(d, tol, max_iter);
  std::cout << "beta0 " << mcglm::format_double(fit.beta_hat.beta0) << "\n"
            << "beta1 " << mcglm::format_double(fit.beta_hat.beta1) << "\n"
            << "cov00 " << mcglm::format_double(fit.covariance.a00) << "\n"
            << "cov01 " << mcglm::format_double(fit.covariance.a01) << "\n"
            << "cov11 " << mcglm::format_double(fit.covariance.a11) << "\n"
            << "iterations " << fit.iterations << "\n";
  return kExitOk;
}

int cmd_mcmc(const McmcOptions& opt) {
  mcglm::Dataset d = mcglm::load_csv_dataset(opt.data_path);
  mcglm::PriorSpec prior = mcglm::PriorSpec::independent_normal(
      opt.prior_mu.at(0), opt.prior_mu.at(1), opt.prior_var.at(0),
      opt.prior_var.at(1));
  mcglm::RngStream rng(opt.seed);
  mcglm::ParamVector init;
  if (opt.init_at_irls) {
    init = mcglm::irls_fit(d).beta_hat;
  }

  if (opt.method == "samc") {
    mcglm::EnergyPartition part =
        mcglm::make_partition(d, prior, opt.samc_regions, opt.samc_width);
    mcglm::GainSchedule sched{opt.samc_t0, 1.5};
    mcglm::SamcRun run = mcglm::samc_run(init, opt.iters, opt.burn_in, part,
                                         sched, {}, d, prior, rng);
    mcglm::SamcEstimate est = mcglm::samc_estimate(
        run.trace, run.region, run.theta_final, opt.burn_in);
    if (!opt.trace_out.empty()) {
      mcglm::write_samc_trace_csv(run, opt.trace_out);
    }
    std::cout << "mean_beta0 " << mcglm::format_double(est.mean.beta0) << "\n"
              << "mean_beta1 " << mcglm::format_double(est.mean.beta1) << "\n"
              << "plain_mean_beta0 "
              << mcglm::format_double(est.plain_mean.beta0) << "\n"
              << "plain_mean_beta1 "
              << mcglm::format_double(est.plain_mean.beta1) << "\n"
              << "weight_ess "
              << mcglm::format_double(est.effective_sample_size) << "\n"
              << "acceptance_rate "
              << mcglm::format_double(mcglm::acceptance_rate(run.trace)) << "\n"
              << "visited_regions " << [&] {
                   std::size_t k = 0;
                   std::vector<std::uint8_t> seen(part.regions(), 0);
                   for (std::size_t r : run.region) seen[r] = 1;
                   for (auto v : seen) k += v;
                   return k;
                 }() << "/" << part.regions() << "\n";
    return kExitOk;
  }

  mcglm::ProposalSpec prop;
  prop.step_sd = {opt.step_sd.at(0), opt.step_sd.at(1)};
  prop.c_beta = opt.c_beta;
  prop.target_accept = opt.target_accept;
  prop.adapt = !opt.no_adapt;
  mcglm::ProposalKind kind;
  if (opt.method == "independent") {
    kind = mcglm::ProposalKind::IndependentDiag;
  } else if (opt.method == "dependent") {
    kind = mcglm::ProposalKind::FisherScaled;
  } else if (opt.method == "individual") {
    kind = mcglm::ProposalKind::Componentwise;
  } else {
    throw std::invalid_argument("unknown --method " + opt.method);
  }
  mcglm::ChainTrace trace = mcglm::run_chain(kind, init, opt.iters, opt.burn_in,
                                             d, prior, prop, rng);
  if (!opt.trace_out.empty()) {
    mcglm::write_trace_csv(trace, opt.trace_out);
  }
  mcglm::ParamVector mean = mcglm::chain_mean(trace, opt.burn_in);
  std::cout << "mean_beta0 " << mcglm::format_double(mean.beta0) << "\n"
            << "mean_beta1 " << mcglm::format_double(mean.beta1) << "\n"
            << "acceptance_rate "
            << mcglm::format_double(mcglm::acceptance_rate(
                   trace, opt.burn_in, trace.length()))
            << "\n";
  return kExitOk;
}

int cmd_experiment(const std::string& config_path, const std::string& out_dir) {
  std::ifstream in(config_path);
  if (!in) {
    throw std::invalid_argument("cannot open config " + config_path);
  }
  std::stringstream buf;
  buf << in.rdbuf();
  mcglm::ExperimentConfig config =
      mcglm::ExperimentConfig::from_json_text(buf.str());
  mcglm::ExperimentResult result = mcglm::run_experiment_to_dir(config, out_dir);
  std::size_t failures = 0;
  for (const auto& c : result.manifest.cells) {
    if (!c.ok) ++failures;
  }
  std::cout << "summary: " << out_dir << "/summary.csv\n"
            << "manifest: " << out_dir << "/manifest.json\n"
            << "cells " << result.manifest.cells.size() << ", failed "
            << failures << "\n";
  return kExitOk;
}

int cmd_diagnose(const std::string& trace_path,
                 const std::vector<std::size_t>& starts, double tol,
                 const std::string& series_out) {
  mcglm::ChainTrace trace = mcglm::read_trace_csv(trace_path);
  mcglm::CumulativeMeanSeries series = mcglm::cumulative_mean(trace, starts);
  mcglm::DualStartResult check = mcglm::dual_start_check(series, tol);
  if (!series_out.empty()) {
    std::ofstream out(series_out);
    if (!out) {
      throw std::invalid_argument("cannot write " + series_out);
    }
    out << "iteration,coordinate,start_offset,value\n";
    for (std::size_t s = 0; s < series.starts.size(); ++s) {
      for (std::size_t coord = 0; coord < 2; ++coord) {
        for (std::size_t t = series.starts[s]; t <= series.length; ++t) {
          out << t << ',' << coord << ',' << series.starts[s] << ','
              << mcglm::format_double(series.at(s, coord, t)) << '\n';
        }
      }
    }
  }
  std::cout << "converged " << (check.converged ? "yes" : "no") << "\n";
  if (check.crossing_iteration) {
    std::cout << "crossing_iteration " << *check.crossing_iteration << "\n";
  }
  std::cout << "final_gap " << mcglm::format_double(check.final_gap) << "\n";
  return check.converged ? kExitOk : kExitNumeric;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo samplers and an IRLS baseline for logistic regression"};
  app.set_version_flag("--version", mcglm::kVersion);
  app.require_subcommand(1);

  // simulate
  auto* sim = app.add_subcommand("simulate", "Simulate a dataset CSV");
  double beta0 = 0.1, beta1 = 0.2;
  std::size_t sim_n = 1000;
  std::uint64_t sim_seed = 20240817;
  std::string sim_out = "dataset.csv";
  sim->add_option("--beta0", beta0, "True intercept");
  sim->add_option("--beta1", beta1, "True slope");
  sim->add_option("--n", sim_n, "Number of observations");
  sim->add_option("--seed", sim_seed, "RNG seed");
  sim->add_option("--out", sim_out, "Output CSV path")->required();

  // fit
  auto* fit = app.add_subcommand("fit", "IRLS maximum-likelihood fit on a CSV");
  std::string fit_data;
  double fit_tol = 1e-8;
  std::size_t fit_max_iter = 100;
  fit->add_option("--data", fit_data, "Dataset CSV")->required();
  fit->add_option("--tol", fit_tol, "Gradient norm tolerance");
  fit->add_option("--max-iter", fit_max_iter, "Iteration budget");

  // mcmc
  auto* mcmc = app.add_subcommand("mcmc", "Run one sampling chain");
  McmcOptions mo;
  mcmc->add_option("--method", mo.method,
                   "independent | dependent | individual | samc");
  mcmc->add_option("--data", mo.data_path, "Dataset CSV")->required();
  mcmc->add_option("--iters", mo.iters, "Chain length");
  mcmc->add_option("--burnin", mo.burn_in, "Burn-in length");
  mcmc->add_option("--seed", mo.seed, "RNG seed");
  mcmc->add_option("--trace-out", mo.trace_out, "Trace CSV output path");
  mcmc->add_option("--step-sd", mo.step_sd, "Proposal sd per coordinate")
      ->expected(2);
  mcmc->add_option("--c-beta", mo.c_beta, "Fisher proposal scale");
  mcmc->add_option("--target-accept", mo.target_accept,
                   "Adaptation target acceptance rate");
  mcmc->add_flag("--no-adapt", mo.no_adapt, "Disable burn-in adaptation");
  mcmc->add_flag("--init-at-irls", mo.init_at_irls, "Start at the IRLS fit");
  mcmc->add_option("--prior-mu", mo.prior_mu, "Prior means")->expected(2);
  mcmc->add_option("--prior-var", mo.prior_var, "Prior variances")->expected(2);
  mcmc->add_option("--samc-regions", mo.samc_regions, "Energy band count");
  mcmc->add_option("--samc-width", mo.samc_width, "Energy span above the pilot optimum");
  mcmc->add_option("--samc-t0", mo.samc_t0, "Gain schedule t0");

  // experiment
  auto* exp = app.add_subcommand("experiment", "Run a replication sweep");
  std::string exp_config, exp_out = "out";
  exp->add_option("--config", exp_config, "Config JSON path")->required();
  exp->add_option("--out", exp_out, "Output directory");

  // diagnose
  auto* diag = app.add_subcommand("diagnose", "Dual-start convergence check on a trace");
  std::string diag_trace, diag_series;
  std::vector<std::size_t> diag_starts = {1, 1500};
  double diag_tol = 0.05;
  diag->add_option("--trace", diag_trace, "Trace CSV")->required();
  diag->add_option("--starts", diag_starts, "Start offsets (1-based)")
      ->delimiter(',');
  diag->add_option("--tol", diag_tol, "Gap tolerance");
  diag->add_option("--series-out", diag_series, "Cumulative-mean series CSV");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*sim) return cmd_simulate(beta0, beta1, sim_n, sim_seed, sim_out);
    if (*fit) return cmd_fit(fit_data, fit_tol, fit_max_iter);
    if (*mcmc) return cmd_mcmc(mo);
    if (*exp) return cmd_experiment(exp_config, exp_out);
    if (*diag) return cmd_diagnose(diag_trace, diag_starts, diag_tol, diag_series);
  } catch (const mcglm::CsvError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitNumeric;
  }
  return kExitOk;
}
