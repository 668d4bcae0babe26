#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mcglm/harness.hpp"
#include "oracles.hpp"

using namespace mcglm;

namespace {
std::string slurp(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};
}  // namespace

TEST_CASE("simulate_dataset marginals") {
  RngStream rng(401);
  Dataset half = simulate_dataset({0.0, 0.0}, 100000, rng);
  double ybar = 0;
  for (double y : half.y) ybar += y;
  ybar /= double(half.n());
  CHECK(std::fabs(ybar - 0.5) < 0.005);

  Dataset ones = simulate_dataset({10.0, 0.0}, 2000, rng);
  double rate = 0;
  for (double y : ones.y) rate += y;
  CHECK(rate / 2000.0 > 0.99);

  // x marginal is N(1,1)
  double xbar = 0, xvar = 0;
  for (double x : half.x) xbar += x;
  xbar /= double(half.n());
  for (double x : half.x) xvar += (x - xbar) * (x - xbar);
  xvar /= double(half.n() - 1);
  CHECK(std::fabs(xbar - 1.0) < 0.02);
  CHECK(std::fabs(xvar - 1.0) < 0.03);

  // response rate against the quadrature oracle
  Dataset mix = simulate_dataset({0.1, 0.2}, 100000, rng);
  double got = 0;
  for (double y : mix.y) got += y;
  got /= double(mix.n());
  double want = oracle::expected_bernoulli_rate(0.1, 0.2, 1.0, 1.0);
  CHECK(std::fabs(got - want) < 0.005);
}

TEST_CASE("dataset csv round trip and error reporting") {
  TempDir tmp("mcglm_csv_test");

  {
    std::ofstream out(tmp.file("ok.csv"));
    out << "x,y\r\n9,1\r\n14,0\r\n";
  }
  Dataset d = load_csv_dataset(tmp.file("ok.csv"));
  REQUIRE(d.n() == 2);
  CHECK(d.x[0] == 9.0);
  CHECK(d.y[1] == 0.0);

  // column order is free as long as both names appear
  {
    std::ofstream out(tmp.file("swapped.csv"));
    out << "y,x\n1,9\n0,14\n";
  }
  Dataset s = load_csv_dataset(tmp.file("swapped.csv"));
  CHECK(s.x[0] == 9.0);
  CHECK(s.y[0] == 1.0);

  {
    std::ofstream out(tmp.file("bady.csv"));
    out << "x,y\n1,0\n2,1\n3,2\n";
  }
  try {
    load_csv_dataset(tmp.file("bady.csv"));
    FAIL("expected NonBinaryResponse");
  } catch (const NonBinaryResponse& e) {
    CHECK(e.row == 3);
  }

  {
    std::ofstream out(tmp.file("badx.csv"));
    out << "x,y\nfoo,0\n";
  }
  try {
    load_csv_dataset(tmp.file("badx.csv"));
    FAIL("expected NonNumericValue");
  } catch (const NonNumericValue& e) {
    CHECK(e.row == 1);
  }

  {
    std::ofstream out(tmp.file("nohdr.csv"));
    out << "a,b\n1,0\n";
  }
  CHECK_THROWS_AS(load_csv_dataset(tmp.file("nohdr.csv")), MissingColumn);

  {
    std::ofstream out(tmp.file("empty.csv"));
  }
  CHECK_THROWS_AS(load_csv_dataset(tmp.file("empty.csv")), EmptyFile);

  // write-then-load reproduces every value bit for bit
  RngStream rng(409);
  Dataset sim = simulate_dataset({0.6, 0.3}, 500, rng);
  save_csv_dataset(sim, tmp.file("sim.csv"));
  Dataset back = load_csv_dataset(tmp.file("sim.csv"));
  REQUIRE(back.n() == sim.n());
  for (std::size_t i = 0; i < sim.n(); ++i) {
    CHECK(back.x[i] == sim.x[i]);
    CHECK(back.y[i] == sim.y[i]);
  }
}

TEST_CASE("trace csv round trip") {
  TempDir tmp("mcglm_trace_test");
  RngStream rng(419);
  Dataset d = simulate_dataset({0.5, 0.5}, 100, rng);
  PriorSpec p;
  ProposalSpec prop;
  RngStream chain_rng(421);
  ChainTrace tr = run_chain(ProposalKind::IndependentDiag, {0, 0}, 200, 50, d,
                            p, prop, chain_rng);
  write_trace_csv(tr, tmp.file("trace.csv"));
  ChainTrace back = read_trace_csv(tmp.file("trace.csv"));
  REQUIRE(back.length() == tr.length());
  for (std::size_t t = 0; t < tr.length(); ++t) {
    CHECK(back.draws[t].beta0 == tr.draws[t].beta0);
    CHECK(back.draws[t].beta1 == tr.draws[t].beta1);
    CHECK(back.accepted[t] == tr.accepted[t]);
    CHECK(back.logpost[t] == tr.logpost[t]);
  }
}

TEST_CASE("format_double round trips and stays short") {
  CHECK(format_double(0.5) == "0.5");
  CHECK(format_double(1.0) == "1");
  CHECK(format_double(-0.1) == "-0.1");
  RngStream rng(431);
  for (int i = 0; i < 500; ++i) {
    double v = (rng.uniform() - 0.5) * std::pow(10.0, int(rng.uniform() * 12) - 6);
    CHECK(std::strtod(format_double(v).c_str(), nullptr) == v);
  }
}

TEST_CASE("config parsing, defaults and validation") {
  ExperimentConfig def = ExperimentConfig::from_json_text("{}");
  CHECK(def.scenarios.size() == 5);
  CHECK(def.n == 1000);
  CHECK(def.replications == 100);
  CHECK(def.chain_length == 5000);
  CHECK(def.methods.size() == 5);

  ExperimentConfig c = ExperimentConfig::from_json_text(
      R"({"n": 50, "replications": 3, "chain_length": 400, "burn_in": 100,
          "methods": ["MLE", "samc"], "scenarios": [[0.5, -0.5]],
          "master_seed": 7, "samc_regions": 5, "samc_width": 30.0})");
  CHECK(c.n == 50);
  CHECK(c.methods[1] == Method::Samc);
  CHECK(c.scenarios[0].beta1 == -0.5);

  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"bogus_key": 1})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"methods": []})"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      ExperimentConfig::from_json_text(R"({"chain_length": 100, "burn_in": 100})"),
      std::invalid_argument);
  CHECK_THROWS_AS(ExperimentConfig::from_json_text(R"({"methods": ["nope"]})"),
                  std::invalid_argument);
}

TEST_CASE("run_experiment: determinism, seed isolation, failure accounting") {
  ExperimentConfig cfg;
  cfg.scenarios = {{0.6, 0.3}};
  cfg.n = 120;
  cfg.replications = 4;
  cfg.chain_length = 300;
  cfg.burn_in = 100;
  cfg.methods = {Method::Mle, Method::Independent};
  cfg.master_seed = 5150;
  cfg.threads = 2;

  ExperimentResult a = run_experiment(cfg);
  ExperimentResult b = run_experiment(cfg);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].summary.mean.beta0 == b.rows[i].summary.mean.beta0);
    CHECK(a.rows[i].summary.variance[1] == b.rows[i].summary.variance[1]);
    CHECK(a.rows[i].summary.count == b.rows[i].summary.count);
  }

  // single-threaded execution gives the same reduce
  ExperimentConfig serial = cfg;
  serial.threads = 1;
  ExperimentResult c = run_experiment(serial);
  for (std::size_t i = 0; i < a.rows.size(); ++i) {
    CHECK(a.rows[i].summary.mean.beta1 == c.rows[i].summary.mean.beta1);
  }

  // changing one replication's data cannot come from shared streams:
  // per-cell estimates for other replications stay identical when the
  // replication count grows
  ExperimentConfig more = cfg;
  more.replications = 6;
  ExperimentResult grown = run_experiment(more);
  for (std::size_t cell = 0; cell < 4 * cfg.methods.size(); ++cell) {
    CHECK(grown.manifest.cells[cell].estimate.beta0 ==
          a.manifest.cells[cell].estimate.beta0);
    CHECK(grown.manifest.cells[cell].stream == a.manifest.cells[cell].stream);
  }

  // a two-point dataset cannot be fit: failures are counted, not fatal
  ExperimentConfig failing;
  failing.scenarios = {{8.0, 8.0}};  // saturated responses, separation likely
  failing.n = 6;
  failing.replications = 6;
  failing.chain_length = 200;
  failing.burn_in = 50;
  failing.methods = {Method::Mle};
  failing.master_seed = 99;
  ExperimentResult f = run_experiment(failing);
  REQUIRE(f.rows.size() == 1);
  std::size_t recorded = f.rows[0].summary.count + f.rows[0].n_failed;
  CHECK(recorded == 6);
  CHECK(f.rows[0].n_failed > 0);
  for (const auto& cell : f.manifest.cells) {
    if (!cell.ok) CHECK_FALSE(cell.error.empty());
  }
}

TEST_CASE("experiment outputs are byte-identical across reruns") {
  TempDir tmp1("mcglm_exp_a");
  TempDir tmp2("mcglm_exp_b");
  ExperimentConfig cfg;
  cfg.scenarios = {{0.1, 0.2}, {1.0, -3.0}};
  cfg.n = 80;
  cfg.replications = 3;
  cfg.chain_length = 250;
  cfg.burn_in = 50;
  cfg.methods = {Method::Mle, Method::Samc, Method::Dependent};
  cfg.samc_regions = 7;
  cfg.samc_width = 30.0;
  cfg.master_seed = 31337;
  cfg.threads = 2;

  run_experiment_to_dir(cfg, tmp1.path.string());
  run_experiment_to_dir(cfg, tmp2.path.string());
  std::string s1 = slurp(tmp1.file("summary.csv"));
  std::string s2 = slurp(tmp2.file("summary.csv"));
  CHECK(!s1.empty());
  CHECK(s1 == s2);

  // summary layout: SAMC contributes its companion plain-mean row
  std::size_t rows = std::count(s1.begin(), s1.end(), '\n');
  CHECK(rows == 1 + 2 * 4);  // header + 2 scenarios x (3 methods + SAMC_plain)
  CHECK(s1.find("SAMC_plain") != std::string::npos);

  // manifest echoes the config and records one entry per run
  std::string mf = slurp(tmp1.file("manifest.json"));
  CHECK(mf.find("\"master_seed\": 31337") != std::string::npos);
  CHECK(std::count(mf.begin(), mf.end(), '{') > 10);
}

TEST_CASE("wais surrogate matches its frozen fit") {
  Dataset d = oracle::wais_surrogate();
  REQUIRE(d.n() == 54);
  MleResult fit = irls_fit(d, 1e-10, 200);
  CHECK(fit.beta_hat.beta0 == doctest::Approx(2.400969).epsilon(1e-5));
  CHECK(fit.beta_hat.beta1 == doctest::Approx(-0.323685).epsilon(1e-5));

  // replication leaves the fit untouched and sharpens the information
  Dataset d10 = oracle::wais_surrogate(10);
  MleResult fit10 = irls_fit(d10, 1e-10, 200);
  CHECK(fit10.beta_hat.beta0 == doctest::Approx(fit.beta_hat.beta0).epsilon(1e-7));
  CHECK(fit10.beta_hat.beta1 == doctest::Approx(fit.beta_hat.beta1).epsilon(1e-7));
  CHECK(fit10.covariance.a00 == doctest::Approx(fit.covariance.a00 / 10).epsilon(1e-6));

  // the posterior the samplers see is strongly anti-correlated
  double corr = fit.covariance.a01 /
                std::sqrt(fit.covariance.a00 * fit.covariance.a11);
  CHECK(corr < -0.9);
}
