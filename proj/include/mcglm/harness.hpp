#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mcglm/diagnostics.hpp"
#include "mcglm/samc.hpp"

namespace mcglm {

enum class Method { Independent, Dependent, Individual, Samc, Mle };

std::string method_name(Method m);
Method parse_method(const std::string& name);

//! Everything one experiment sweep needs; every field has a default so
//! an empty config document is runnable.
struct ExperimentConfig {
  std::vector<ParamVector> scenarios = {
      {0.1, 0.2}, {0.6, 0.3}, {1.0, -3.0}, {2.0, 0.4}, {-3.0, 2.0}};
  std::size_t n = 1000;
  std::size_t replications = 100;
  std::size_t chain_length = 5000;
  std::size_t burn_in = 1500;
  std::vector<Method> methods = {Method::Independent, Method::Dependent,
                                 Method::Individual, Method::Samc, Method::Mle};
  Vec2 prior_mu = {0.0, 0.0};
  Vec2 prior_var = {100.0, 100.0};
  Vec2 step_sd = {0.1, 0.1};
  double c_beta = 1.0;
  double target_accept = 0.35;
  bool adapt = true;
  bool init_at_irls = false;
  std::size_t samc_regions = 41;
  double samc_width = 200.0;
  double samc_t0 = 1000.0;
  std::vector<double> samc_pi;  // empty = uniform
  std::uint64_t master_seed = 20240817;
  std::size_t threads = 0;  // 0 = hardware concurrency
  bool write_traces = false;

  PriorSpec prior() const;
  ProposalSpec proposal(Method m) const;
  void validate() const;

  //! Parse a flat JSON object; unknown keys are rejected.
  static ExperimentConfig from_json_text(const std::string& text);
  std::string to_json_text() const;
};

//! One method on one simulated replication.
struct CellOutcome {
  std::size_t scenario = 0;
  std::size_t replication = 0;
  Method method = Method::Mle;
  std::uint64_t stream = 0;
  bool ok = false;
  std::string error;
  ParamVector estimate;
  std::optional<ParamVector> samc_plain;  // unweighted companion estimate
};

//! Aggregated row of the summary table.
struct SummaryRow {
  ParamVector scenario_beta;
  std::string method;
  ReplicationSummary summary;
  std::size_t n_failed = 0;
};

struct RunManifest {
  std::string version;
  std::string created_utc;
  std::string config_json;
  std::vector<CellOutcome> cells;
  std::vector<std::string> outputs;

  std::string to_json_text() const;
};

struct ExperimentResult {
  std::vector<SummaryRow> rows;
  RunManifest manifest;
};

//! Draw covariates from N(1, 1) and responses from Bernoulli(sigmoid(
//! beta0 + x beta1)).
Dataset simulate_dataset(const ParamVector& beta_true, std::size_t n,
                         RngStream& rng);

//! CSV ingestion errors carry the offending 1-based row number where one
//! exists.
struct CsvError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct EmptyFile : CsvError {
  using CsvError::CsvError;
};
struct MissingColumn : CsvError {
  using CsvError::CsvError;
};
struct NonNumericValue : CsvError {
  NonNumericValue(const std::string& msg, std::size_t row)
      : CsvError(msg), row(row) {}
  std::size_t row;
};
struct NonBinaryResponse : CsvError {
  NonBinaryResponse(const std::string& msg, std::size_t row)
      : CsvError(msg), row(row) {}
  std::size_t row;
};

//! Header `x,y` (either order), one observation per row, LF or CRLF.
Dataset load_csv_dataset(const std::string& path);
void save_csv_dataset(const Dataset& d, const std::string& path);

//! Trace serialization: iter,beta0,beta1,accepted,logpost with
//! region,theta_current appended for SAMC runs.
void write_trace_csv(const ChainTrace& trace, const std::string& path);
void write_samc_trace_csv(const SamcRun& run, const std::string& path);
ChainTrace read_trace_csv(const std::string& path);

//! Shortest decimal form that round-trips a double; keeps repeated runs
//! byte-identical.
std::string format_double(double v);

//! Full sweep: per (scenario, replication) simulate one dataset, run all
//! configured methods on it, then summarize per method across
//! replications. Cells run on a worker pool; aggregation order is fixed
//! by cell index so scheduling cannot change the output. Failed runs are
//! excluded from summaries and recorded in the manifest.
ExperimentResult run_experiment(const ExperimentConfig& config);

//! Write the summary table (sorted rows, fixed formatting).
void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path);

//! Convenience: run_experiment then write summary + manifest (+ traces if
//! configured) into out_dir.
ExperimentResult run_experiment_to_dir(const ExperimentConfig& config,
                                       const std::string& out_dir);

}  // namespace mcglm
