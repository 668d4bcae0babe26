#include "mcglm/harness.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "mcglm/version.hpp"

namespace mcglm {

using nlohmann::json;

std::string method_name(Method m) {
  switch (m) {
    case Method::Independent: return "Independent";
    case Method::Dependent: return "Dependent";
    case Method::Individual: return "Individual";
    case Method::Samc: return "SAMC";
    case Method::Mle: return "MLE";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  std::string lower;
  for (char c : name) lower.push_back(static_cast<char>(std::tolower(c)));
  if (lower == "independent") return Method::Independent;
  if (lower == "dependent") return Method::Dependent;
  if (lower == "individual") return Method::Individual;
  if (lower == "samc") return Method::Samc;
  if (lower == "mle") return Method::Mle;
  throw std::invalid_argument("unknown method: " + name);
}

PriorSpec ExperimentConfig::prior() const {
  return PriorSpec::independent_normal(prior_mu[0], prior_mu[1], prior_var[0],
                                       prior_var[1]);
}

ProposalSpec ExperimentConfig::proposal(Method m) const {
  ProposalSpec p;
  p.step_sd = step_sd;
  p.c_beta = c_beta;
  p.target_accept = target_accept;
  p.adapt = adapt;
  switch (m) {
    case Method::Independent: p.kind = ProposalKind::IndependentDiag; break;
    case Method::Dependent: p.kind = ProposalKind::FisherScaled; break;
    case Method::Individual: p.kind = ProposalKind::Componentwise; break;
    default: break;
  }
  return p;
}

void ExperimentConfig::validate() const {
  if (scenarios.empty()) throw std::invalid_argument("config: scenario list empty");
  if (methods.empty()) throw std::invalid_argument("config: method list empty");
  if (n == 0 || replications == 0 || chain_length == 0) {
    throw std::invalid_argument("config: counts must be positive");
  }
  if (burn_in >= chain_length) {
    throw std::invalid_argument("config: burn_in must be below chain_length");
  }
  if (!(prior_var[0] > 0.0 && prior_var[1] > 0.0)) {
    throw std::invalid_argument("config: prior variances must be positive");
  }
  if (samc_regions < 2) {
    throw std::invalid_argument("config: samc_regions must be at least 2");
  }
  if (!(samc_width > 0.0)) {
    throw std::invalid_argument("config: samc_width must be positive");
  }
  if (!(samc_t0 > 1.0)) {
    throw std::invalid_argument("config: samc_t0 must exceed 1");
  }
  if (!samc_pi.empty() && samc_pi.size() != samc_regions) {
    throw std::invalid_argument("config: samc_pi length must equal samc_regions");
  }
  proposal(Method::Independent).validate();
}

namespace {
json config_to_json(const ExperimentConfig& c) {
  json j;
  json scen = json::array();
  for (const auto& s : c.scenarios) scen.push_back({s.beta0, s.beta1});
  j["scenarios"] = scen;
  j["n"] = c.n;
  j["replications"] = c.replications;
  j["chain_length"] = c.chain_length;
  j["burn_in"] = c.burn_in;
  json methods = json::array();
  for (Method m : c.methods) methods.push_back(method_name(m));
  j["methods"] = methods;
  j["prior_mu"] = {c.prior_mu[0], c.prior_mu[1]};
  j["prior_var"] = {c.prior_var[0], c.prior_var[1]};
  j["step_sd"] = {c.step_sd[0], c.step_sd[1]};
  j["c_beta"] = c.c_beta;
  j["target_accept"] = c.target_accept;
  j["adapt"] = c.adapt;
  j["init_at_irls"] = c.init_at_irls;
  j["samc_regions"] = c.samc_regions;
  j["samc_width"] = c.samc_width;
  j["samc_t0"] = c.samc_t0;
  j["samc_pi"] = c.samc_pi;
  j["master_seed"] = c.master_seed;
  j["threads"] = c.threads;
  j["write_traces"] = c.write_traces;
  return j;
}

Vec2 vec2_from(const json& j, const char* key) {
  if (!j.is_array() || j.size() != 2) {
    throw std::invalid_argument(std::string("config: ") + key +
                                " must be a 2-element list");
  }
  return {j[0].get<double>(), j[1].get<double>()};
}
}  // namespace

ExperimentConfig ExperimentConfig::from_json_text(const std::string& text) {
  json j = json::parse(text);
  if (!j.is_object()) {
    throw std::invalid_argument("config: top level must be an object");
  }
  ExperimentConfig c;
  for (const auto& [key, value] : j.items()) {
    if (key == "scenarios") {
      c.scenarios.clear();
      for (const auto& s : value) {
        Vec2 v = vec2_from(s, "scenarios entry");
        c.scenarios.push_back({v[0], v[1]});
      }
    } else if (key == "n") {
      c.n = value.get<std::size_t>();
    } else if (key == "replications") {
      c.replications = value.get<std::size_t>();
    } else if (key == "chain_length") {
      c.chain_length = value.get<std::size_t>();
    } else if (key == "burn_in") {
      c.burn_in = value.get<std::size_t>();
    } else if (key == "methods") {
      c.methods.clear();
      for (const auto& m : value) c.methods.push_back(parse_method(m.get<std::string>()));
    } else if (key == "prior_mu") {
      c.prior_mu = vec2_from(value, "prior_mu");
    } else if (key == "prior_var") {
      c.prior_var = vec2_from(value, "prior_var");
    } else if (key == "step_sd") {
      c.step_sd = vec2_from(value, "step_sd");
    } else if (key == "c_beta") {
      c.c_beta = value.get<double>();
    } else if (key == "target_accept") {
      c.target_accept = value.get<double>();
    } else if (key == "adapt") {
      c.adapt = value.get<bool>();
    } else if (key == "init_at_irls") {
      c.init_at_irls = value.get<bool>();
    } else if (key == "samc_regions") {
      c.samc_regions = value.get<std::size_t>();
    } else if (key == "samc_width") {
      c.samc_width = value.get<double>();
    } else if (key == "samc_t0") {
      c.samc_t0 = value.get<double>();
    } else if (key == "samc_pi") {
      c.samc_pi = value.get<std::vector<double>>();
    } else if (key == "master_seed") {
      c.master_seed = value.get<std::uint64_t>();
    } else if (key == "threads") {
      c.threads = value.get<std::size_t>();
    } else if (key == "write_traces") {
      c.write_traces = value.get<bool>();
    } else {
      throw std::invalid_argument("config: unknown key '" + key + "'");
    }
  }
  c.validate();
  return c;
}

std::string ExperimentConfig::to_json_text() const {
  return config_to_json(*this).dump(2);
}

Dataset simulate_dataset(const ParamVector& beta_true, std::size_t n,
                         RngStream& rng) {
  if (n == 0) {
    throw std::invalid_argument("simulate_dataset: n must be positive");
  }
  Dataset d;
  d.x.reserve(n);
  d.y.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    double x = 1.0 + rng.normal();
    double pi = sigmoid(beta_true.beta0 + x * beta_true.beta1);
    d.x.push_back(x);
    d.y.push_back(rng.uniform() < pi ? 1.0 : 0.0);
  }
  return d;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  for (int prec = 1; prec <= 17; ++prec) {
    std::snprintf(buf, sizeof buf, "%.*g", prec, v);
    if (std::strtod(buf, nullptr) == v) break;
  }
  return buf;
}

namespace {
std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      fields.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur.push_back(ch);
    }
  }
  fields.push_back(cur);
  for (auto& f : fields) {
    while (!f.empty() && (f.front() == ' ' || f.front() == '\t')) f.erase(f.begin());
    while (!f.empty() && (f.back() == ' ' || f.back() == '\t')) f.pop_back();
  }
  return fields;
}

double parse_number(const std::string& field, std::size_t row) {
  double v = 0.0;
  const char* begin = field.c_str();
  const char* end = begin + field.size();
  auto [ptr, ec] = std::from_chars(begin, end, v);
  if (ec != std::errc{} || ptr != end || field.empty() || !std::isfinite(v)) {
    throw NonNumericValue("csv: non-numeric value '" + field + "' on data row " +
                              std::to_string(row),
                          row);
  }
  return v;
}
}  // namespace

Dataset load_csv_dataset(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyFile("csv: empty file " + path);
  }
  auto header = split_csv_line(line);
  std::ptrdiff_t x_col = -1, y_col = -1;
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == "x") x_col = static_cast<std::ptrdiff_t>(i);
    if (header[i] == "y") y_col = static_cast<std::ptrdiff_t>(i);
  }
  if (x_col < 0 || y_col < 0) {
    throw MissingColumn("csv: header must name columns x and y");
  }

  Dataset d;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw NonNumericValue("csv: wrong field count on data row " +
                                std::to_string(row),
                            row);
    }
    double x = parse_number(fields[static_cast<std::size_t>(x_col)], row);
    double y = parse_number(fields[static_cast<std::size_t>(y_col)], row);
    if (y != 0.0 && y != 1.0) {
      throw NonBinaryResponse("csv: response must be 0 or 1 on data row " +
                                  std::to_string(row),
                              row);
    }
    d.x.push_back(x);
    d.y.push_back(y);
  }
  if (d.x.empty()) {
    throw EmptyFile("csv: no data rows in " + path);
  }
  return d;
}

void save_csv_dataset(const Dataset& d, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CsvError("csv: cannot write " + path);
  }
  out << "x,y\n";
  for (std::size_t i = 0; i < d.n(); ++i) {
    out << format_double(d.x[i]) << ',' << format_double(d.y[i]) << '\n';
  }
}

void write_trace_csv(const ChainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CsvError("csv: cannot write " + path);
  }
  out << "iter,beta0,beta1,accepted,logpost\n";
  for (std::size_t t = 0; t < trace.length(); ++t) {
    out << (t + 1) << ',' << format_double(trace.draws[t].beta0) << ','
        << format_double(trace.draws[t].beta1) << ','
        << int(trace.accepted[t]) << ',' << format_double(trace.logpost[t])
        << '\n';
  }
}

void write_samc_trace_csv(const SamcRun& run, const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CsvError("csv: cannot write " + path);
  }
  out << "iter,beta0,beta1,accepted,logpost,region,theta_current\n";
  const ChainTrace& trace = run.trace;
  for (std::size_t t = 0; t < trace.length(); ++t) {
    out << (t + 1) << ',' << format_double(trace.draws[t].beta0) << ','
        << format_double(trace.draws[t].beta1) << ','
        << int(trace.accepted[t]) << ',' << format_double(trace.logpost[t])
        << ',' << run.region[t] << ','
        << format_double(run.theta_trace[t][run.region[t]]) << '\n';
  }
}

ChainTrace read_trace_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) {
    throw CsvError("csv: cannot open " + path);
  }
  std::string line;
  if (!std::getline(in, line)) {
    throw EmptyFile("csv: empty trace file " + path);
  }
  auto header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* need : {"iter", "beta0", "beta1", "accepted", "logpost"}) {
    if (!col.count(need)) {
      throw MissingColumn(std::string("csv: trace header missing column ") + need);
    }
  }
  ChainTrace trace;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    ++row;
    auto fields = split_csv_line(line);
    if (fields.size() != header.size()) {
      throw NonNumericValue("csv: wrong field count on data row " +
                                std::to_string(row),
                            row);
    }
    trace.draws.push_back({parse_number(fields[col["beta0"]], row),
                           parse_number(fields[col["beta1"]], row)});
    trace.accepted.push_back(parse_number(fields[col["accepted"]], row) != 0.0);
    trace.logpost.push_back(parse_number(fields[col["logpost"]], row));
  }
  if (trace.draws.empty()) {
    throw EmptyFile("csv: no data rows in " + path);
  }
  return trace;
}

namespace {
std::string utc_now() {
  std::time_t now = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

// Stream-key roles; scenario/replication/method arrive as extra parts.
constexpr std::uint64_t kRoleData = 1;
constexpr std::uint64_t kRoleMethod = 2;

struct CellJob {
  std::size_t scenario;
  std::size_t replication;
};

ParamVector mh_point_estimate(ProposalKind kind, const ParamVector& init,
                              const ExperimentConfig& cfg, const Dataset& d,
                              const PriorSpec& prior, Method method,
                              RngStream& rng, ChainTrace* trace_out) {
  ChainTrace trace = run_chain(kind, init, cfg.chain_length, cfg.burn_in, d,
                               prior, cfg.proposal(method), rng);
  ParamVector est = chain_mean(trace, cfg.burn_in);
  if (trace_out != nullptr) {
    *trace_out = std::move(trace);
  }
  return est;
}
}  // namespace

std::string RunManifest::to_json_text() const {
  json j;
  j["version"] = version;
  j["created_utc"] = created_utc;
  j["config"] = json::parse(config_json);
  j["outputs"] = outputs;
  json cells_json = json::array();
  for (const auto& c : cells) {
    json e;
    e["scenario"] = c.scenario;
    e["replication"] = c.replication;
    e["method"] = method_name(c.method);
    e["stream"] = c.stream;
    e["ok"] = c.ok;
    if (!c.ok) {
      e["error"] = c.error;
    } else {
      e["estimate"] = {c.estimate.beta0, c.estimate.beta1};
      if (c.samc_plain) {
        e["plain_estimate"] = {c.samc_plain->beta0, c.samc_plain->beta1};
      }
    }
    cells_json.push_back(e);
  }
  j["cells"] = cells_json;
  return j.dump(2);
}

namespace {
ExperimentResult run_experiment_impl(const ExperimentConfig& config,
                                     const std::string* trace_dir) {
  config.validate();
  const PriorSpec prior = config.prior();
  const std::size_t n_scen = config.scenarios.size();
  const std::size_t n_rep = config.replications;
  const std::size_t n_meth = config.methods.size();
  const std::size_t n_cells = n_scen * n_rep;

  std::vector<CellOutcome> outcomes(n_cells * n_meth);

  auto run_cell = [&](std::size_t cell) {
    const std::size_t s = cell / n_rep;
    const std::size_t r = cell % n_rep;
    RngStream data_rng(config.master_seed, mix_keys({kRoleData, s, r}));
    Dataset d = simulate_dataset(config.scenarios[s], config.n, data_rng);

    for (std::size_t mi = 0; mi < n_meth; ++mi) {
      Method method = config.methods[mi];
      CellOutcome& out = outcomes[cell * n_meth + mi];
      out.scenario = s;
      out.replication = r;
      out.method = method;
      std::uint64_t stream_key = mix_keys(
          {kRoleMethod, s, r, static_cast<std::uint64_t>(method)});
      out.stream = stream_key;
      RngStream rng(config.master_seed, stream_key);
      try {
        ParamVector init;
        if (config.init_at_irls && method != Method::Mle) {
          init = irls_fit(d).beta_hat;
        }
        switch (method) {
          case Method::Mle:
            out.estimate = irls_fit(d).beta_hat;
            break;
          case Method::Samc: {
            EnergyPartition part = make_partition(d, prior, config.samc_regions,
                                                  config.samc_width);
            GainSchedule sched{config.samc_t0, 1.5};
            SamcRun run = samc_run(init, config.chain_length, config.burn_in,
                                   part, sched, config.samc_pi, d, prior, rng);
            SamcEstimate est = samc_estimate(run.trace, run.region,
                                             run.theta_final, config.burn_in);
            out.estimate = est.mean;
            out.samc_plain = est.plain_mean;
            if (trace_dir != nullptr) {
              write_samc_trace_csv(
                  run, *trace_dir + "/trace_s" + std::to_string(s) + "_r" +
                           std::to_string(r) + "_SAMC.csv");
            }
            break;
          }
          default: {
            ChainTrace trace;
            out.estimate = mh_point_estimate(
                config.proposal(method).kind, init, config, d, prior, method,
                rng, trace_dir != nullptr ? &trace : nullptr);
            if (trace_dir != nullptr) {
              write_trace_csv(trace, *trace_dir + "/trace_s" +
                                         std::to_string(s) + "_r" +
                                         std::to_string(r) + "_" +
                                         method_name(method) + ".csv");
            }
            break;
          }
        }
        out.ok = true;
      } catch (const std::exception& e) {
        out.ok = false;
        out.error = e.what();
      }
    }
  };

  std::size_t n_threads = config.threads != 0
                              ? config.threads
                              : std::max(1u, std::thread::hardware_concurrency());
  n_threads = std::min(n_threads, n_cells);
  if (n_threads <= 1) {
    for (std::size_t cell = 0; cell < n_cells; ++cell) run_cell(cell);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(n_threads);
    for (std::size_t w = 0; w < n_threads; ++w) {
      pool.emplace_back([&] {
        for (std::size_t cell = next.fetch_add(1); cell < n_cells;
             cell = next.fetch_add(1)) {
          run_cell(cell);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  // Deterministic reduce in (scenario, configured method) order.
  ExperimentResult result;
  for (std::size_t s = 0; s < n_scen; ++s) {
    for (std::size_t mi = 0; mi < n_meth; ++mi) {
      std::vector<ParamVector> oks;
      std::vector<ParamVector> plain;
      std::size_t failed = 0;
      for (std::size_t r = 0; r < n_rep; ++r) {
        const CellOutcome& c = outcomes[(s * n_rep + r) * n_meth + mi];
        if (c.ok) {
          oks.push_back(c.estimate);
          if (c.samc_plain) plain.push_back(*c.samc_plain);
        } else {
          ++failed;
        }
      }
      auto make_row = [&](const std::string& name,
                          const std::vector<ParamVector>& est) {
        SummaryRow row;
        row.scenario_beta = config.scenarios[s];
        row.method = name;
        row.n_failed = failed;
        if (est.size() >= 2) {
          row.summary = replicate_summary(est);
        } else {
          row.summary.count = est.size();
          double nan = std::nan("");
          row.summary.mean = est.size() == 1 ? est[0] : ParamVector{nan, nan};
          row.summary.variance = {nan, nan};
        }
        return row;
      };
      result.rows.push_back(make_row(method_name(config.methods[mi]), oks));
      if (config.methods[mi] == Method::Samc && !plain.empty()) {
        result.rows.push_back(make_row("SAMC_plain", plain));
      }
    }
  }

  result.manifest.version = kVersion;
  result.manifest.created_utc = utc_now();
  result.manifest.config_json = config_to_json(config).dump();
  result.manifest.cells = std::move(outcomes);
  return result;
}
}  // namespace

ExperimentResult run_experiment(const ExperimentConfig& config) {
  return run_experiment_impl(config, nullptr);
}

void write_summary_csv(const std::vector<SummaryRow>& rows,
                       const std::string& path) {
  std::ofstream out(path);
  if (!out) {
    throw CsvError("csv: cannot write " + path);
  }
  out << "scenario_beta0,scenario_beta1,method,mean0,mean1,var0,var1,n_ok,n_failed\n";
  for (const auto& row : rows) {
    out << format_double(row.scenario_beta.beta0) << ','
        << format_double(row.scenario_beta.beta1) << ',' << row.method << ','
        << format_double(row.summary.mean.beta0) << ','
        << format_double(row.summary.mean.beta1) << ','
        << format_double(row.summary.variance[0]) << ','
        << format_double(row.summary.variance[1]) << ',' << row.summary.count
        << ',' << row.n_failed << '\n';
  }
}

ExperimentResult run_experiment_to_dir(const ExperimentConfig& config,
                                       const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  std::string trace_dir = out_dir + "/traces";
  if (config.write_traces) {
    std::filesystem::create_directories(trace_dir);
  }
  ExperimentResult result = run_experiment_impl(
      config, config.write_traces ? &trace_dir : nullptr);

  std::string summary_path = out_dir + "/summary.csv";
  write_summary_csv(result.rows, summary_path);
  result.manifest.outputs.push_back(summary_path);
  if (config.write_traces) {
    result.manifest.outputs.push_back(trace_dir);
  }
  std::string manifest_path = out_dir + "/manifest.json";
  result.manifest.outputs.push_back(manifest_path);
  std::ofstream mf(manifest_path);
  mf << result.manifest.to_json_text() << '\n';
  return result;
}

}  // namespace mcglm
