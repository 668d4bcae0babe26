#include "mcglm/samc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace mcglm {

namespace {
constexpr double kThetaClip = 1e10;

void validate_pi(const std::vector<double>& pi, std::size_t m) {
  if (pi.size() != m) {
    throw std::invalid_argument("samc: pi length must match region count");
  }
  double total = 0.0;
  for (double v : pi) {
    if (!(v > 0.0 && v < 1.0) && !(m == 1 && v == 1.0)) {
      throw std::invalid_argument("samc: pi components must lie in (0,1)");
    }
    total += v;
  }
  if (std::fabs(total - 1.0) > 1e-9) {
    throw std::invalid_argument("samc: pi must sum to 1");
  }
}
}  // namespace

void GainSchedule::validate() const {
  if (!(t0 > 1.0)) {
    throw std::invalid_argument("gain schedule: t0 must exceed 1");
  }
  if (!(zeta > 1.0 && zeta <= 2.0)) {
    throw std::invalid_argument("gain schedule: zeta must lie in (1,2]");
  }
}

double gain(std::size_t t, const GainSchedule& sched) {
  if (t == 0) {
    throw std::invalid_argument("gain: iteration index starts at 1");
  }
  return sched.t0 / std::max(sched.t0, static_cast<double>(t));
}

void EnergyPartition::validate() const {
  for (std::size_t i = 1; i < boundaries.size(); ++i) {
    if (!(boundaries[i - 1] < boundaries[i])) {
      throw std::invalid_argument("partition: boundaries must be increasing");
    }
  }
}

std::size_t band_index(double energy, const EnergyPartition& part) {
  if (!std::isfinite(energy)) {
    throw NonFiniteEnergy("band_index: energy is not finite");
  }
  // Bands are (u_{i-1}, u_i]; ties land in the lower band.
  auto it = std::lower_bound(part.boundaries.begin(), part.boundaries.end(),
                             energy);
  return static_cast<std::size_t>(it - part.boundaries.begin());
}

std::size_t region_index(const ParamVector& b, const EnergyPartition& part,
                         const Dataset& d, const PriorSpec& p) {
  return band_index(-log_posterior(d, b, p), part);
}

EnergyPartition make_partition(const Dataset& d, const PriorSpec& p,
                               std::size_t m, double width) {
  if (m < 2) {
    throw std::invalid_argument("make_partition: need at least two regions");
  }
  if (!(width > 0.0)) {
    throw std::invalid_argument("make_partition: width must be positive");
  }
  MleResult pilot = irls_fit(d);  // NonConvergence propagates to the caller
  double u_min = -log_posterior(d, pilot.beta_hat, p);
  EnergyPartition part;
  part.u_min = u_min;
  part.boundaries.resize(m - 1);
  double step = width / static_cast<double>(m - 1);
  for (std::size_t k = 1; k < m; ++k) {
    part.boundaries[k - 1] = u_min + static_cast<double>(k) * step;
  }
  return part;
}

std::size_t SamcState::visited_count() const {
  return static_cast<std::size_t>(
      std::count(visited.begin(), visited.end(), std::uint8_t{1}));
}

std::vector<double> uniform_pi(std::size_t m) {
  return std::vector<double>(m, 1.0 / static_cast<double>(m));
}

SamcState samc_init(const ParamVector& init, const EnergyPartition& part,
                    const GainSchedule& sched, const std::vector<double>& pi,
                    const TargetModel& target) {
  part.validate();
  sched.validate();
  const std::size_t m = part.regions();
  SamcState s;
  s.pi = pi.empty() ? uniform_pi(m) : pi;
  validate_pi(s.pi, m);
  s.theta.assign(m, 0.0);
  s.visited.assign(m, 0);
  s.schedule = sched;
  s.current = init;
  s.current_logdens = target.logdens(init);
  s.current_region = band_index(-s.current_logdens, part);
  return s;
}

namespace {
void samc_step_inplace(SamcState& s, const EnergyPartition& part,
                       const TargetModel& target, RngStream& rng) {
  // (1) propose from N(current, I); the proposed band joins the visited
  // set whether or not the move is accepted. A proposal with zero target
  // density lies outside the sample space: it gets no band and is
  // rejected outright (the uniform is still consumed to keep the stream
  // position aligned).
  auto [z0, z1] = rng.normal_pair();
  ParamVector cand{s.current.beta0 + z0, s.current.beta1 + z1};
  double cand_logdens = target.logdens(cand);
  double log_ratio = -std::numeric_limits<double>::infinity();
  std::size_t cand_region = s.current_region;
  if (cand_logdens != -std::numeric_limits<double>::infinity()) {
    cand_region = band_index(-cand_logdens, part);
    s.visited[cand_region] = 1;
    // (2) theta-weighted acceptance; the symmetric proposal cancels
    log_ratio = (s.theta[s.current_region] - s.theta[cand_region]) +
                (cand_logdens - s.current_logdens);
  }
  if (mh_accept(log_ratio, rng)) {
    s.current = cand;
    s.current_logdens = cand_logdens;
    s.current_region = cand_region;
  }

  // (3) log-weight update over the visited set, clipped to the compact box
  double g = gain(s.t + 1, s.schedule);
  for (std::size_t i = 0; i < s.theta.size(); ++i) {
    if (!s.visited[i]) {
      continue;
    }
    double e = (i == s.current_region) ? 1.0 : 0.0;
    double next = s.theta[i] + g * (e - s.pi[i]);
    if (next > kThetaClip) {
      next = kThetaClip;
      ++s.clip_events;
    } else if (next < -kThetaClip) {
      next = -kThetaClip;
      ++s.clip_events;
    }
    s.theta[i] = next;
  }
  ++s.t;
}
}  // namespace

SamcState samc_step_on(const SamcState& state, const EnergyPartition& part,
                       const TargetModel& target, RngStream& rng) {
  SamcState next = state;
  samc_step_inplace(next, part, target, rng);
  return next;
}

SamcState samc_step(const SamcState& state, const EnergyPartition& part,
                    const Dataset& d, const PriorSpec& p, RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return samc_step_on(state, part, target, rng);
}

SamcRun samc_run_on(const ParamVector& init, std::size_t T, std::size_t burn_in,
                    const EnergyPartition& part, const GainSchedule& sched,
                    const std::vector<double>& pi, const TargetModel& target,
                    RngStream& rng) {
  if (T == 0 || burn_in >= T) {
    throw std::invalid_argument("samc_run: need T > burn_in >= 0");
  }
  SamcState s = samc_init(init, part, sched, pi, target);

  SamcRun run;
  run.trace.seed = rng.seed();
  run.trace.burn_in = burn_in;
  run.trace.draws.reserve(T);
  run.trace.accepted.reserve(T);
  run.trace.logpost.reserve(T);
  run.region.reserve(T);
  run.theta_trace.reserve(T);

  for (std::size_t t = 1; t <= T; ++t) {
    ParamVector before = s.current;
    samc_step_inplace(s, part, target, rng);
    bool moved = s.current.beta0 != before.beta0 || s.current.beta1 != before.beta1;
    run.trace.draws.push_back(s.current);
    run.trace.accepted.push_back(moved ? 1 : 0);
    run.trace.logpost.push_back(s.current_logdens);
    run.region.push_back(s.current_region);
    run.theta_trace.push_back(s.theta);
  }
  run.theta_final = s.theta;
  run.clip_events = s.clip_events;
  return run;
}

SamcRun samc_run(const ParamVector& init, std::size_t T, std::size_t burn_in,
                 const EnergyPartition& part, const GainSchedule& sched,
                 const std::vector<double>& pi, const Dataset& d,
                 const PriorSpec& p, RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return samc_run_on(init, T, burn_in, part, sched, pi, target, rng);
}

SamcEstimate samc_estimate(const ChainTrace& trace,
                           const std::vector<std::size_t>& region,
                           const std::vector<double>& theta_final,
                           std::size_t burn_in) {
  const std::size_t T = trace.length();
  if (region.size() != T) {
    throw std::invalid_argument("samc_estimate: region sequence length mismatch");
  }
  if (burn_in >= T) {
    throw std::invalid_argument("samc_estimate: nothing after burn-in");
  }

  // Self-normalized weights, largest log-weight subtracted first.
  double max_log_w = -std::numeric_limits<double>::infinity();
  for (std::size_t t = burn_in; t < T; ++t) {
    max_log_w = std::max(max_log_w, theta_final.at(region[t]));
  }
  double wsum = 0.0, wsq = 0.0;
  double m0 = 0.0, m1 = 0.0, p0 = 0.0, p1 = 0.0;
  const double count = static_cast<double>(T - burn_in);
  for (std::size_t t = burn_in; t < T; ++t) {
    double w = std::exp(theta_final[region[t]] - max_log_w);
    wsum += w;
    wsq += w * w;
    m0 += w * trace.draws[t].beta0;
    m1 += w * trace.draws[t].beta1;
    p0 += trace.draws[t].beta0;
    p1 += trace.draws[t].beta1;
  }
  double ess = wsum * wsum / wsq;
  if (ess < 10.0) {
    throw DegenerateWeights(
        "samc_estimate: effective sample size of weights below 10");
  }

  SamcEstimate est;
  est.effective_sample_size = ess;
  est.mean = {m0 / wsum, m1 / wsum};
  est.plain_mean = {p0 / count, p1 / count};

  double v0 = 0.0, v1 = 0.0, q0 = 0.0, q1 = 0.0;
  for (std::size_t t = burn_in; t < T; ++t) {
    double w = std::exp(theta_final[region[t]] - max_log_w);
    double d0 = trace.draws[t].beta0 - est.mean.beta0;
    double d1 = trace.draws[t].beta1 - est.mean.beta1;
    v0 += w * d0 * d0;
    v1 += w * d1 * d1;
    d0 = trace.draws[t].beta0 - est.plain_mean.beta0;
    d1 = trace.draws[t].beta1 - est.plain_mean.beta1;
    q0 += d0 * d0;
    q1 += d1 * d1;
  }
  est.variance = {v0 / wsum, v1 / wsum};
  est.plain_variance = {q0 / count, q1 / count};
  return est;
}

}  // namespace mcglm
