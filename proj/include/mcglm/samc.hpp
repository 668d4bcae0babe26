#pragma once

#include <cstdint>
#include <vector>

#include "mcglm/mh.hpp"
#include "mcglm/model.hpp"

namespace mcglm {

//! Gain factor schedule gamma_t = t0 / max(t0, t). The sequence sums to
//! infinity while its zeta-power sums finitely for zeta in (1, 2]; zeta
//! is recorded for documentation and not used computationally.
struct GainSchedule {
  double t0 = 1000.0;
  double zeta = 1.5;

  void validate() const;
};

double gain(std::size_t t, const GainSchedule& sched);

//! Energy bands over U = -log target density. boundaries holds the m-1
//! increasing cut points u_1 < ... < u_{m-1}; band i (0-based) is
//! (u_i, u_{i+1}] with the first band open below and the last open above,
//! so every finite energy maps to exactly one band.
struct EnergyPartition {
  std::vector<double> boundaries;
  double u_min = 0.0;  // pilot-optimum energy the bands were anchored at

  std::size_t regions() const { return boundaries.size() + 1; }
  void validate() const;
};

//! Thrown when the energy of a state is not finite.
struct NonFiniteEnergy : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Thrown by samc_estimate when the importance weights carry fewer than
//! ten effective draws, the symptom of a partition spanning far more
//! energy than the posterior occupies.
struct DegenerateWeights : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Band lookup for a raw energy value (0-based index, total on finite U).
std::size_t band_index(double energy, const EnergyPartition& part);

//! Band of a parameter point under the logistic posterior energy.
std::size_t region_index(const ParamVector& b, const EnergyPartition& part,
                         const Dataset& d, const PriorSpec& p);

//! m equal-width bands on [U_min, U_min + width], U_min taken at the
//! IRLS pilot optimum; the last band is open-ended. Requires m >= 2.
EnergyPartition make_partition(const Dataset& d, const PriorSpec& p,
                               std::size_t m, double width);

//! Mutable sampler state: log-weights theta, the proposed-region set,
//! desired sampling distribution pi, and the walker itself.
struct SamcState {
  std::vector<double> theta;
  std::vector<std::uint8_t> visited;
  std::vector<double> pi;
  GainSchedule schedule;
  std::size_t t = 0;
  ParamVector current;
  double current_logdens = 0.0;
  std::size_t current_region = 0;
  long clip_events = 0;

  std::size_t visited_count() const;
};

//! Fresh state at init with theta = 0 and nothing visited yet.
SamcState samc_init(const ParamVector& init, const EnergyPartition& part,
                    const GainSchedule& sched, const std::vector<double>& pi,
                    const TargetModel& target);

//! One SAMC iteration: propose from N(current, I), accept with the
//! theta-weighted ratio, then update theta over the proposed-region set.
SamcState samc_step_on(const SamcState& state, const EnergyPartition& part,
                       const TargetModel& target, RngStream& rng);

//! Same, bound to the logistic posterior.
SamcState samc_step(const SamcState& state, const EnergyPartition& part,
                    const Dataset& d, const PriorSpec& p, RngStream& rng);

struct SamcRun {
  ChainTrace trace;
  std::vector<std::size_t> region;          // band of each draw
  std::vector<std::vector<double>> theta_trace;  // theta after each iteration
  std::vector<double> theta_final;
  long clip_events = 0;
};

//! T iterations from a fresh state, recording draws, regions and theta
//! snapshots. pi empty means uniform. Requires T > burn_in.
SamcRun samc_run_on(const ParamVector& init, std::size_t T, std::size_t burn_in,
                    const EnergyPartition& part, const GainSchedule& sched,
                    const std::vector<double>& pi, const TargetModel& target,
                    RngStream& rng);

SamcRun samc_run(const ParamVector& init, std::size_t T, std::size_t burn_in,
                 const EnergyPartition& part, const GainSchedule& sched,
                 const std::vector<double>& pi, const Dataset& d,
                 const PriorSpec& p, RngStream& rng);

//! Point estimate from a SAMC run. The sampled density within band i is
//! proportional to target / e^{theta_i}, so weighting draw t by
//! e^{theta_final[region_t]} recovers posterior expectations. The plain
//! (unweighted) mean and variance are kept alongside for comparison.
struct SamcEstimate {
  ParamVector mean;
  Vec2 variance;
  ParamVector plain_mean;
  Vec2 plain_variance;
  double effective_sample_size = 0.0;
};

SamcEstimate samc_estimate(const ChainTrace& trace,
                           const std::vector<std::size_t>& region,
                           const std::vector<double>& theta_final,
                           std::size_t burn_in);

//! Uniform desired sampling distribution over m regions.
std::vector<double> uniform_pi(std::size_t m);

}  // namespace mcglm
