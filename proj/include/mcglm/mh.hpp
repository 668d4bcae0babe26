#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "mcglm/model.hpp"

namespace mcglm {

enum class ProposalKind { IndependentDiag, FisherScaled, Componentwise };

//! Proposal configuration for the three Metropolis-Hastings variants.
//! step_sd drives IndependentDiag and Componentwise, c_beta scales the
//! FisherScaled covariance c^2 H^{-1}.
struct ProposalSpec {
  ProposalKind kind = ProposalKind::IndependentDiag;
  Vec2 step_sd = {0.1, 0.1};
  double c_beta = 1.0;
  double target_accept = 0.35;
  bool adapt = true;  // scale adaptation during burn-in

  void validate() const;
};

//! One recorded chain. Rejected iterations repeat the previous draw
//! exactly. For the componentwise sampler, accepted0/accepted1 carry the
//! two per-iteration sub-decisions and accepted[t] is "state moved".
struct ChainTrace {
  std::vector<ParamVector> draws;
  std::vector<std::uint8_t> accepted;
  std::vector<std::uint8_t> accepted0;  // componentwise only
  std::vector<std::uint8_t> accepted1;  // componentwise only
  std::vector<double> logpost;
  std::uint64_t seed = 0;
  std::size_t burn_in = 0;

  std::size_t length() const { return draws.size(); }
};

//! Callables a kernel needs from the model: the log target everywhere,
//! and local curvature for the Fisher-scaled proposal.
struct TargetModel {
  std::function<double(const ParamVector&)> logdens;
  std::function<Matrix2(const ParamVector&)> curvature;
};

//! Wraps log_posterior / fisher_information over fixed data and prior.
TargetModel posterior_target(const Dataset& d, const PriorSpec& p);

struct StepResult {
  ParamVector state;
  double logpost = 0.0;
  bool accepted = false;
  bool accepted_second = false;  // componentwise second coordinate
};

//! True with probability min(e^{log_ratio}, 1); consumes exactly one
//! uniform draw whatever the ratio, so stream positions stay aligned.
bool mh_accept(double log_ratio, RngStream& rng);

//! Random-walk step with independent Gaussian increments per coordinate;
//! the symmetric proposal cancels in the acceptance ratio.
StepResult step_independent(const ParamVector& b, const Dataset& d,
                            const PriorSpec& p, const ProposalSpec& prop,
                            RngStream& rng);

//! Proposal N(b, c^2 H(b)^{-1}) with the full asymmetric Hastings
//! correction, since the covariance moves with the state.
StepResult step_dependent(const ParamVector& b, const Dataset& d,
                          const PriorSpec& p, const ProposalSpec& prop,
                          RngStream& rng);

//! Two sequential one-coordinate updates, each with its own
//! accept/reject decision.
StepResult step_individual(const ParamVector& b, const Dataset& d,
                           const PriorSpec& p, const ProposalSpec& prop,
                           RngStream& rng);

// Generic versions over an arbitrary target; the named steps above bind
// the logistic posterior. Tests drive these with toy targets.
StepResult step_independent_on(const TargetModel& target, const ParamVector& b,
                               double logpost_b, const ProposalSpec& prop,
                               RngStream& rng);
StepResult step_dependent_on(const TargetModel& target, const ParamVector& b,
                             double logpost_b, const ProposalSpec& prop,
                             RngStream& rng);
StepResult step_individual_on(const TargetModel& target, const ParamVector& b,
                              double logpost_b, const ProposalSpec& prop,
                              RngStream& rng);

//! Multiplicative scale update toward the target acceptance rate:
//! scale *= exp(rate - target). Meant for burn-in batches of >= 50
//! iterations; callers freeze it afterwards so the post-burn-in chain is
//! time-homogeneous.
ProposalSpec adapt_scale(const ProposalSpec& prop, double recent_accept_rate);

//! Run T steps of the selected kernel from init, recording every state.
//! Scale adaptation is active only while t <= burn_in and only when
//! prop.adapt is set. Requires T > burn_in >= 0.
ChainTrace run_chain(ProposalKind kind, const ParamVector& init, std::size_t T,
                     std::size_t burn_in, const Dataset& d, const PriorSpec& p,
                     const ProposalSpec& prop, RngStream& rng);

//! Same runner over an arbitrary target.
ChainTrace run_chain_on(ProposalKind kind, const ParamVector& init,
                        std::size_t T, std::size_t burn_in,
                        const TargetModel& target, const ProposalSpec& prop,
                        RngStream& rng);

//! Arithmetic mean of draws[from..end), compensated summation.
ParamVector chain_mean(const ChainTrace& trace, std::size_t from);

}  // namespace mcglm
