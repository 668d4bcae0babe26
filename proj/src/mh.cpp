#include "mcglm/mh.hpp"

#include <cmath>
#include <stdexcept>

namespace mcglm {

namespace {
constexpr std::size_t kAdaptBatch = 50;

// Proposal covariance context for the Fisher-scaled kernel; reused while
// the chain stays put so curvature is computed once per fresh state.
struct FisherCtx {
  Matrix2 cov;
  Matrix2 chol;
};

FisherCtx make_fisher_ctx(const TargetModel& target, const ParamVector& b,
                          double c_beta) {
  Matrix2 cov = inverse_spd(target.curvature(b)).scaled(c_beta * c_beta);
  return {cov, cholesky_factor(cov)};
}

StepResult fisher_step(const TargetModel& target, const ParamVector& b,
                       double logpost_b, const FisherCtx& ctx,
                       double c_beta, RngStream& rng, FisherCtx* accepted_ctx) {
  Vec2 cand = mvn_sample(b.to_vec(), ctx.chol, rng);
  ParamVector bp = ParamVector::from_vec(cand);
  Matrix2 cov_p = inverse_spd(target.curvature(bp)).scaled(c_beta * c_beta);
  double logpost_p = target.logdens(bp);
  double q_forward = mvn_logpdf(cand, b.to_vec(), ctx.cov);
  double q_reverse = mvn_logpdf(b.to_vec(), cand, cov_p);
  double log_ratio = (logpost_p - logpost_b) + (q_reverse - q_forward);
  if (mh_accept(log_ratio, rng)) {
    if (accepted_ctx != nullptr) {
      *accepted_ctx = {cov_p, cholesky_factor(cov_p)};
    }
    return {bp, logpost_p, true, false};
  }
  return {b, logpost_b, false, false};
}
}  // namespace

void ProposalSpec::validate() const {
  if (!(step_sd[0] > 0.0) || !(step_sd[1] > 0.0)) {
    throw std::invalid_argument("proposal: step_sd components must be positive");
  }
  if (!(c_beta > 0.0)) {
    throw std::invalid_argument("proposal: c_beta must be positive");
  }
  if (!(target_accept > 0.0 && target_accept < 1.0)) {
    throw std::invalid_argument("proposal: target_accept must lie in (0,1)");
  }
}

TargetModel posterior_target(const Dataset& d, const PriorSpec& p) {
  // Captures by reference: the dataset and prior must outlive the target.
  return {[&d, &p](const ParamVector& b) { return log_posterior(d, b, p); },
          [&d, &p](const ParamVector& b) { return fisher_information(d, b, p); }};
}

bool mh_accept(double log_ratio, RngStream& rng) {
  double u = rng.uniform();
  return std::log(u) < log_ratio;
}

StepResult step_independent_on(const TargetModel& target, const ParamVector& b,
                               double logpost_b, const ProposalSpec& prop,
                               RngStream& rng) {
  auto [z0, z1] = rng.normal_pair();
  ParamVector bp{b.beta0 + prop.step_sd[0] * z0, b.beta1 + prop.step_sd[1] * z1};
  double logpost_p = target.logdens(bp);
  if (mh_accept(logpost_p - logpost_b, rng)) {
    return {bp, logpost_p, true, false};
  }
  return {b, logpost_b, false, false};
}

StepResult step_dependent_on(const TargetModel& target, const ParamVector& b,
                             double logpost_b, const ProposalSpec& prop,
                             RngStream& rng) {
  FisherCtx ctx = make_fisher_ctx(target, b, prop.c_beta);
  return fisher_step(target, b, logpost_b, ctx, prop.c_beta, rng, nullptr);
}

StepResult step_individual_on(const TargetModel& target, const ParamVector& b,
                              double logpost_b, const ProposalSpec& prop,
                              RngStream& rng) {
  StepResult r{b, logpost_b, false, false};

  ParamVector cand{b.beta0 + prop.step_sd[0] * rng.normal(), b.beta1};
  double logpost_c = target.logdens(cand);
  if (mh_accept(logpost_c - r.logpost, rng)) {
    r.state = cand;
    r.logpost = logpost_c;
    r.accepted = true;
  }

  cand = {r.state.beta0, r.state.beta1 + prop.step_sd[1] * rng.normal()};
  logpost_c = target.logdens(cand);
  if (mh_accept(logpost_c - r.logpost, rng)) {
    r.state = cand;
    r.logpost = logpost_c;
    r.accepted_second = true;
  }
  return r;
}

StepResult step_independent(const ParamVector& b, const Dataset& d,
                            const PriorSpec& p, const ProposalSpec& prop,
                            RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return step_independent_on(target, b, target.logdens(b), prop, rng);
}

StepResult step_dependent(const ParamVector& b, const Dataset& d,
                          const PriorSpec& p, const ProposalSpec& prop,
                          RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return step_dependent_on(target, b, target.logdens(b), prop, rng);
}

StepResult step_individual(const ParamVector& b, const Dataset& d,
                           const PriorSpec& p, const ProposalSpec& prop,
                           RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return step_individual_on(target, b, target.logdens(b), prop, rng);
}

ProposalSpec adapt_scale(const ProposalSpec& prop, double recent_accept_rate) {
  double factor = std::exp(recent_accept_rate - prop.target_accept);
  ProposalSpec out = prop;
  if (prop.kind == ProposalKind::FisherScaled) {
    out.c_beta *= factor;
  } else {
    out.step_sd[0] *= factor;
    out.step_sd[1] *= factor;
  }
  return out;
}

ChainTrace run_chain_on(ProposalKind kind, const ParamVector& init,
                        std::size_t T, std::size_t burn_in,
                        const TargetModel& target, const ProposalSpec& prop,
                        RngStream& rng) {
  prop.validate();
  if (T == 0 || burn_in >= T) {
    throw std::invalid_argument("run_chain: need T > burn_in >= 0");
  }

  ChainTrace trace;
  trace.seed = rng.seed();
  trace.burn_in = burn_in;
  trace.draws.reserve(T);
  trace.accepted.reserve(T);
  trace.logpost.reserve(T);
  const bool componentwise = kind == ProposalKind::Componentwise;
  if (componentwise) {
    trace.accepted0.reserve(T);
    trace.accepted1.reserve(T);
  }

  ProposalSpec cur = prop;
  cur.kind = kind;
  ParamVector state = init;
  double logpost = target.logdens(state);
  FisherCtx ctx;
  if (kind == ProposalKind::FisherScaled) {
    ctx = make_fisher_ctx(target, state, cur.c_beta);
  }

  double batch_flags = 0.0;
  double batch_total = 0.0;
  std::size_t batch_iters = 0;

  for (std::size_t t = 1; t <= T; ++t) {
    StepResult r;
    switch (kind) {
      case ProposalKind::IndependentDiag:
        r = step_independent_on(target, state, logpost, cur, rng);
        break;
      case ProposalKind::FisherScaled: {
        FisherCtx next_ctx;
        r = fisher_step(target, state, logpost, ctx, cur.c_beta, rng, &next_ctx);
        if (r.accepted) {
          ctx = next_ctx;
        }
        break;
      }
      case ProposalKind::Componentwise:
        r = step_individual_on(target, state, logpost, cur, rng);
        break;
    }

    state = r.state;
    logpost = r.logpost;
    trace.draws.push_back(state);
    trace.logpost.push_back(logpost);
    if (componentwise) {
      trace.accepted0.push_back(r.accepted ? 1 : 0);
      trace.accepted1.push_back(r.accepted_second ? 1 : 0);
      trace.accepted.push_back((r.accepted || r.accepted_second) ? 1 : 0);
      batch_flags += (r.accepted ? 1.0 : 0.0) + (r.accepted_second ? 1.0 : 0.0);
      batch_total += 2.0;
    } else {
      trace.accepted.push_back(r.accepted ? 1 : 0);
      batch_flags += r.accepted ? 1.0 : 0.0;
      batch_total += 1.0;
    }

    if (cur.adapt && t <= burn_in) {
      if (++batch_iters == kAdaptBatch) {
        cur = adapt_scale(cur, batch_flags / batch_total);
        if (kind == ProposalKind::FisherScaled) {
          ctx = make_fisher_ctx(target, state, cur.c_beta);
        }
        batch_flags = 0.0;
        batch_total = 0.0;
        batch_iters = 0;
      }
    }
  }
  return trace;
}

ChainTrace run_chain(ProposalKind kind, const ParamVector& init, std::size_t T,
                     std::size_t burn_in, const Dataset& d, const PriorSpec& p,
                     const ProposalSpec& prop, RngStream& rng) {
  TargetModel target = posterior_target(d, p);
  return run_chain_on(kind, init, T, burn_in, target, prop, rng);
}

ParamVector chain_mean(const ChainTrace& trace, std::size_t from) {
  if (from >= trace.length()) {
    throw std::invalid_argument("chain_mean: empty range");
  }
  double s0 = 0.0, c0 = 0.0, s1 = 0.0, c1 = 0.0;
  for (std::size_t t = from; t < trace.length(); ++t) {
    double y = trace.draws[t].beta0 - c0;
    double tt = s0 + y;
    c0 = (tt - s0) - y;
    s0 = tt;
    y = trace.draws[t].beta1 - c1;
    tt = s1 + y;
    c1 = (tt - s1) - y;
    s1 = tt;
  }
  double count = static_cast<double>(trace.length() - from);
  return {s0 / count, s1 / count};
}

}  // namespace mcglm
