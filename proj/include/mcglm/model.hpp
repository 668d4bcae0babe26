#pragma once

#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mcglm/linalg.hpp"

namespace mcglm {

//! Coefficient pair of the Bernoulli-logit model: log-odds at x = 0 and
//! log-odds change per covariate unit.
struct ParamVector {
  double beta0 = 0.0;
  double beta1 = 0.0;

  Vec2 to_vec() const { return {beta0, beta1}; }
  static ParamVector from_vec(const Vec2& v) { return {v[0], v[1]}; }
};

//! Paired observations: one real covariate, one binary response.
struct Dataset {
  std::vector<double> x;
  std::vector<double> y;

  std::size_t n() const { return x.size(); }

  //! Enforces the structural invariants: equal non-zero lengths,
  //! finite covariates, responses in {0, 1}.
  void validate() const;
};

//! Bivariate normal prior on (beta0, beta1). A diagonal sigma is the
//! independent-normals case; a full covariance is allowed.
struct PriorSpec {
  Vec2 mu = {0.0, 0.0};
  Matrix2 sigma = Matrix2::diagonal(100.0, 100.0);

  static PriorSpec independent_normal(double mu0, double mu1, double var0,
                                      double var1) {
    return {{mu0, mu1}, Matrix2::diagonal(var0, var1)};
  }
  //! Wide enough that the posterior tracks the likelihood at any
  //! realistic sample size.
  static PriorSpec diffuse() {
    return {{0.0, 0.0}, Matrix2::diagonal(1e8, 1e8)};
  }

  Matrix2 precision() const { return inverse_spd(sigma); }
  void validate() const;
};

//! Maximum-likelihood fit summary.
struct MleResult {
  ParamVector beta_hat;
  Matrix2 covariance;  // inverse observed information at the optimum
  std::size_t iterations = 0;
  bool converged = false;
};

//! Newton iteration ran out of budget or the estimate diverged
//! (the usual cause of divergence is complete separation).
struct NonConvergence : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Weighted normal matrix was not invertible, e.g. constant covariate.
struct SingularInformation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! 1 / (1 + e^{-z}), overflow-safe on both tails.
double sigmoid(double z);

//! log(1 + e^z) without overflow; for z > 0 computed as z + log1p(e^{-z}).
double log1pexp(double z);

//! sum_i [ y_i (b0 + x_i b1) - log(1 + e^{b0 + x_i b1}) ]
double log_likelihood(const Dataset& d, const ParamVector& b);

//! Log-density of the prior at b, constants dropped: -(b-mu)' S^{-1} (b-mu) / 2.
double log_prior(const ParamVector& b, const PriorSpec& p);

//! Un-normalized log posterior: log_likelihood + log_prior.
double log_posterior(const Dataset& d, const ParamVector& b, const PriorSpec& p);

//! Gradient of the log posterior: X'(y - pi(b)) - S^{-1}(b - mu).
Vec2 score_gradient(const Dataset& d, const ParamVector& b, const PriorSpec& p);

//! Information matrix X' diag(h_i) X + S^{-1} with h_i = pi_i (1 - pi_i).
//! Symmetric positive-definite for any finite b under a proper prior.
Matrix2 fisher_information(const Dataset& d, const ParamVector& b,
                           const PriorSpec& p);

//! Newton-Raphson / IRLS maximum-likelihood fit (flat prior) started at
//! (0, 0). Declares divergence once the estimate norm passes 1e3, which
//! is how complete separation shows up without a dedicated test.
//! Throws NonConvergence or SingularInformation on failure.
MleResult irls_fit(const Dataset& d, double tol = 1e-8,
                   std::size_t max_iter = 100);

}  // namespace mcglm
