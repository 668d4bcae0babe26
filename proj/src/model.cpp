#include "mcglm/model.hpp"

#include <cmath>

namespace mcglm {

namespace {
constexpr double kDivergenceBound = 1e3;

// Likelihood-only score and information, shared by irls_fit and the
// prior-augmented public functions.
Vec2 likelihood_score(const Dataset& d, const ParamVector& b) {
  double g0 = 0.0;
  double g1 = 0.0;
  const std::size_t n = d.n();
  for (std::size_t i = 0; i < n; ++i) {
    double r = d.y[i] - sigmoid(b.beta0 + d.x[i] * b.beta1);
    g0 += r;
    g1 += d.x[i] * r;
  }
  return {g0, g1};
}

Matrix2 likelihood_information(const Dataset& d, const ParamVector& b) {
  double s = 0.0;
  double sx = 0.0;
  double sxx = 0.0;
  const std::size_t n = d.n();
  for (std::size_t i = 0; i < n; ++i) {
    double pi = sigmoid(b.beta0 + d.x[i] * b.beta1);
    double h = pi * (1.0 - pi);
    s += h;
    sx += h * d.x[i];
    sxx += h * d.x[i] * d.x[i];
  }
  return {s, sx, sx, sxx};
}
}  // namespace

void Dataset::validate() const {
  if (x.empty() || x.size() != y.size()) {
    throw std::invalid_argument("dataset: x and y must have equal length >= 1");
  }
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!std::isfinite(x[i])) {
      throw std::invalid_argument("dataset: non-finite covariate");
    }
    if (y[i] != 0.0 && y[i] != 1.0) {
      throw std::invalid_argument("dataset: response must be 0 or 1");
    }
  }
}

void PriorSpec::validate() const {
  if (!std::isfinite(mu[0]) || !std::isfinite(mu[1])) {
    throw std::invalid_argument("prior: non-finite mean");
  }
  cholesky_factor(sigma);  // throws unless symmetric positive-definite
}

double sigmoid(double z) {
  if (z >= 0.0) {
    return 1.0 / (1.0 + std::exp(-z));
  }
  double e = std::exp(z);  // underflows to 0 for very negative z, never overflows
  return e / (1.0 + e);
}

double log1pexp(double z) {
  if (z > 0.0) {
    return z + std::log1p(std::exp(-z));
  }
  return std::log1p(std::exp(z));
}

double log_likelihood(const Dataset& d, const ParamVector& b) {
  double ll = 0.0;
  const std::size_t n = d.n();
  const double b0 = b.beta0;
  const double b1 = b.beta1;
  for (std::size_t i = 0; i < n; ++i) {
    double z = b0 + d.x[i] * b1;
    ll += d.y[i] * z - log1pexp(z);
  }
  return ll;
}

double log_prior(const ParamVector& b, const PriorSpec& p) {
  Vec2 d = sub(b.to_vec(), p.mu);
  return -0.5 * dot(d, solve_spd(p.sigma, d));
}

double log_posterior(const Dataset& d, const ParamVector& b,
                     const PriorSpec& p) {
  return log_likelihood(d, b) + log_prior(b, p);
}

Vec2 score_gradient(const Dataset& d, const ParamVector& b,
                    const PriorSpec& p) {
  Vec2 g = likelihood_score(d, b);
  Vec2 pull = p.precision().mul(sub(b.to_vec(), p.mu));
  return sub(g, pull);
}

Matrix2 fisher_information(const Dataset& d, const ParamVector& b,
                           const PriorSpec& p) {
  Matrix2 h = likelihood_information(d, b);
  Matrix2 prec = p.precision();
  return {h.a00 + prec.a00, h.a01 + prec.a01, h.a10 + prec.a10,
          h.a11 + prec.a11};
}

MleResult irls_fit(const Dataset& d, double tol, std::size_t max_iter) {
  d.validate();
  if (d.n() < 2) {
    throw std::invalid_argument("irls_fit: need at least two observations");
  }
  if (!(tol > 0.0)) {
    throw std::invalid_argument("irls_fit: tolerance must be positive");
  }

  ParamVector b;
  for (std::size_t iter = 0; iter <= max_iter; ++iter) {
    Vec2 g = likelihood_score(d, b);
    double gnorm = std::sqrt(dot(g, g));
    if (gnorm <= tol) {
      // a perfectly predicted sample flattens the gradient while the
      // likelihood supremum is never attained: complete separation
      if (log_likelihood(d, b) > -1e-6) {
        throw NonConvergence(
            "irls_fit: perfect fit reached (complete separation)");
      }
      Matrix2 info = likelihood_information(d, b);
      Matrix2 cov;
      try {
        cov = inverse_spd(info);
      } catch (const NotPositiveDefinite&) {
        throw SingularInformation("irls_fit: information matrix singular at optimum");
      }
      return {b, cov, iter, true};
    }
    if (iter == max_iter) {
      break;
    }
    Matrix2 info = likelihood_information(d, b);
    Vec2 step;
    try {
      step = solve_spd(info, g);
    } catch (const NotPositiveDefinite&) {
      throw SingularInformation("irls_fit: weighted normal matrix not invertible");
    }
    b.beta0 += step[0];
    b.beta1 += step[1];
    if (b.beta0 * b.beta0 + b.beta1 * b.beta1 > kDivergenceBound * kDivergenceBound) {
      throw NonConvergence(
          "irls_fit: estimate diverged (possible complete separation)");
    }
  }
  throw NonConvergence("irls_fit: no convergence within iteration budget");
}

}  // namespace mcglm
