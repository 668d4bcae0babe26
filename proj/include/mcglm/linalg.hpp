#pragma once

#include <array>
#include <stdexcept>

#include "mcglm/rng.hpp"

namespace mcglm {

using Vec2 = std::array<double, 2>;

//! Thrown when a matrix that must be symmetric positive-definite is not
//! (a Cholesky pivot came out non-positive).
struct NotPositiveDefinite : std::runtime_error {
  using std::runtime_error::runtime_error;
};

//! Dense 2x2 matrix, row-major. Everything in the model is bivariate,
//! so the factorizations below are closed-form.
struct Matrix2 {
  double a00 = 0.0;
  double a01 = 0.0;
  double a10 = 0.0;
  double a11 = 0.0;

  static Matrix2 identity() { return {1.0, 0.0, 0.0, 1.0}; }
  static Matrix2 diagonal(double d0, double d1) { return {d0, 0.0, 0.0, d1}; }

  Matrix2 scaled(double c) const { return {c * a00, c * a01, c * a10, c * a11}; }
  double det() const { return a00 * a11 - a01 * a10; }

  Vec2 mul(const Vec2& v) const {
    return {a00 * v[0] + a01 * v[1], a10 * v[0] + a11 * v[1]};
  }
};

inline Vec2 add(const Vec2& a, const Vec2& b) { return {a[0] + b[0], a[1] + b[1]}; }
inline Vec2 sub(const Vec2& a, const Vec2& b) { return {a[0] - b[0], a[1] - b[1]}; }
inline double dot(const Vec2& a, const Vec2& b) { return a[0] * b[0] + a[1] * b[1]; }

//! Lower-triangular L with L L^T = m. Throws NotPositiveDefinite when a
//! pivot is non-positive; rejects visibly asymmetric input.
Matrix2 cholesky_factor(const Matrix2& m);

//! Solve m w = v for symmetric positive-definite m via the Cholesky
//! factor (forward then back substitution).
Vec2 solve_spd(const Matrix2& m, const Vec2& v);

//! Inverse of a symmetric positive-definite 2x2.
Matrix2 inverse_spd(const Matrix2& m);

//! Full bivariate normal log-density (constants included) at v.
double mvn_logpdf(const Vec2& v, const Vec2& mean, const Matrix2& cov);

//! mean + L z with z a pair of independent standard normals from rng.
//! cov_chol is a lower-triangular Cholesky factor of the covariance.
Vec2 mvn_sample(const Vec2& mean, const Matrix2& cov_chol, RngStream& rng);

}  // namespace mcglm
