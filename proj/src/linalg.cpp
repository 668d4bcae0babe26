#include "mcglm/linalg.hpp"

#include <cmath>

namespace mcglm {

namespace {
constexpr double kLog2Pi = 1.8378770664093454835606594728112;

void require_symmetric(const Matrix2& m) {
  double scale = std::fabs(m.a00) + std::fabs(m.a11) + std::fabs(m.a01) + 1.0;
  if (std::fabs(m.a01 - m.a10) > 1e-9 * scale) {
    throw std::invalid_argument("matrix is not symmetric");
  }
}
}  // namespace

Matrix2 cholesky_factor(const Matrix2& m) {
  require_symmetric(m);
  if (!(m.a00 > 0.0)) {
    throw NotPositiveDefinite("cholesky: leading pivot <= 0");
  }
  double l00 = std::sqrt(m.a00);
  double l10 = m.a10 / l00;
  double rest = m.a11 - l10 * l10;
  if (!(rest > 0.0)) {
    throw NotPositiveDefinite("cholesky: trailing pivot <= 0");
  }
  return {l00, 0.0, l10, std::sqrt(rest)};
}

Vec2 solve_spd(const Matrix2& m, const Vec2& v) {
  Matrix2 l = cholesky_factor(m);
  // L z = v
  double z0 = v[0] / l.a00;
  double z1 = (v[1] - l.a10 * z0) / l.a11;
  // L^T w = z
  double w1 = z1 / l.a11;
  double w0 = (z0 - l.a10 * w1) / l.a00;
  return {w0, w1};
}

Matrix2 inverse_spd(const Matrix2& m) {
  // Adjugate route; the Cholesky call is what validates SPD-ness.
  Matrix2 l = cholesky_factor(m);
  double det = (l.a00 * l.a11) * (l.a00 * l.a11);
  return {m.a11 / det, -m.a01 / det, -m.a10 / det, m.a00 / det};
}

double mvn_logpdf(const Vec2& v, const Vec2& mean, const Matrix2& cov) {
  Matrix2 l = cholesky_factor(cov);
  double logdet = 2.0 * (std::log(l.a00) + std::log(l.a11));
  Vec2 d = sub(v, mean);
  // whiten: L z = d
  double z0 = d[0] / l.a00;
  double z1 = (d[1] - l.a10 * z0) / l.a11;
  double quad = z0 * z0 + z1 * z1;
  return -kLog2Pi - 0.5 * logdet - 0.5 * quad;
}

Vec2 mvn_sample(const Vec2& mean, const Matrix2& cov_chol, RngStream& rng) {
  auto [z0, z1] = rng.normal_pair();
  return {mean[0] + cov_chol.a00 * z0,
          mean[1] + cov_chol.a10 * z0 + cov_chol.a11 * z1};
}

}  // namespace mcglm
