#pragma once

// Per-observation log-density terms in numerically stable form. Shared by the
// scalar reference kernels and the pointwise log-density functions.

#include <cmath>
#include <limits>

// Internal linkage: this header is also compiled into the AVX2 translation unit,
// and its functions must not be merged with the baseline-ISA copies.
namespace psomle::kernels::scalar {

/// ln(1 - e^{-z}) for z >= 0.
static inline double log1mexp(double z) {
  return z <= M_LN2 ? std::log(-std::expm1(-z)) : std::log1p(-std::exp(-z));
}

/// ln(1 + e^{w}) without overflow.
static inline double softplus(double w) {
  return (w > 0.0 ? w : 0.0) + std::log1p(std::exp(-std::fabs(w)));
}

/// (shape - 1) * log_term, with the convention 0 * (-inf) = 0.
static inline double shape_times(double shape_minus_one, double log_term) {
  return shape_minus_one == 0.0 ? 0.0 : shape_minus_one * log_term;
}

static inline double we_term(double alpha, double beta, double lambda, double x) {
  const double lx = lambda * x;
  const double odds_pow = std::exp(beta * std::log(std::expm1(lx)));
  return shape_times(beta - 1.0, log1mexp(lx)) + lambda * beta * x - alpha * odds_pow;
}

static inline double ew_term(double alpha, double beta, double log_lambda, double log_x) {
  const double z = std::exp(beta * (log_lambda + log_x));
  return (beta - 1.0) * log_x - z + shape_times(alpha - 1.0, log1mexp(z));
}

static inline double ee_term(double alpha, double lambda, double x) {
  const double lx = lambda * x;
  return -lx + shape_times(alpha - 1.0, log1mexp(lx));
}

/// Burr-XII cumulative hazard ln(1 + (x/s)^c).
static inline double burr_log_term(double c, double log_scale, double log_x) {
  return softplus(c * (log_x - log_scale));
}

static inline double wbxii_term(double alpha, double beta, double k, double c, double log_scale,
                         double log_x) {
  const double t = burr_log_term(c, log_scale, log_x);
  const double u = std::expm1(k * t);
  const double log_u = std::log(u);
  return (c - 1.0) * log_x - (1.0 - k) * t - alpha * std::exp(beta * log_u) +
         shape_times(beta - 1.0, log_u);
}

static inline double bbxii_term(double alpha, double beta, double k, double c, double log_scale,
                         double log_x) {
  const double t = burr_log_term(c, log_scale, log_x);
  return (c - 1.0) * log_x - (k * beta + 1.0) * t + shape_times(alpha - 1.0, log1mexp(k * t));
}

static inline double eeiw_term(double alpha, double beta, double c, double log_x) {
  const double z = c * std::exp(-alpha * log_x);
  return -(alpha + 1.0) * log_x - z + shape_times(beta - 1.0, log1mexp(z));
}

/// ln B(a, b) for a, b > 0.
static inline double log_beta_fn(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

}  // namespace psomle::kernels::scalar
