#pragma once

// Data-parallel log-likelihood kernels.
//
// Every kernel exists as a scalar reference implementation (std:: math, one
// observation at a time) and, on x86-64 builds, an AVX2/FMA variant that
// evaluates four observations per step with its own vectorized exp/log.
// The variant is chosen at runtime from the CPU features; PSOMLE_ISA=scalar
// in the environment forces the reference path.
//
// Kernels assume validated inputs: distribution parameters strictly positive
// and finite, observations strictly positive. Numeric pathologies that remain
// (overflow, log of zero) surface as non-finite return values.

#include <cstddef>
#include <span>
#include <string_view>

namespace psomle::kernels {

enum class Isa { scalar, avx2 };

std::string_view to_string(Isa isa);

/// A univariate sample together with its precomputed logarithms.
struct SampleView {
  std::span<const double> x;
  std::span<const double> log_x;
};

/// Binomial regression data in column-major layout.
struct DesignView {
  std::size_t rows = 0;
  std::size_t cols = 0;
  const double* columns = nullptr;       // cols blocks of `rows` values
  std::span<const double> successes;     // y_i
  std::span<const double> failures;      // n_i - y_i
  double log_binomial_constant = 0.0;    // sum of ln C(n_i, y_i)
};

/// How the linear predictor maps to log p in the log-binomial likelihood.
enum class LogLink {
  strict,      // log p = x'b; any x'b > 0 makes the likelihood -inf
  clamp_zero,  // log p = min(x'b, 0)
};

using ElementwiseFn = void (*)(std::span<const double> in, std::span<double> out);

struct KernelTable {
  Isa isa;

  double (*we)(double alpha, double beta, double lambda, SampleView s);
  double (*ew)(double alpha, double beta, double lambda, SampleView s);
  double (*ee)(double alpha, double lambda, SampleView s);
  double (*wbxii)(double alpha, double beta, double scale, double k, double c, SampleView s);
  double (*bbxii)(double alpha, double beta, double scale, double k, double c, SampleView s);
  double (*eeiw)(double alpha, double beta, double c, SampleView s);
  double (*logbinom)(std::span<const double> coef, const DesignView& d, LogLink link);

  // Elementwise math used by the kernels, exposed for equivalence testing.
  ElementwiseFn exp;
  ElementwiseFn log;
  ElementwiseFn expm1;
  ElementwiseFn log1p;
  ElementwiseFn log1mexp;  // ln(1 - e^{-z})
  ElementwiseFn softplus;  // ln(1 + e^{w})
};

/// True when the variant was compiled in and the CPU supports it.
bool available(Isa isa);

/// The kernel table for a specific variant. Throws ConfigError if unavailable.
const KernelTable& table(Isa isa);

/// The kernel table selected for this process (best available unless overridden).
const KernelTable& active();

/// Override the process-wide selection (tests, benchmarks). Throws if unavailable.
void select(Isa isa);

}  // namespace psomle::kernels
