#pragma once

// Identifiability and goodness-of-fit instruments.

#include <functional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "psomle/objective.hpp"
#include "psomle/swarm.hpp"

namespace psomle {

// --- recast divergence -------------------------------------------------------

enum class Trend { stable, divergent_up, divergent_down };

std::string_view to_string(Trend trend);

struct ParameterEvidence {
  std::string name;
  std::vector<double> window;  // estimates in the last three runs
  bool monotone = false;       // strictly monotone across the window
  double relative_change = 0;  // |last - first| / min(|first|, |last|)
  Trend classification = Trend::stable;
  bool operator==(const ParameterEvidence&) const = default;
};

struct DivergenceReport {
  std::vector<ParameterEvidence> parameters;
  double fitness_span = 0.0;         // |fitness change| across the window
  bool fitness_nondecreasing = true; // over the whole sequence; informational only
  double rel_change_threshold = 0.5;
  double fitness_flat_threshold = 1e-3;

  std::vector<std::string> divergent() const;
  bool operator==(const DivergenceReport&) const = default;
};

/// Classify each parameter of a recast sequence from its last three runs.
///
/// A parameter diverges when its estimates move strictly monotonically with a
/// relative change above `rel_change_threshold` while the best fitness moves
/// by less than `fitness_flat_threshold`. `names` defaults to p0, p1, ...
/// Throws InsufficientEvidence for fewer than three runs.
DivergenceReport detect_divergence(std::span<const FitResult> sequence,
                                   std::vector<std::string> names = {},
                                   double rel_change_threshold = 0.5,
                                   double fitness_flat_threshold = 1e-3);

// --- profile likelihood ------------------------------------------------------

struct ProfileAxis {
  std::string name;
  std::vector<double> grid;
  bool operator==(const ProfileAxis&) const = default;
};

struct ProfileGrid {
  std::string objective;
  std::vector<std::pair<std::string, double>> fixed;
  ProfileAxis axis1;
  ProfileAxis axis2;
  std::vector<double> values;         // row-major, axis1 x axis2; kPenalty where flagged
  std::vector<unsigned char> flagged; // 1 where the objective was not finite

  double at(std::size_t i, std::size_t j) const { return values[i * axis2.grid.size() + j]; }
  bool is_flagged(std::size_t i, std::size_t j) const {
    return flagged[i * axis2.grid.size() + j] != 0;
  }
  std::size_t flagged_count() const;
  bool operator==(const ProfileGrid&) const = default;
};

/// Evaluate the objective over axis1 x axis2 with the remaining parameters
/// fixed. The fixed names plus the two axis names must cover the parameter
/// set exactly once; otherwise ConfigError.
ProfileGrid profile_loglik_grid(const Objective& objective,
                                const std::vector<std::pair<std::string, double>>& fixed,
                                const ProfileAxis& axis1, const ProfileAxis& axis2,
                                std::size_t threads = 1);

struct RidgePoint {
  double axis1 = 0.0;
  double axis2 = 0.0;
  double loglik = 0.0;
};

/// For each axis1 value, the axis2 cell with the largest finite value.
/// Rows without a finite value are skipped.
std::vector<RidgePoint> ridge_trace(const ProfileGrid& grid);

/// A contiguous stretch of the ridge over which the log-likelihood stays within
/// `tolerance` of its values and axis1 grows by the largest factor found.
struct FlatStretch {
  std::size_t begin = 0;  // indices into the ridge trace
  std::size_t end = 0;    // inclusive
  double axis1_factor = 1.0;
  double loglik_span = 0.0;
};

FlatStretch longest_flat_stretch(std::span<const RidgePoint> ridge, double tolerance);

// --- empirical cdf and fit distance -------------------------------------------

class Ecdf {
 public:
  /// Throws DomainError on empty or non-finite data.
  explicit Ecdf(std::span<const double> data);

  /// Fraction of observations <= x.
  double operator()(double x) const;
  std::size_t n() const { return sorted_.size(); }
  const std::vector<double>& sorted() const { return sorted_; }
  /// Distinct sorted values with the ecdf height at each.
  std::vector<std::pair<double, double>> steps() const;

 private:
  std::vector<double> sorted_;
};

enum class FitDistance { kolmogorov_smirnov, cramer_von_mises };

/// Distance between the ecdf of `data` and a parametric cdf. The KS form uses
/// the two-sided step correction max(i/n - F(x_i), F(x_i) - (i-1)/n).
double cdf_fit_distance(std::span<const double> data, const std::function<double(double)>& cdf,
                        FitDistance kind = FitDistance::kolmogorov_smirnov);

// --- standard errors ----------------------------------------------------------

struct StandardErrors {
  bool ok = false;
  std::vector<double> se;
  std::vector<double> steps;
  std::vector<double> hessian;      // row-major, of the log-likelihood
  std::vector<double> eigenvalues;  // of the negated Hessian, ascending
  std::size_t nonpositive_eigenvalues = 0;
  std::string failure;
};

/// Central finite-difference Hessian at theta and SE = sqrt(diag((-H)^-1)).
///
/// The step for coordinate j is max(step, step |theta_j|), and no more than
/// theta_j / 2 for positive-constrained parameters. Reports failure (ok =
/// false) when the objective is not finite on the stencil, or when -H has a
/// nonpositive eigenvalue or a condition number beyond 1e12.
StandardErrors numerical_se(const Objective& objective, std::span<const double> theta,
                            double step = 1e-4);

/// 100 * mean((estimate - truth) / truth). Throws DomainError for truth == 0 or no estimates.
double relative_bias(std::span<const double> estimates, double truth);

}  // namespace psomle
