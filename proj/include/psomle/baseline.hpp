#pragma once

// Classical optimizers used as comparators and as oracles in tests.
// All of them maximize.

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "psomle/dataset.hpp"
#include "psomle/objective.hpp"

namespace psomle {

enum class FailureReason { max_iter, inadmissible_step, singular_information, nonfinite_objective };

std::string_view to_string(FailureReason reason);

struct BaselineResult {
  std::vector<double> params;
  double objective_value = 0.0;
  bool converged = false;
  std::size_t iterations = 0;
  std::optional<FailureReason> failure_reason;
};

struct NelderMeadOptions {
  double xtol = 1e-10;  // simplex diameter (max-norm) at convergence
  double ftol = 1e-12;  // spread of objective values at convergence
  std::size_t max_iter = 20000;
};

/// Nelder-Mead simplex with the standard coefficients (1, 2, 0.5, 0.5) and a
/// 5% initial perturbation of each coordinate (0.00025 for zero coordinates).
/// Non-finite values inside the run are treated as -inf.
BaselineResult nelder_mead(const Objective& objective, std::span<const double> x0,
                           const NelderMeadOptions& options = {});

/// Best of `starts` Nelder-Mead runs from points drawn uniformly in `box`.
BaselineResult nelder_mead_multistart(const Objective& objective, std::span<const Interval> box,
                                      std::size_t starts, std::uint64_t seed,
                                      const NelderMeadOptions& options = {});

/// Exhaustive search over the lattice with `points_per_dim` points per axis
/// (endpoints included). Visits points in lexicographic order, last axis
/// fastest, and keeps the first of equal maxima. Throws ConfigError for more
/// than four dimensions.
BaselineResult brute_force_grid(const Objective& objective, std::span<const Interval> box,
                                std::size_t points_per_dim);

struct FisherOptions {
  std::size_t max_iter = 25;
  double tol = 1e-8;  // max-norm of the accepted step
  std::size_t max_halvings = 32;
};

/// Fisher scoring for the log-binomial model with step halving to keep every
/// iterate admissible (x_i'b < 0 for all rows).
BaselineResult fisher_scoring_logbinom(const RegressionData& data, std::span<const double> init,
                                       const FisherOptions& options = {});

}  // namespace psomle
