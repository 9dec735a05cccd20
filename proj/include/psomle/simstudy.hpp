#pragma once

// Log-binomial simulation study and LASSO cross-validation.

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psomle/baseline.hpp"
#include "psomle/dataset.hpp"
#include "psomle/swarm.hpp"

namespace psomle {

/// One-covariate log-binomial design: x ~ U[x_lo, x_hi], y ~ Bernoulli(exp(b0 + b1 x)).
struct SimDesign {
  double beta0 = -2.30259;
  double beta1 = 0.38376;
  double x_lo = -6.0;
  double x_hi = 6.0;
  std::size_t n_per_sample = 100;
  std::size_t max_replicates = 5000;  // cap on generated samples
  std::uint64_t seed = 1;

  /// Throws ConfigError unless exp(b0 + b1 x) < 1 over the covariate range.
  void validate() const;
};

/// Sample `replicate` of the design; a pure function of (design, replicate).
RegressionData generate_logbinom_sample(const SimDesign& design, std::size_t replicate);

enum class MapState : unsigned char { converged, nonconverged, inadmissible };

std::string_view to_string(MapState state);

/// Fisher-scoring outcome for each initial value of a (b0, b1) lattice.
struct ConvergenceMap {
  std::vector<double> b0_grid;
  std::vector<double> b1_grid;
  std::vector<MapState> states;  // row-major, b0 x b1

  MapState at(std::size_t i, std::size_t j) const { return states[i * b1_grid.size() + j]; }
  std::size_t count(MapState s) const;
};

ConvergenceMap convergence_map(const RegressionData& data, std::span<const double> b0_grid,
                               std::span<const double> b1_grid, const FisherOptions& fisher = {},
                               std::size_t threads = 1);

struct ReplicateRecord {
  std::size_t replicate = 0;
  std::vector<double> baseline_params;
  std::vector<double> pso_params;
  double baseline_fitness = 0.0;
  double pso_fitness = 0.0;
  double delta = 0.0;  // pso - baseline
};

struct StudySummary {
  double mean_delta = 0.0;
  double sd_delta = 0.0;
  double min_delta = 0.0;
  double max_delta = 0.0;
  double mean_abs_gap_b0 = 0.0;
  double mean_abs_gap_b1 = 0.0;
  double mean_baseline_fitness = 0.0;
  double mean_pso_fitness = 0.0;
  double relative_bias_pso_b0 = 0.0;
  double relative_bias_pso_b1 = 0.0;
  double relative_bias_baseline_b0 = 0.0;
  double relative_bias_baseline_b1 = 0.0;
  std::size_t pso_not_worse = 0;  // replicates with delta >= 0
};

struct StudyReport {
  SimDesign design;
  std::size_t target = 0;
  std::size_t samples_generated = 0;
  std::size_t nonconvergent = 0;
  std::size_t inadmissible = 0;  // baseline stopped on an inadmissible step
  double nonconvergence_rate = 0.0;
  double mean_converged_fitness = 0.0;  // baseline, over converged samples
  bool complete = false;
  std::vector<ReplicateRecord> records;
  StudySummary summary;
};

struct StudyOptions {
  std::vector<double> baseline_init{-0.1, 0.0};
  FisherOptions fisher;
  std::size_t threads = 1;
};

/// Swarm settings for the study: 200 particles, 1500 iterations, init box
/// [-3, 3]^2, unbounded, linear inertia, c1 = c2 = 2.
SwarmConfig default_study_swarm(std::uint64_t seed = 1);

/// Generate samples in replicate order, fit each with Fisher scoring from
/// `options.baseline_init`, and refit the first `target` non-convergent ones
/// with the swarm over the strictly admissible region (x_i'b < 0 for every row).
/// Both fits are scored with loglik_logbinom.
StudyReport run_comparison_study(const SimDesign& design, std::size_t target,
                                 const SwarmConfig& pso_config, const StudyOptions& options = {});

// --- LASSO cross-validation ---------------------------------------------------

struct CvResult {
  double best_rho = 0.0;
  std::vector<double> rho_grid;
  std::vector<double> mean_loss;                 // per rho, over included folds
  std::vector<std::vector<double>> fold_loss;    // per rho, per fold (NaN when excluded)
  std::vector<std::size_t> fold_of_row;
  std::vector<std::size_t> excluded_folds;
  std::vector<std::string> warnings;
};

/// Stratified fold labels in [0, folds): rows are split by outcome class,
/// shuffled with `seed`, and dealt round-robin.
std::vector<std::size_t> assign_folds(const RegressionData& data, std::size_t folds,
                                      std::uint64_t seed);

/// Held-out negative log-likelihood with log p = min(x'b, log(1 - 1e-8)).
double heldout_loss(std::span<const double> coef, const RegressionData& data);

/// k-fold cross-validation of the LASSO weight. Each fold is fit with the
/// swarm on the penalized objective and scored with heldout_loss. Folds whose
/// held-out part has a single outcome class are excluded with a warning. Ties
/// go to the larger rho. Throws ConfigError for folds < 2 or an empty grid.
CvResult cross_validate_rho(const RegressionData& data, std::span<const double> rho_grid,
                            std::size_t folds, const SwarmConfig& pso_config);

struct ShrinkagePoint {
  double rho = 0.0;
  std::vector<double> coef;
  double fitness = 0.0;  // negated penalized objective at coef
  double l1_norm = 0.0;
  double mean_p = 0.0;   // mean fitted probability, log p = min(x'b, 0)
};

/// Full-data LASSO fits over `rho_grid`, in ascending rho. Each fit is the
/// swarm answer polished by repeated Nelder-Mead restarts, compared with a
/// polish of the previous weight's answer; the better one is kept. Throws
/// ConfigError for an empty grid or a negative weight.
std::vector<ShrinkagePoint> lasso_path(const RegressionData& data, std::span<const double> rho_grid,
                                       const SwarmConfig& pso_config);

/// Swarm settings for penalized fits: c1 = 0.5, c2 = 0.3, constant inertia 0.9.
SwarmConfig default_lasso_swarm(std::size_t dimension, std::uint64_t seed = 1);

/// Synthetic cohort with the covariate layout of a ten-year coronary heart
/// disease table: intercept, age, education, smoking, cigarettes per day,
/// BP medication, prevalent stroke, prevalent hypertension, diabetes, total
/// cholesterol, systolic BP, diastolic BP, BMI, heart rate, glucose.
/// Continuous covariates are standardized.
RegressionData generate_chd_cohort(std::size_t n, std::uint64_t seed);

}  // namespace psomle
