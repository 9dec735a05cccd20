#include "psomle/simstudy.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "kernels/scalar_terms.hpp"
#include "psomle/baseline.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/error.hpp"
#include "psomle/objectives.hpp"
#include "psomle/parallel.hpp"
#include "psomle/rng.hpp"

namespace psomle {
namespace {

enum Stream : std::uint64_t { kSample = 11, kFolds = 12, kCvFit = 13, kStudyFit = 14, kCohort = 15 };

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

double mean(std::span<const double> v) {
  return v.empty() ? kNan : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double sample_sd(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

}  // namespace

void SimDesign::validate() const {
  if (!(x_lo < x_hi)) throw ConfigError("covariate range must satisfy x_lo < x_hi");
  if (n_per_sample < 2) throw ConfigError("n_per_sample must be at least 2");
  if (max_replicates < 1) throw ConfigError("max_replicates must be at least 1");
  const double worst = std::max(beta0 + beta1 * x_lo, beta0 + beta1 * x_hi);
  if (!(worst < 0.0))
    throw ConfigError("true coefficients give a probability of 1 or more inside the covariate range");
}

RegressionData generate_logbinom_sample(const SimDesign& design, std::size_t replicate) {
  design.validate();
  CounterRng rng(design.seed, {kSample, replicate});
  const std::size_t n = design.n_per_sample;
  std::vector<double> rows(2 * n), y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double x = rng.uniform(design.x_lo, design.x_hi);
    const double p = std::exp(design.beta0 + design.beta1 * x);
    rows[2 * i] = 1.0;
    rows[2 * i + 1] = x;
    y[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  return RegressionData::from_rows(rows, 2, std::move(y));
}

std::string_view to_string(MapState state) {
  switch (state) {
    case MapState::converged: return "converged";
    case MapState::nonconverged: return "nonconverged";
    case MapState::inadmissible: return "inadmissible";
  }
  return "unknown";
}

std::size_t ConvergenceMap::count(MapState s) const {
  return static_cast<std::size_t>(std::count(states.begin(), states.end(), s));
}

ConvergenceMap convergence_map(const RegressionData& data, std::span<const double> b0_grid,
                               std::span<const double> b1_grid, const FisherOptions& fisher,
                               std::size_t threads) {
  if (data.cols() != 2) throw ContractViolation("convergence_map expects an intercept and one covariate");
  ConvergenceMap map;
  map.b0_grid.assign(b0_grid.begin(), b0_grid.end());
  map.b1_grid.assign(b1_grid.begin(), b1_grid.end());
  const std::size_t n1 = b1_grid.size();
  map.states.assign(b0_grid.size() * n1, MapState::inadmissible);
  parallel_for(b0_grid.size(), threads, [&](std::size_t i) {
    for (std::size_t j = 0; j < n1; ++j) {
      const double init[2] = {b0_grid[i], b1_grid[j]};
      bool admissible = true;
      for (std::size_t r = 0; r < data.rows() && admissible; ++r)
        admissible = data.linear_predictor(r, init) < 0.0;
      if (!admissible) continue;
      const auto res = fisher_scoring_logbinom(data, init, fisher);
      map.states[i * n1 + j] = res.converged ? MapState::converged : MapState::nonconverged;
    }
  });
  return map;
}

SwarmConfig default_study_swarm(std::uint64_t seed) {
  SwarmConfig c;
  c.swarm_size = 200;
  c.max_iterations = 1500;
  c.init_box = {{-3.0, 3.0}, {-3.0, 3.0}};
  c.seed = seed;
  return c;
}

StudyReport run_comparison_study(const SimDesign& design, std::size_t target,
                                 const SwarmConfig& pso_config, const StudyOptions& options) {
  design.validate();
  if (target < 1) throw ConfigError("study target must be at least 1");
  pso_config.validate(2);

  StudyReport report;
  report.design = design;
  report.target = target;

  struct Harvested {
    std::size_t replicate;
    RegressionData data;
    BaselineResult baseline;
  };
  std::vector<Harvested> harvested;
  std::vector<double> converged_fitness;
  for (std::size_t r = 0; r < design.max_replicates && harvested.size() < target; ++r) {
    auto data = generate_logbinom_sample(design, r);
    auto res = fisher_scoring_logbinom(data, options.baseline_init, options.fisher);
    ++report.samples_generated;
    if (res.converged) {
      converged_fitness.push_back(res.objective_value);
    } else if (res.failure_reason == FailureReason::max_iter) {
      ++report.nonconvergent;
      harvested.push_back({r, std::move(data), std::move(res)});
    } else {
      ++report.inadmissible;
    }
  }
  report.complete = harvested.size() == target;
  report.nonconvergence_rate =
      static_cast<double>(report.nonconvergent) / static_cast<double>(report.samples_generated);
  report.mean_converged_fitness = mean(converged_fitness);

  report.records.resize(harvested.size());
  parallel_for(harvested.size(), options.threads, [&](std::size_t h) {
    const auto& item = harvested[h];
    Dataset ds{"replicate-" + std::to_string(item.replicate), DataSource::generated, item.data};
    const Objective loglik = make_objective("logbinom", ds);
    // Strictly admissible fits only: the likelihood itself accepts p = 1 on an
    // all-event row, which is where non-convergent samples peak.
    const RegressionData* rows = &item.data;
    const Objective obj(loglik.name(), loglik.space(), [loglik, rows](std::span<const double> b) {
      for (std::size_t i = 0; i < rows->rows(); ++i)
        if (!(rows->linear_predictor(i, b) < 0.0)) return -std::numeric_limits<double>::infinity();
      return loglik(b);
    });
    SwarmConfig cfg = pso_config;
    cfg.seed = derive_key(pso_config.seed, {kStudyFit, item.replicate});
    cfg.threads = 1;
    const FitResult fit = run_pso(obj, cfg);

    ReplicateRecord& rec = report.records[h];
    rec.replicate = item.replicate;
    rec.baseline_params = item.baseline.params;
    rec.pso_params = fit.best_params;
    rec.baseline_fitness = loglik_logbinom(rec.baseline_params, item.data);
    rec.pso_fitness = loglik_logbinom(rec.pso_params, item.data);
    rec.delta = rec.pso_fitness - rec.baseline_fitness;
  });

  if (!report.records.empty()) {
    std::vector<double> delta, gap0, gap1, base_fit, pso_fit, pb0, pb1, bb0, bb1;
    for (const auto& rec : report.records) {
      delta.push_back(rec.delta);
      gap0.push_back(std::fabs(rec.pso_params[0] - rec.baseline_params[0]));
      gap1.push_back(std::fabs(rec.pso_params[1] - rec.baseline_params[1]));
      base_fit.push_back(rec.baseline_fitness);
      pso_fit.push_back(rec.pso_fitness);
      pb0.push_back(rec.pso_params[0]);
      pb1.push_back(rec.pso_params[1]);
      bb0.push_back(rec.baseline_params[0]);
      bb1.push_back(rec.baseline_params[1]);
      if (rec.delta >= 0.0) ++report.summary.pso_not_worse;
    }
    auto& s = report.summary;
    s.mean_delta = mean(delta);
    s.sd_delta = sample_sd(delta);
    s.min_delta = *std::min_element(delta.begin(), delta.end());
    s.max_delta = *std::max_element(delta.begin(), delta.end());
    s.mean_abs_gap_b0 = mean(gap0);
    s.mean_abs_gap_b1 = mean(gap1);
    s.mean_baseline_fitness = mean(base_fit);
    s.mean_pso_fitness = mean(pso_fit);
    s.relative_bias_pso_b0 = relative_bias(pb0, design.beta0);
    s.relative_bias_pso_b1 = relative_bias(pb1, design.beta1);
    s.relative_bias_baseline_b0 = relative_bias(bb0, design.beta0);
    s.relative_bias_baseline_b1 = relative_bias(bb1, design.beta1);
  }
  return report;
}

std::vector<std::size_t> assign_folds(const RegressionData& data, std::size_t folds,
                                      std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least two folds");
  if (folds > data.rows()) throw ConfigError("more folds than rows");
  std::vector<std::size_t> events, non_events;
  for (std::size_t i = 0; i < data.rows(); ++i)
    (data.y()[i] > 0.0 ? events : non_events).push_back(i);
  CounterRng rng(seed, {kFolds});
  std::shuffle(events.begin(), events.end(), rng);
  std::shuffle(non_events.begin(), non_events.end(), rng);
  std::vector<std::size_t> fold(data.rows());
  std::size_t k = 0;
  for (const auto* group : {&events, &non_events})
    for (std::size_t i : *group) fold[i] = k++ % folds;
  return fold;
}

double heldout_loss(std::span<const double> coef, const RegressionData& data) {
  if (coef.size() != data.cols()) throw ContractViolation("heldout_loss: coefficient size mismatch");
  const double cap = std::log1p(-1e-8);
  double loss = -data.log_binomial_constant();
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const double eta = std::min(data.linear_predictor(i, coef), cap);
    loss -= data.y()[i] * eta;
    if (data.failures()[i] != 0.0) loss -= data.failures()[i] * kernels::scalar::log1mexp(-eta);
  }
  return loss;
}

namespace {

// Nelder-Mead restarted from its own answer until a restart gains nothing.
BaselineResult polish(const Objective& obj, std::span<const double> x0) {
  BaselineResult best;
  best.params.assign(x0.begin(), x0.end());
  best.objective_value = obj(x0);
  for (int restart = 0; restart < 200; ++restart) {
    BaselineResult next = nelder_mead(obj, best.params);
    const bool gained = next.objective_value > best.objective_value + 1e-10;
    if (next.objective_value > best.objective_value) best = std::move(next);
    if (!gained) break;
  }
  return best;
}

}  // namespace

std::vector<ShrinkagePoint> lasso_path(const RegressionData& data, std::span<const double> rho_grid,
                                       const SwarmConfig& pso_config) {
  if (rho_grid.empty()) throw ConfigError("rho grid is empty");
  std::vector<double> rhos(rho_grid.begin(), rho_grid.end());
  for (double rho : rhos)
    if (!(rho >= 0.0)) throw ConfigError("rho must be nonnegative");
  std::sort(rhos.begin(), rhos.end());
  pso_config.validate(data.cols());

  const Dataset ds{"lasso", DataSource::generated, data};
  std::vector<ShrinkagePoint> path;
  for (double rho : rhos) {
    const Objective obj = make_objective("logbinom-lasso", ds, {rho});
    BaselineResult best = polish(obj, run_pso(obj, pso_config).best_params);
    if (!path.empty()) {
      BaselineResult warm = polish(obj, path.back().coef);
      if (warm.objective_value > best.objective_value) best = std::move(warm);
    }
    ShrinkagePoint pt;
    pt.rho = rho;
    pt.coef = best.params;
    pt.fitness = best.objective_value;
    for (double b : pt.coef) pt.l1_norm += std::fabs(b);
    for (std::size_t i = 0; i < data.rows(); ++i)
      pt.mean_p += std::exp(std::min(data.linear_predictor(i, pt.coef), 0.0));
    pt.mean_p /= static_cast<double>(data.rows());
    path.push_back(std::move(pt));
  }
  return path;
}

SwarmConfig default_lasso_swarm(std::size_t dimension, std::uint64_t seed) {
  if (dimension < 1) throw ConfigError("lasso swarm needs at least one coefficient");
  SwarmConfig c;
  c.swarm_size = 100;
  c.max_iterations = 300;
  c.c1 = 0.5;
  c.c2 = 0.3;
  c.inertia = InertiaSchedule::constant(0.9);
  c.seed = seed;
  // The clamped objective is -inf wherever a non-event row reaches p = 1, so
  // particles start near small-probability, small-coefficient fits.
  c.init_box.assign(dimension, {-0.2, 0.2});
  c.init_box[0] = {-3.0, -1.0};
  return c;
}

CvResult cross_validate_rho(const RegressionData& data, std::span<const double> rho_grid,
                            std::size_t folds, const SwarmConfig& pso_config) {
  if (rho_grid.empty()) throw ConfigError("rho grid is empty");
  for (double r : rho_grid)
    if (!(r >= 0.0) || !std::isfinite(r)) throw ConfigError("rho values must be finite and nonnegative");
  pso_config.validate(data.cols());

  CvResult out;
  out.rho_grid.assign(rho_grid.begin(), rho_grid.end());
  out.fold_of_row = assign_folds(data, folds, pso_config.seed);
  out.fold_loss.assign(rho_grid.size(), std::vector<double>(folds, kNan));

  std::vector<bool> included(folds, false);
  for (std::size_t k = 0; k < folds; ++k) {
    std::vector<std::size_t> train, test;
    for (std::size_t i = 0; i < data.rows(); ++i) (out.fold_of_row[i] == k ? test : train).push_back(i);
    bool has_event = false, has_non_event = false;
    for (std::size_t i : test) (data.y()[i] > 0.0 ? has_event : has_non_event) = true;
    if (!(has_event && has_non_event)) {
      out.excluded_folds.push_back(k);
      out.warnings.push_back("fold " + std::to_string(k) + " has a single outcome class; excluded");
      continue;
    }
    included[k] = true;
    const RegressionData train_data = data.subset(train);
    const RegressionData test_data = data.subset(test);
    const Dataset ds{"cv-train", DataSource::generated, train_data};
    for (std::size_t r = 0; r < rho_grid.size(); ++r) {
      const Objective obj = make_objective("logbinom-lasso", ds, {rho_grid[r]});
      SwarmConfig cfg = pso_config;
      cfg.seed = derive_key(pso_config.seed, {kCvFit, k, r});
      const FitResult fit = run_pso(obj, cfg);
      out.fold_loss[r][k] = heldout_loss(fit.best_params, test_data);
    }
  }
  if (out.excluded_folds.size() == folds)
    throw InsufficientEvidence("every cross-validation fold has a single outcome class");

  for (std::size_t r = 0; r < rho_grid.size(); ++r) {
    std::vector<double> losses;
    for (std::size_t k = 0; k < folds; ++k)
      if (included[k]) losses.push_back(out.fold_loss[r][k]);
    out.mean_loss.push_back(mean(losses));
  }
  std::size_t best = 0;
  for (std::size_t r = 1; r < rho_grid.size(); ++r) {
    const double a = out.mean_loss[r], b = out.mean_loss[best];
    if (a < b || (a == b && rho_grid[r] > rho_grid[best])) best = r;
  }
  out.best_rho = rho_grid[best];
  return out;
}

RegressionData generate_chd_cohort(std::size_t n, std::uint64_t seed) {
  if (n < 2) throw ConfigError("cohort needs at least two rows");
  CounterRng rng(seed, {kCohort});
  std::normal_distribution<double> z;
  auto normal = [&](double mu, double sd) { return mu + sd * z(rng); };
  auto bern = [&](double p) { return rng.uniform() < p ? 1.0 : 0.0; };

  constexpr std::size_t kCov = 14;
  std::vector<std::vector<double>> cov(kCov, std::vector<double>(n));
  for (std::size_t i = 0; i < n; ++i) {
    const double u = rng.uniform();
    const double education = u < 0.42 ? 1 : u < 0.72 ? 2 : u < 0.89 ? 3 : 4;
    const double smoker = bern(0.5);
    const double hyp = bern(0.31);
    const double diabetes = bern(0.025);
    cov[0][i] = normal(49, 6);
    cov[1][i] = education;
    cov[2][i] = smoker;
    cov[3][i] = smoker > 0 ? std::max(1.0, std::round(normal(18, 9))) : 0.0;
    cov[4][i] = bern(0.03);
    cov[5][i] = bern(0.006);
    cov[6][i] = hyp;
    cov[7][i] = diabetes;
    cov[8][i] = normal(237, 44);
    cov[9][i] = normal(128 + 16 * hyp, 18);
    cov[10][i] = normal(80 + 9 * hyp, 10);
    cov[11][i] = normal(25.5, 2.3);
    cov[12][i] = normal(75, 8);
    cov[13][i] = normal(80 + 60 * diabetes, 14);
  }
  const bool binary[kCov] = {false, false, true, false, true, true, true,
                             true,  false, false, false, false, false, false};
  for (std::size_t j = 0; j < kCov; ++j) {
    if (binary[j]) continue;
    const double m = mean(cov[j]), sd = sample_sd(cov[j]);
    for (double& v : cov[j]) v = sd > 0 ? (v - m) / sd : 0.0;
  }

  std::vector<double> rows;
  rows.reserve(n * (kCov + 1));
  std::vector<double> y(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double eta = -2.1 + 0.35 * cov[0][i] + 0.3 * cov[9][i] + 0.9 * cov[7][i] +
                       0.15 * cov[6][i] + 0.1 * cov[13][i];
    y[i] = bern(std::min(std::exp(eta), 0.9));
    rows.push_back(1.0);
    for (std::size_t j = 0; j < kCov; ++j) rows.push_back(cov[j][i]);
  }
  std::vector<std::string> names = {"intercept",     "age",       "education", "smoking",
                                    "cigs_per_day",  "bp_meds",   "prevalent_stroke",
                                    "prevalent_hyp", "diabetes",  "total_chol",
                                    "sys_bp",        "dia_bp",    "bmi",
                                    "heart_rate",    "glucose"};
  return RegressionData::from_rows(rows, kCov + 1, std::move(y), {}, std::move(names));
}

}  // namespace psomle
