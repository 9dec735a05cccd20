#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <vector>

#include "psomle/baseline.hpp"
#include "psomle/error.hpp"
#include "psomle/objectives.hpp"
#include "psomle/simstudy.hpp"

using namespace psomle;
using doctest::Approx;

namespace {

bool admissible(const RegressionData& data, std::span<const double> b) {
  for (std::size_t i = 0; i < data.rows(); ++i)
    if (data.linear_predictor(i, b) >= 0) return false;
  return true;
}

std::vector<double> linspace(double lo, double hi, std::size_t n) {
  std::vector<double> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
  return v;
}

SwarmConfig quick_swarm(std::uint64_t seed = 1) {
  SwarmConfig c = default_study_swarm(seed);
  c.swarm_size = 60;
  c.max_iterations = 400;
  return c;
}

}  // namespace

TEST_CASE("design validation") {
  CHECK_NOTHROW(SimDesign{}.validate());
  SimDesign d;
  d.beta0 = 0.0;
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = SimDesign{};
  d.beta1 = 0.4;  // exp(-2.30259 + 2.4) > 1
  CHECK_THROWS_AS(d.validate(), ConfigError);
  d = SimDesign{};
  d.n_per_sample = 1;
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

TEST_CASE("generated samples") {
  const SimDesign d;
  const RegressionData a = generate_logbinom_sample(d, 7);
  CHECK(a.rows() == 100);
  CHECK(a.cols() == 2);
  CHECK(a == generate_logbinom_sample(d, 7));
  CHECK_FALSE(a == generate_logbinom_sample(d, 8));
  for (std::size_t i = 0; i < a.rows(); ++i) {
    CHECK(a.x(i, 0) == 1.0);
    CHECK((a.x(i, 1) >= -6.0 && a.x(i, 1) <= 6.0));
    const double p = std::exp(d.beta0 + d.beta1 * a.x(i, 1));
    CHECK((p > 0.0 && p < 1.0));
    CHECK((a.y()[i] == 0.0 || a.y()[i] == 1.0));
  }
}

TEST_CASE("mean success probability matches its closed form") {
  SimDesign d;
  d.n_per_sample = 1000000;
  const RegressionData s = generate_logbinom_sample(d, 0);
  double sum = 0.0;
  for (std::size_t i = 0; i < s.rows(); ++i) sum += std::exp(d.beta0 + d.beta1 * s.x(i, 1));
  const double n = static_cast<double>(s.rows());
  const double b0 = d.beta0, b1 = d.beta1;
  const double mean = (std::exp(6 * b1) - std::exp(-6 * b1)) * std::exp(b0) / (12 * b1);
  const double second = (std::exp(12 * b1) - std::exp(-12 * b1)) * std::exp(2 * b0) / (24 * b1);
  const double sigma = std::sqrt(second - mean * mean);
  CHECK(std::fabs(sum / n - mean) < 3 * sigma / std::sqrt(n));
}

TEST_CASE("convergence maps") {
  const auto b0 = linspace(-3, 0, 13);
  const auto b1 = linspace(-1, 1, 17);
  std::size_t conv_rep = 0, nonconv_rep = 0;
  bool have_conv = false, have_nonconv = false;
  for (std::size_t r = 0; r < 200 && !(have_conv && have_nonconv); ++r) {
    const auto fit = fisher_scoring_logbinom(generate_logbinom_sample(SimDesign{}, r), std::vector{-0.1, 0.0});
    if (fit.converged && !have_conv) conv_rep = r, have_conv = true;
    if (fit.failure_reason == FailureReason::max_iter && !have_nonconv) nonconv_rep = r, have_nonconv = true;
  }
  REQUIRE(have_conv);
  REQUIRE(have_nonconv);

  for (std::size_t rep : {conv_rep, nonconv_rep}) {
    CAPTURE(rep);
    const RegressionData data = generate_logbinom_sample(SimDesign{}, rep);
    const ConvergenceMap m = convergence_map(data, b0, b1, {}, 2);
    REQUIRE(m.states.size() == b0.size() * b1.size());
    for (std::size_t i = 0; i < b0.size(); ++i)
      for (std::size_t j = 0; j < b1.size(); ++j) {
        const std::vector<double> init{b0[i], b1[j]};
        CHECK((m.at(i, j) == MapState::inadmissible) == !admissible(data, init));
      }
    CHECK(m.count(MapState::inadmissible) > 0);
    CHECK(m.count(MapState::converged) + m.count(MapState::nonconverged) +
              m.count(MapState::inadmissible) ==
          m.states.size());
    CHECK(convergence_map(data, b0, b1).states == m.states);
    if (rep == conv_rep) {
      CHECK(m.count(MapState::nonconverged) == 0);
    } else {
      CHECK(m.count(MapState::nonconverged) > 0);
    }
  }
}

TEST_CASE("comparison study") {
  SimDesign d;
  d.seed = 5;
  const StudyReport r = run_comparison_study(d, 6, quick_swarm());
  REQUIRE(r.complete);
  REQUIRE(r.records.size() == 6);
  CHECK(r.nonconvergent == 6);
  CHECK(r.samples_generated >= 6);
  CHECK(r.nonconvergence_rate == Approx(6.0 / static_cast<double>(r.samples_generated)));
  CHECK(r.summary.pso_not_worse == 6);
  CHECK(r.summary.min_delta >= 0.0);
  CHECK(r.summary.mean_delta >= 0.0);
  std::set<std::size_t> seen;
  for (const auto& rec : r.records) {
    CAPTURE(rec.replicate);
    CHECK(rec.delta >= 0.0);
    CHECK(rec.delta == rec.pso_fitness - rec.baseline_fitness);
    const RegressionData data = generate_logbinom_sample(d, rec.replicate);
    CHECK(admissible(data, rec.pso_params));
    CHECK(admissible(data, rec.baseline_params));
    CHECK(rec.pso_fitness == loglik_logbinom(rec.pso_params, data));
    seen.insert(rec.replicate);
  }
  CHECK(seen.size() == 6);

  StudyOptions threaded;
  threaded.threads = 3;
  const StudyReport t = run_comparison_study(d, 6, quick_swarm(), threaded);
  for (std::size_t h = 0; h < 6; ++h) {
    CHECK(t.records[h].replicate == r.records[h].replicate);
    CHECK(t.records[h].pso_params == r.records[h].pso_params);
  }
}

TEST_CASE("study contracts") {
  SimDesign d;
  d.max_replicates = 3;
  const StudyReport r = run_comparison_study(d, 50, quick_swarm());
  CHECK_FALSE(r.complete);
  CHECK(r.samples_generated == 3);
  CHECK(r.records.size() == r.nonconvergent);
  CHECK_THROWS_AS(run_comparison_study(SimDesign{}, 0, quick_swarm()), ConfigError);
  SwarmConfig three = quick_swarm();
  three.init_box = {{-3, 3}, {-3, 3}, {-3, 3}};
  CHECK_THROWS_AS(run_comparison_study(SimDesign{}, 1, three), ConfigError);
}

TEST_CASE("fold assignment") {
  const RegressionData data = generate_logbinom_sample(SimDesign{}, 3);
  const auto folds = assign_folds(data, 5, 11);
  REQUIRE(folds.size() == data.rows());
  std::vector<std::size_t> sizes(5, 0), events(5, 0);
  for (std::size_t i = 0; i < folds.size(); ++i) {
    REQUIRE(folds[i] < 5);
    ++sizes[folds[i]];
    if (data.y()[i] > 0) ++events[folds[i]];
  }
  CHECK(std::accumulate(sizes.begin(), sizes.end(), std::size_t{0}) == data.rows());
  const auto [lo, hi] = std::minmax_element(sizes.begin(), sizes.end());
  CHECK(*hi - *lo <= 1);
  const auto [elo, ehi] = std::minmax_element(events.begin(), events.end());
  CHECK(*ehi - *elo <= 1);
  CHECK(assign_folds(data, 5, 11) == folds);
  CHECK_THROWS_AS(assign_folds(data, 1, 11), ConfigError);
  CHECK_THROWS_AS(assign_folds(data, data.rows() + 1, 11), ConfigError);
}

TEST_CASE("held-out loss") {
  const RegressionData d = RegressionData::from_rows(std::vector<double>{1, 1}, 1, {1, 0});
  CHECK(heldout_loss(std::vector{std::log(0.25)}, d) == Approx(-std::log(0.25) - std::log(0.75)));
  // Probabilities are capped just below one.
  CHECK(heldout_loss(std::vector{2.0}, d) == Approx(-std::log1p(-1e-8) - std::log(1e-8)).epsilon(1e-6));
}

TEST_CASE("cross-validation of the LASSO weight") {
  const RegressionData cohort = generate_chd_cohort(300, 4);
  SwarmConfig cfg = default_lasso_swarm(cohort.cols(), 2);
  cfg.max_iterations = 150;
  const std::vector<double> zero{0.0};
  const CvResult single = cross_validate_rho(cohort, zero, 3, cfg);
  CHECK(single.best_rho == 0.0);
  CHECK(single.mean_loss.size() == 1);

  CHECK_THROWS_AS(cross_validate_rho(cohort, std::vector<double>{}, 3, cfg), ConfigError);
  CHECK_THROWS_AS(cross_validate_rho(cohort, std::vector{-1.0}, 3, cfg), ConfigError);
  CHECK_THROWS_AS(cross_validate_rho(cohort, zero, 1, cfg), ConfigError);
}

TEST_CASE("cross-validation prefers shrinkage on nearly separable data") {
  // Events exactly when x > 0, except one event at x < 0 and one non-event at
  // x > 0. An unpenalized fit puts p near 1 on the right half and pays heavily
  // for the held-out non-event there.
  std::vector<double> rows, y;
  const auto xs = linspace(-3, 3, 40);
  for (std::size_t i = 0; i < xs.size(); ++i) {
    rows.insert(rows.end(), {1.0, xs[i]});
    bool event = xs[i] > 0;
    if (i == 5) event = true;
    if (i == 34) event = false;
    y.push_back(event ? 1.0 : 0.0);
  }
  const RegressionData data = RegressionData::from_rows(rows, 2, y);
  SwarmConfig cfg = default_lasso_swarm(2, 3);
  cfg.init_box = {{-3.0, 0.0}, {-1.0, 1.0}};
  const std::vector<double> grid{0.0, 0.05, 0.1, 1.0, 10.0};
  const CvResult cv = cross_validate_rho(data, grid, 5, cfg);
  const double best_positive = *std::min_element(cv.mean_loss.begin() + 1, cv.mean_loss.end());
  CHECK(cv.mean_loss[0] > best_positive);
  CHECK(cv.best_rho > 0.0);
  CHECK(cv.excluded_folds.empty());
}

TEST_CASE("folds with one outcome class are excluded") {
  std::vector<double> rows, y;
  for (int i = 0; i < 12; ++i) {
    rows.insert(rows.end(), {1.0, 0.1 * i});
    y.push_back(i == 0 ? 1.0 : 0.0);
  }
  const RegressionData data = RegressionData::from_rows(rows, 2, y);
  SwarmConfig cfg = default_lasso_swarm(2, 1);
  cfg.max_iterations = 50;
  const CvResult cv = cross_validate_rho(data, std::vector{0.0, 1.0}, 3, cfg);
  CHECK(cv.excluded_folds.size() == 2);
  CHECK(cv.warnings.size() == 2);
}

TEST_CASE("synthetic cohort") {
  const RegressionData c = generate_chd_cohort(500, 1);
  CHECK(c.rows() == 500);
  CHECK(c.cols() == 15);
  CHECK(c.names().front() == "intercept");
  CHECK(c.names().back() == "glucose");
  CHECK(c.binary());
  CHECK(c == generate_chd_cohort(500, 1));
  double events = 0;
  for (double v : c.y()) events += v;
  CHECK((events > 0 && events < 500));
}

TEST_CASE("LASSO path shrinks toward zero") {
  const RegressionData cohort = generate_chd_cohort(300, 2);
  SwarmConfig cfg = default_lasso_swarm(cohort.cols(), 1);
  cfg.max_iterations = 100;
  const std::vector<double> grid{10.0, 0.0, 1.0, 100.0};
  const std::vector<ShrinkagePoint> path = lasso_path(cohort, grid, cfg);
  REQUIRE(path.size() == 4);
  for (std::size_t i = 0; i < path.size(); ++i) {
    CAPTURE(i);
    if (i > 0) {
      CHECK(path[i].rho > path[i - 1].rho);
      CHECK(path[i].l1_norm < path[i - 1].l1_norm);
      CHECK(path[i].mean_p > path[i - 1].mean_p);
    }
    const Objective obj =
        make_objective("logbinom-lasso", Dataset{"c", DataSource::generated, cohort}, {path[i].rho});
    CHECK(path[i].fitness == obj(path[i].coef));
  }
  CHECK_THROWS_AS(lasso_path(cohort, std::vector<double>{}, cfg), ConfigError);
  CHECK_THROWS_AS(lasso_path(cohort, std::vector{-1.0}, cfg), ConfigError);
}
