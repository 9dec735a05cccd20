#include "psomle/baseline.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "psomle/error.hpp"
#include "psomle/objectives.hpp"
#include "psomle/rng.hpp"

namespace psomle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double finite_or_worst(double f) { return std::isfinite(f) ? f : -kInf; }

}  // namespace

std::string_view to_string(FailureReason reason) {
  switch (reason) {
    case FailureReason::max_iter: return "max_iter";
    case FailureReason::inadmissible_step: return "inadmissible_step";
    case FailureReason::singular_information: return "singular_information";
    case FailureReason::nonfinite_objective: return "nonfinite_objective";
  }
  return "unknown";
}

BaselineResult nelder_mead(const Objective& objective, std::span<const double> x0,
                           const NelderMeadOptions& options) {
  const std::size_t n = x0.size();
  if (n != objective.dimension())
    throw ContractViolation("nelder_mead: start point has the wrong dimension");
  BaselineResult out;
  out.params.assign(x0.begin(), x0.end());
  for (double v : x0)
    if (!std::isfinite(v)) throw ContractViolation("nelder_mead: start point must be finite");

  // Work on g = -f so the textbook minimization steps apply unchanged.
  auto g = [&](const std::vector<double>& x) { return -finite_or_worst(objective(x)); };
  const double g0 = g(out.params);
  if (!std::isfinite(g0)) {
    out.objective_value = -g0;
    out.failure_reason = FailureReason::nonfinite_objective;
    return out;
  }

  std::vector<std::vector<double>> simplex(n + 1, out.params);
  std::vector<double> values(n + 1, g0);
  for (std::size_t j = 0; j < n; ++j) {
    auto& p = simplex[j + 1];
    p[j] = p[j] != 0.0 ? 1.05 * p[j] : 0.00025;
    values[j + 1] = g(p);
  }

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto point = [&](double t, const std::vector<double>& worst, std::vector<double>& dst) {
    for (std::size_t j = 0; j < n; ++j) dst[j] = centroid[j] + t * (worst[j] - centroid[j]);
  };

  std::size_t iter = 0;
  for (; iter < options.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    {
      std::vector<std::vector<double>> s2;
      std::vector<double> v2;
      for (auto k : order) {
        s2.push_back(simplex[k]);
        v2.push_back(values[k]);
      }
      simplex = std::move(s2);
      values = std::move(v2);
    }

    double fspread = 0.0, xspread = 0.0;
    for (std::size_t k = 1; k <= n; ++k) {
      fspread = std::max(fspread, std::fabs(values[k] - values[0]));
      for (std::size_t j = 0; j < n; ++j)
        xspread = std::max(xspread, std::fabs(simplex[k][j] - simplex[0][j]));
    }
    if (fspread <= options.ftol && xspread <= options.xtol) {
      out.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k][j] / static_cast<double>(n);

    const auto& worst = simplex[n];
    point(-1.0, worst, trial);
    const double fr = g(trial);
    if (fr < values[0]) {
      point(-2.0, worst, trial2);
      const double fe = g(trial2);
      if (fe < fr) {
        simplex[n] = trial2;
        values[n] = fe;
      } else {
        simplex[n] = trial;
        values[n] = fr;
      }
      continue;
    }
    if (fr < values[n - 1]) {
      simplex[n] = trial;
      values[n] = fr;
      continue;
    }
    const bool outside = fr < values[n];
    point(outside ? -0.5 : 0.5, worst, trial2);
    const double fc = g(trial2);
    if (fc <= (outside ? fr : values[n])) {
      simplex[n] = trial2;
      values[n] = fc;
      continue;
    }
    for (std::size_t k = 1; k <= n; ++k) {
      for (std::size_t j = 0; j < n; ++j)
        simplex[k][j] = simplex[0][j] + 0.5 * (simplex[k][j] - simplex[0][j]);
      values[k] = g(simplex[k]);
    }
  }

  const auto best = static_cast<std::size_t>(
      std::min_element(values.begin(), values.end()) - values.begin());
  out.params = simplex[best];
  out.objective_value = -values[best];
  out.iterations = iter;
  if (!out.converged) out.failure_reason = FailureReason::max_iter;
  return out;
}

BaselineResult nelder_mead_multistart(const Objective& objective, std::span<const Interval> box,
                                      std::size_t starts, std::uint64_t seed,
                                      const NelderMeadOptions& options) {
  if (box.size() != objective.dimension())
    throw ContractViolation("nelder_mead_multistart: box has the wrong dimension");
  if (starts == 0) throw ContractViolation("nelder_mead_multistart: need at least one start");
  BaselineResult best;
  bool have = false;
  for (std::size_t r = 0; r < starts; ++r) {
    CounterRng rng(seed, {r});
    std::vector<double> x0(box.size());
    for (std::size_t j = 0; j < box.size(); ++j) x0[j] = rng.uniform(box[j].lo, box[j].hi);
    auto res = nelder_mead(objective, x0, options);
    if (!std::isfinite(res.objective_value)) continue;
    if (!have || res.objective_value > best.objective_value) {
      best = std::move(res);
      have = true;
    }
  }
  if (!have) {
    best.failure_reason = FailureReason::nonfinite_objective;
    best.objective_value = -kInf;
  }
  return best;
}

BaselineResult brute_force_grid(const Objective& objective, std::span<const Interval> box,
                                std::size_t points_per_dim) {
  const std::size_t d = box.size();
  if (d != objective.dimension())
    throw ContractViolation("brute_force_grid: box has the wrong dimension");
  if (d > 4) throw ConfigError("brute_force_grid is limited to four dimensions");
  if (points_per_dim < 1) throw ConfigError("brute_force_grid needs at least one point per axis");
  for (const auto& b : box)
    if (!b.finite() || b.lo > b.hi) throw ConfigError("brute_force_grid needs a finite box");

  auto coord = [&](std::size_t j, std::size_t k) {
    if (points_per_dim == 1) return box[j].lo;
    if (k + 1 == points_per_dim) return box[j].hi;
    return box[j].lo + box[j].width() * static_cast<double>(k) /
                           static_cast<double>(points_per_dim - 1);
  };

  BaselineResult out;
  out.objective_value = -kInf;
  std::vector<std::size_t> idx(d, 0);
  std::vector<double> x(d);
  bool found = false;
  std::size_t count = 0;
  while (true) {
    for (std::size_t j = 0; j < d; ++j) x[j] = coord(j, idx[j]);
    const double f = objective(x);
    ++count;
    if (std::isfinite(f) && (!found || f > out.objective_value)) {
      out.objective_value = f;
      out.params = x;
      found = true;
    }
    bool carried_out = true;
    for (std::size_t j = d; j-- > 0;) {
      if (++idx[j] < points_per_dim) {
        carried_out = false;
        break;
      }
      idx[j] = 0;
    }
    if (carried_out) break;
  }
  out.iterations = count;
  out.converged = found;
  if (!found) {
    out.failure_reason = FailureReason::nonfinite_objective;
    out.params.assign(d, 0.0);
    for (std::size_t j = 0; j < d; ++j) out.params[j] = box[j].lo;
  }
  return out;
}

BaselineResult fisher_scoring_logbinom(const RegressionData& data, std::span<const double> init,
                                       const FisherOptions& options) {
  const std::size_t n = data.rows(), p = data.cols();
  if (init.size() != p)
    throw ContractViolation("fisher_scoring_logbinom: init has the wrong dimension");

  BaselineResult out;
  out.params.assign(init.begin(), init.end());
  auto admissible = [&](std::span<const double> b) {
    for (std::size_t i = 0; i < n; ++i)
      if (!(data.linear_predictor(i, b) < 0.0)) return false;
    return true;
  };
  auto finish = [&](std::optional<FailureReason> reason) {
    out.failure_reason = reason;
    out.converged = !reason;
    out.objective_value = loglik_logbinom(out.params, data);
    return out;
  };
  if (!admissible(out.params)) return finish(FailureReason::inadmissible_step);

  Eigen::VectorXd beta = Eigen::Map<const Eigen::VectorXd>(init.data(), static_cast<Eigen::Index>(p));
  std::vector<double> trial(p);
  for (std::size_t it = 1; it <= options.max_iter; ++it) {
    out.iterations = it;
    Eigen::VectorXd score = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(p));
    Eigen::MatrixXd info = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(p), static_cast<Eigen::Index>(p));
    for (std::size_t i = 0; i < n; ++i) {
      Eigen::VectorXd xi(static_cast<Eigen::Index>(p));
      for (std::size_t j = 0; j < p; ++j) xi[static_cast<Eigen::Index>(j)] = data.x(i, j);
      const double eta = xi.dot(beta);
      const double pi = std::exp(eta);
      const double one_minus = -std::expm1(eta);
      const double ni = data.trials()[i];
      score += xi * ((data.y()[i] - ni * pi) / one_minus);
      info += (ni * pi / one_minus) * (xi * xi.transpose());
    }
    Eigen::LDLT<Eigen::MatrixXd> ldlt(info);
    if (ldlt.info() != Eigen::Success || !ldlt.isPositive() ||
        ldlt.vectorD().minCoeff() <= 1e-14 * std::max(1.0, ldlt.vectorD().maxCoeff()))
      return finish(FailureReason::singular_information);
    Eigen::VectorXd step = ldlt.solve(score);
    if (!step.allFinite()) return finish(FailureReason::singular_information);

    bool accepted = false;
    for (std::size_t h = 0; h <= options.max_halvings; ++h) {
      for (std::size_t j = 0; j < p; ++j) trial[j] = beta[static_cast<Eigen::Index>(j)] + step[static_cast<Eigen::Index>(j)];
      if (admissible(trial)) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) return finish(FailureReason::inadmissible_step);

    beta += step;
    out.params.assign(beta.data(), beta.data() + p);
    if (step.lpNorm<Eigen::Infinity>() < options.tol) return finish(std::nullopt);
  }
  return finish(FailureReason::max_iter);
}

}  // namespace psomle
