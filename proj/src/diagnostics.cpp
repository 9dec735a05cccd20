#include "psomle/diagnostics.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "psomle/error.hpp"
#include "psomle/parallel.hpp"

namespace psomle {

std::string_view to_string(Trend trend) {
  switch (trend) {
    case Trend::stable: return "stable";
    case Trend::divergent_up: return "divergent_up";
    case Trend::divergent_down: return "divergent_down";
  }
  return "unknown";
}

std::vector<std::string> DivergenceReport::divergent() const {
  std::vector<std::string> out;
  for (const auto& p : parameters)
    if (p.classification != Trend::stable) out.push_back(p.name);
  return out;
}

DivergenceReport detect_divergence(std::span<const FitResult> sequence,
                                   std::vector<std::string> names, double rel_change_threshold,
                                   double fitness_flat_threshold) {
  if (sequence.size() < 3)
    throw InsufficientEvidence("divergence detection needs at least three runs, got " +
                               std::to_string(sequence.size()));
  const std::size_t D = sequence.front().best_params.size();
  for (const auto& r : sequence)
    if (r.best_params.size() != D)
      throw ContractViolation("recast runs have different parameter dimensions");
  if (names.empty())
    for (std::size_t j = 0; j < D; ++j) names.push_back("p" + std::to_string(j));
  if (names.size() != D) throw ContractViolation("parameter names do not match the dimension");

  DivergenceReport report;
  report.rel_change_threshold = rel_change_threshold;
  report.fitness_flat_threshold = fitness_flat_threshold;
  for (std::size_t r = 1; r < sequence.size(); ++r)
    if (sequence[r].best_fitness < sequence[r - 1].best_fitness) report.fitness_nondecreasing = false;

  const auto window = sequence.last(3);
  report.fitness_span = std::fabs(window[2].best_fitness - window[0].best_fitness);
  const bool flat = report.fitness_span < fitness_flat_threshold;

  for (std::size_t j = 0; j < D; ++j) {
    ParameterEvidence ev;
    ev.name = names[j];
    for (const auto& r : window) ev.window.push_back(r.best_params[j]);
    const double a = ev.window[0], b = ev.window[1], c = ev.window[2];
    const bool up = a < b && b < c;
    const bool down = a > b && b > c;
    ev.monotone = up || down;
    const double denom = std::min(std::fabs(a), std::fabs(c));
    ev.relative_change = denom > 0.0 ? std::fabs(c - a) / denom
                                     : (c == a ? 0.0 : std::numeric_limits<double>::infinity());
    if (flat && ev.monotone && ev.relative_change > rel_change_threshold)
      ev.classification = up ? Trend::divergent_up : Trend::divergent_down;
    report.parameters.push_back(std::move(ev));
  }
  return report;
}

std::size_t ProfileGrid::flagged_count() const {
  return static_cast<std::size_t>(std::count(flagged.begin(), flagged.end(), 1));
}

ProfileGrid profile_loglik_grid(const Objective& objective,
                                const std::vector<std::pair<std::string, double>>& fixed,
                                const ProfileAxis& axis1, const ProfileAxis& axis2,
                                std::size_t threads) {
  const auto& space = objective.space();
  const std::size_t D = space.dimension();
  std::vector<int> seen(D, 0);
  std::vector<double> base(D, 0.0);
  auto mark = [&](const std::string& name) {
    auto idx = space.index_of(name);
    if (!idx) throw ConfigError("unknown parameter '" + name + "' for " + objective.name());
    if (seen[*idx]++) throw ConfigError("parameter '" + name + "' is given more than once");
    return *idx;
  };
  for (const auto& [name, value] : fixed) {
    if (!std::isfinite(value)) throw ConfigError("fixed value for '" + name + "' is not finite");
    base[mark(name)] = value;
  }
  const std::size_t i1 = mark(axis1.name), i2 = mark(axis2.name);
  for (std::size_t j = 0; j < D; ++j)
    if (!seen[j]) throw ConfigError("parameter '" + space.names[j] + "' is neither fixed nor an axis");
  for (const auto* ax : {&axis1, &axis2}) {
    if (ax->grid.empty()) throw ConfigError("axis '" + ax->name + "' has an empty grid");
    for (double v : ax->grid)
      if (!std::isfinite(v)) throw ConfigError("axis '" + ax->name + "' has non-finite points");
  }

  ProfileGrid g;
  g.objective = objective.name();
  g.fixed = fixed;
  g.axis1 = axis1;
  g.axis2 = axis2;
  const std::size_t n1 = axis1.grid.size(), n2 = axis2.grid.size();
  g.values.assign(n1 * n2, kPenalty);
  g.flagged.assign(n1 * n2, 0);
  parallel_for(n1, threads, [&](std::size_t a) {
    std::vector<double> p = base;
    p[i1] = axis1.grid[a];
    for (std::size_t b = 0; b < n2; ++b) {
      p[i2] = axis2.grid[b];
      const double f = objective(p);
      if (std::isfinite(f))
        g.values[a * n2 + b] = f;
      else
        g.flagged[a * n2 + b] = 1;
    }
  });
  return g;
}

std::vector<RidgePoint> ridge_trace(const ProfileGrid& grid) {
  std::vector<RidgePoint> out;
  const std::size_t n1 = grid.axis1.grid.size(), n2 = grid.axis2.grid.size();
  for (std::size_t a = 0; a < n1; ++a) {
    std::size_t best = n2;
    for (std::size_t b = 0; b < n2; ++b)
      if (!grid.is_flagged(a, b) && (best == n2 || grid.at(a, b) > grid.at(a, best))) best = b;
    if (best < n2) out.push_back({grid.axis1.grid[a], grid.axis2.grid[best], grid.at(a, best)});
  }
  return out;
}

FlatStretch longest_flat_stretch(std::span<const RidgePoint> ridge, double tolerance) {
  FlatStretch best;
  for (std::size_t b = 0; b < ridge.size(); ++b) {
    double lo = ridge[b].loglik, hi = ridge[b].loglik;
    for (std::size_t e = b; e < ridge.size(); ++e) {
      lo = std::min(lo, ridge[e].loglik);
      hi = std::max(hi, ridge[e].loglik);
      if (hi - lo >= tolerance) break;
      const double a0 = std::fabs(ridge[b].axis1), a1 = std::fabs(ridge[e].axis1);
      const double factor = a0 > 0.0 ? std::max(a1 / a0, a0 / a1) : 1.0;
      if (factor > best.axis1_factor) best = {b, e, factor, hi - lo};
    }
  }
  return best;
}

Ecdf::Ecdf(std::span<const double> data) : sorted_(data.begin(), data.end()) {
  if (sorted_.empty()) throw DomainError("ecdf of an empty sample");
  for (double v : sorted_)
    if (!std::isfinite(v)) throw DomainError("ecdf data must be finite");
  std::sort(sorted_.begin(), sorted_.end());
}

double Ecdf::operator()(double x) const {
  const auto k = std::upper_bound(sorted_.begin(), sorted_.end(), x) - sorted_.begin();
  return static_cast<double>(k) / static_cast<double>(sorted_.size());
}

std::vector<std::pair<double, double>> Ecdf::steps() const {
  std::vector<std::pair<double, double>> out;
  const auto n = static_cast<double>(sorted_.size());
  for (std::size_t i = 0; i < sorted_.size(); ++i) {
    if (i + 1 < sorted_.size() && sorted_[i + 1] == sorted_[i]) continue;
    out.emplace_back(sorted_[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double cdf_fit_distance(std::span<const double> data, const std::function<double(double)>& cdf,
                        FitDistance kind) {
  const Ecdf e(data);
  const auto& x = e.sorted();
  const auto n = static_cast<double>(x.size());
  double out = 0.0;
  if (kind == FitDistance::kolmogorov_smirnov) {
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double F = cdf(x[i]);
      const double k = static_cast<double>(i);
      out = std::max({out, (k + 1.0) / n - F, F - k / n});
    }
  } else {
    out = 1.0 / (12.0 * n);
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double d = (2.0 * static_cast<double>(i) + 1.0) / (2.0 * n) - cdf(x[i]);
      out += d * d;
    }
  }
  return out;
}

StandardErrors numerical_se(const Objective& objective, std::span<const double> theta,
                            double step) {
  const std::size_t D = objective.dimension();
  if (theta.size() != D) throw ContractViolation("numerical_se: theta has the wrong dimension");
  if (!(step > 0.0)) throw ConfigError("numerical_se: step must be positive");

  StandardErrors out;
  const auto& space = objective.space();
  for (std::size_t j = 0; j < D; ++j) {
    double h = std::max(step, step * std::fabs(theta[j]));
    if (space.positive.size() == D && space.positive[j] && theta[j] > 0.0)
      h = std::min(h, theta[j] / 2.0);
    out.steps.push_back(h);
  }

  std::vector<double> p(theta.begin(), theta.end());
  bool finite = true;
  auto f = [&](std::initializer_list<std::pair<std::size_t, double>> moves) {
    std::copy(theta.begin(), theta.end(), p.begin());
    for (auto [j, d] : moves) p[j] += d;
    const double v = objective(p);
    if (!std::isfinite(v)) finite = false;
    return v;
  };

  const double f0 = f({});
  Eigen::MatrixXd H(static_cast<Eigen::Index>(D), static_cast<Eigen::Index>(D));
  for (std::size_t i = 0; i < D; ++i) {
    const double hi = out.steps[i];
    const auto I = static_cast<Eigen::Index>(i);
    H(I, I) = (f({{i, hi}}) - 2.0 * f0 + f({{i, -hi}})) / (hi * hi);
    for (std::size_t j = i + 1; j < D; ++j) {
      const double hj = out.steps[j];
      const auto J = static_cast<Eigen::Index>(j);
      const double v = (f({{i, hi}, {j, hj}}) - f({{i, hi}, {j, -hj}}) - f({{i, -hi}, {j, hj}}) +
                        f({{i, -hi}, {j, -hj}})) /
                       (4.0 * hi * hj);
      H(I, J) = H(J, I) = v;
    }
  }
  out.hessian.assign(H.data(), H.data() + D * D);
  if (!finite) {
    out.failure = "objective is not finite on the finite-difference stencil";
    return out;
  }

  const Eigen::MatrixXd A = -H;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(A);
  const Eigen::VectorXd ev = eig.eigenvalues();
  out.eigenvalues.assign(ev.data(), ev.data() + D);
  for (double e : out.eigenvalues)
    if (!(e > 0.0)) ++out.nonpositive_eigenvalues;
  if (out.nonpositive_eigenvalues > 0) {
    std::ostringstream msg;
    msg << "negated Hessian is not positive definite: " << out.nonpositive_eigenvalues
        << " nonpositive eigenvalue(s), smallest " << out.eigenvalues.front();
    out.failure = msg.str();
    return out;
  }
  const double cond = out.eigenvalues.back() / out.eigenvalues.front();
  if (!(cond <= 1e12)) {
    std::ostringstream msg;
    msg << "negated Hessian is near singular: condition number " << cond;
    out.failure = msg.str();
    return out;
  }
  const Eigen::MatrixXd cov = eig.eigenvectors() * ev.cwiseInverse().asDiagonal() *
                              eig.eigenvectors().transpose();
  for (std::size_t j = 0; j < D; ++j)
    out.se.push_back(std::sqrt(cov(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(j))));
  out.ok = true;
  return out;
}

double relative_bias(std::span<const double> estimates, double truth) {
  if (truth == 0.0 || !std::isfinite(truth)) throw DomainError("relative bias needs a nonzero truth");
  if (estimates.empty()) throw DomainError("relative bias needs at least one estimate");
  double s = 0.0;
  for (double e : estimates) s += (e - truth) / truth;
  return 100.0 * s / static_cast<double>(estimates.size());
}

}  // namespace psomle
