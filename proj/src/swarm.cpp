#include "psomle/swarm.hpp"

#include <algorithm>
#include <cmath>

#include "psomle/error.hpp"
#include "psomle/parallel.hpp"

namespace psomle {
namespace {

// Stream purposes for the counter-based generator.
enum Stream : std::uint64_t { kInit = 1, kVelocityInit = 2, kMove = 3, kBounds = 4 };

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_same_size(std::size_t a, std::size_t b, const char* what) {
  if (a != b)
    throw ContractViolation(std::string(what) + ": dimension mismatch (" + std::to_string(a) +
                            " vs " + std::to_string(b) + ")");
}

double draw_in(CounterRng& rng, double lo, double hi) { return rng.uniform(lo, hi); }

double rebound(double x, Interval b, const BoundPolicy& policy, CounterRng& rng) {
  if (b.contains(x)) return x;
  if (std::isnan(x)) x = b.lo > -kInf ? b.lo - 1.0 : b.hi + 1.0;
  const bool below = x < b.lo;
  if (policy.mode == BoundMode::rerandomize_full && b.finite()) return draw_in(rng, b.lo, b.hi);
  if (below) return draw_in(rng, b.lo, std::min(b.hi, b.lo + policy.lower_edge_width));
  return draw_in(rng, std::max(b.lo, b.hi - policy.upper_edge_width), b.hi);
}

bool in_bounds(std::span<const double> x, std::span<const Interval> bounds) {
  for (std::size_t j = 0; j < bounds.size(); ++j)
    if (!bounds[j].contains(x[j])) return false;
  return true;
}

}  // namespace

void SwarmConfig::validate(std::size_t dimension) const {
  if (swarm_size < 2) throw ConfigError("swarm_size must be at least 2");
  if (max_iterations < 1) throw ConfigError("max_iterations must be at least 1");
  if (!(c1 >= 0.0) || !(c2 >= 0.0) || !std::isfinite(c1) || !std::isfinite(c2))
    throw ConfigError("c1 and c2 must be finite and nonnegative");
  if (!(constriction > 0.0) || !std::isfinite(constriction))
    throw ConfigError("constriction must be positive");
  if (inertia.kind == InertiaKind::constant && !std::isfinite(inertia.weight))
    throw ConfigError("constant inertia weight must be finite");
  if (!bounds.empty()) {
    if (bounds.size() != dimension)
      throw ConfigError("bounds have " + std::to_string(bounds.size()) +
                        " dimensions, objective has " + std::to_string(dimension));
    for (std::size_t j = 0; j < bounds.size(); ++j)
      if (!(bounds[j].lo < bounds[j].hi))
        throw ConfigError("bounds for dimension " + std::to_string(j) + " must satisfy L < U");
  }
  if (!(bound_policy.lower_edge_width > 0.0) || !(bound_policy.upper_edge_width > 0.0))
    throw ConfigError("bound policy edge widths must be positive");
  if (!init_box.empty()) {
    if (init_box.size() != dimension)
      throw ConfigError("init box has " + std::to_string(init_box.size()) +
                        " dimensions, objective has " + std::to_string(dimension));
    for (std::size_t j = 0; j < init_box.size(); ++j)
      if (!init_box[j].finite() || init_box[j].lo > init_box[j].hi)
        throw ConfigError("init box for dimension " + std::to_string(j) +
                          " must be a finite interval");
  }
  if (topology.kind == Topology::Kind::local_best &&
      (topology.neighbor_count < 1 || topology.neighbor_count >= swarm_size))
    throw ConfigError("local-best neighbor_count must be in [1, swarm_size)");
  if (v_max && !(*v_max > 0.0)) throw ConfigError("v_max must be positive");
  if (stagnation && stagnation->window < 1) throw ConfigError("stagnation window must be >= 1");
}

std::vector<double> position_update(std::span<const double> x, std::span<const double> v) {
  check_same_size(x.size(), v.size(), "position_update");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j) out[j] = x[j] + v[j];
  return out;
}

std::vector<double> velocity_update(std::span<const double> v, std::span<const double> x,
                                    std::span<const double> p, std::span<const double> g,
                                    double phi, double c1, double c2, double u1, double u2,
                                    double chi) {
  check_same_size(v.size(), x.size(), "velocity_update");
  check_same_size(p.size(), x.size(), "velocity_update");
  check_same_size(g.size(), x.size(), "velocity_update");
  std::vector<double> out(x.size());
  for (std::size_t j = 0; j < x.size(); ++j)
    out[j] = chi * (phi * v[j] + c1 * u1 * (p[j] - x[j]) + c2 * u2 * (g[j] - x[j]));
  return out;
}

double inertia(std::size_t t, std::size_t M, const InertiaSchedule& schedule) {
  if (M < 1) throw ContractViolation("inertia: M must be at least 1");
  if (t > M) throw ContractViolation("inertia: t exceeds M");
  switch (schedule.kind) {
    case InertiaKind::linear:
      return 1.0 - static_cast<double>(t) / static_cast<double>(M);
    case InertiaKind::logarithmic:
      if (t < 1) throw ContractViolation("inertia: logarithmic schedule starts at t = 1");
      if (M == 1) return 0.0;
      return 1.0 - std::log(static_cast<double>(t)) / std::log(static_cast<double>(M));
    case InertiaKind::constant:
      return schedule.weight;
  }
  return 0.0;
}

std::vector<double> apply_bounds(std::span<const double> x, std::span<const Interval> bounds,
                                 const BoundPolicy& policy, CounterRng& rng) {
  check_same_size(x.size(), bounds.size(), "apply_bounds");
  std::vector<double> out(x.begin(), x.end());
  if (policy.mode == BoundMode::none_with_penalty) return out;
  for (std::size_t j = 0; j < out.size(); ++j) out[j] = rebound(out[j], bounds[j], policy, rng);
  return out;
}

double evaluate_fitness(const Objective& objective, std::span<const double> x,
                        std::uint64_t* nonfinite) {
  const double f = objective(x);
  if (std::isfinite(f)) return f;
  if (nonfinite) ++*nonfinite;
  return kPenalty;
}

FitResult run_pso(const Objective& objective, const SwarmConfig& config,
                  const Observer& observer) {
  const std::size_t D = objective.dimension();
  config.validate(D);

  FitResult result;
  result.objective = objective.name();
  result.config = config;
  SwarmConfig& cfg = result.config;
  if (cfg.init_box.empty()) cfg.init_box = objective.space().default_init_box;
  if (cfg.init_box.size() != D)
    throw ConfigError("objective '" + objective.name() + "' has no default init box");
  if (cfg.bounds.empty()) cfg.bounds.assign(D, Interval{-kInf, kInf});

  const std::size_t N = cfg.swarm_size;
  const std::size_t M = cfg.max_iterations;
  const bool penalize_outside = cfg.bound_policy.mode == BoundMode::none_with_penalty;

  std::vector<double> x(N * D), v(N * D, 0.0), pbest(N * D), fit(N), pfit(N);
  std::vector<std::uint64_t> nonfinite(N, 0);
  auto row = [D](std::vector<double>& m, std::size_t i) { return std::span(m).subspan(i * D, D); };

  for (std::size_t i = 0; i < N; ++i) {
    CounterRng rng(cfg.seed, {kInit, i});
    for (std::size_t j = 0; j < D; ++j) x[i * D + j] = rng.uniform(cfg.init_box[j].lo, cfg.init_box[j].hi);
    auto bounded = apply_bounds(row(x, i), cfg.bounds, cfg.bound_policy, rng);
    std::copy(bounded.begin(), bounded.end(), x.begin() + i * D);
    if (cfg.velocity_init == VelocityInit::uniform) {
      CounterRng vr(cfg.seed, {kVelocityInit, i});
      for (std::size_t j = 0; j < D; ++j) {
        const Interval& b = cfg.bounds[j].finite() ? cfg.bounds[j] : cfg.init_box[j];
        const double span = b.width();
        v[i * D + j] = vr.uniform(-span, span);
      }
    }
  }

  auto evaluate_all = [&] {
    parallel_for(N, cfg.threads, [&](std::size_t i) {
      auto xi = std::span<const double>(x).subspan(i * D, D);
      fit[i] = penalize_outside && !in_bounds(xi, cfg.bounds)
                   ? (++nonfinite[i], kPenalty)
                   : evaluate_fitness(objective, xi, &nonfinite[i]);
    });
    result.evaluations += N;
  };

  evaluate_all();
  pbest = x;
  pfit = fit;
  std::size_t gi = 0;
  for (std::size_t i = 1; i < N; ++i)
    if (pfit[i] > pfit[gi]) gi = i;
  std::vector<double> gbest(pbest.begin() + gi * D, pbest.begin() + (gi + 1) * D);
  double gfit = pfit[gi];
  result.trace.push_back({0, gfit});

  auto notify = [&](std::size_t t) {
    if (!observer) return;
    observer(IterationView{t, D, x, v, fit, pbest, pfit, gbest, gfit});
  };
  notify(0);

  // Ring neighbourhood offsets in visiting order: self, -1, +1, -2, +2, ...
  std::vector<std::ptrdiff_t> offsets{0};
  if (cfg.topology.kind == Topology::Kind::local_best) {
    const std::size_t k = cfg.topology.neighbor_count;
    const std::size_t left = k / 2, right = k - left;
    for (std::size_t r = 1; r <= std::max(left, right); ++r) {
      if (r <= left) offsets.push_back(-static_cast<std::ptrdiff_t>(r));
      if (r <= right) offsets.push_back(static_cast<std::ptrdiff_t>(r));
    }
  }
  std::vector<std::size_t> leader(N, 0);
  std::vector<double> vel(D);

  for (std::size_t t = 1; t <= M; ++t) {
    const double phi = inertia(t, M, cfg.inertia);

    if (cfg.topology.kind == Topology::Kind::local_best) {
      for (std::size_t i = 0; i < N; ++i) {
        std::size_t best = i;
        for (auto off : offsets) {
          const auto n = static_cast<std::ptrdiff_t>(N);
          const auto m = static_cast<std::size_t>(((static_cast<std::ptrdiff_t>(i) + off) % n + n) % n);
          if (pfit[m] > pfit[best]) best = m;
        }
        leader[i] = best;
      }
    }

    for (std::size_t i = 0; i < N; ++i) {
      CounterRng rng(cfg.seed, {kMove, i, t});
      const double* l = cfg.topology.kind == Topology::Kind::local_best
                            ? pbest.data() + leader[i] * D
                            : gbest.data();
      double u1 = rng.uniform(), u2 = rng.uniform();
      for (std::size_t j = 0; j < D; ++j) {
        if (cfg.per_dimension_draws && j > 0) {
          u1 = rng.uniform();
          u2 = rng.uniform();
        }
        const std::size_t ij = i * D + j;
        double vj = cfg.constriction * (phi * v[ij] + cfg.c1 * u1 * (pbest[ij] - x[ij]) +
                                        cfg.c2 * u2 * (l[j] - x[ij]));
        if (cfg.v_max) vj = std::clamp(vj, -*cfg.v_max, *cfg.v_max);
        v[ij] = vj;
        x[ij] += vj;
      }
      if (!penalize_outside) {
        CounterRng brng(cfg.seed, {kBounds, i, t});
        for (std::size_t j = 0; j < D; ++j)
          x[i * D + j] = rebound(x[i * D + j], cfg.bounds[j], cfg.bound_policy, brng);
      }
    }

    evaluate_all();

    for (std::size_t i = 0; i < N; ++i)
      if (fit[i] > pfit[i]) {
        pfit[i] = fit[i];
        std::copy_n(x.begin() + i * D, D, pbest.begin() + i * D);
      }
    for (std::size_t i = 0; i < N; ++i)
      if (pfit[i] > gfit) {
        gfit = pfit[i];
        std::copy_n(pbest.begin() + i * D, D, gbest.begin());
      }
    result.trace.push_back({t, gfit});
    notify(t);

    if (cfg.stagnation && t >= cfg.stagnation->window) {
      const double past = result.trace[t - cfg.stagnation->window].fitness;
      if (gfit - past <= cfg.stagnation->tolerance) break;
    }
  }

  result.best_params = std::move(gbest);
  result.best_fitness = gfit;
  for (auto c : nonfinite) result.nonfinite_evaluations += c;
  return result;
}

SwarmConfig recast_config(const FitResult& prev, double rel_width,
                          const std::map<std::size_t, Interval>& overrides) {
  if (!(rel_width > 0.0 && rel_width < 1.0))
    throw ConfigError("recast rel_width must lie in (0, 1)");
  const std::size_t D = prev.best_params.size();
  if (D == 0) throw ConfigError("recast needs a previous best parameter vector");
  for (double th : prev.best_params)
    if (!std::isfinite(th)) throw ConfigError("recast needs finite previous estimates");

  SwarmConfig cfg = prev.config;
  if (cfg.bounds.empty()) cfg.bounds.assign(D, Interval{-kInf, kInf});
  if (cfg.bounds.size() != D) throw ConfigError("previous config bounds do not match estimates");
  for (auto& b : cfg.bounds) b.hi = kInf;

  cfg.init_box.resize(D);
  for (std::size_t j = 0; j < D; ++j) {
    const double th = prev.best_params[j];
    Interval box{(1.0 - rel_width) * th, (1.0 + rel_width) * th};
    if (box.lo > box.hi) std::swap(box.lo, box.hi);
    if (th == 0.0) {
      const double w = cfg.bound_policy.lower_edge_width;
      box = {std::max(-w, cfg.bounds[j].lo), std::min(w, cfg.bounds[j].hi)};
    }
    cfg.init_box[j] = box;
  }
  for (const auto& [j, box] : overrides) {
    if (j >= D) throw ConfigError("recast override for dimension " + std::to_string(j) +
                                  " is out of range");
    if (!box.finite() || box.lo > box.hi)
      throw ConfigError("recast override must be a finite interval");
    cfg.init_box[j] = box;
  }
  return cfg;
}

}  // namespace psomle
