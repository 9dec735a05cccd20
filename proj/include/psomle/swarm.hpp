#pragma once

// Particle swarm optimization engine.
//
// Maximizes an Objective. Each iteration moves every particle with
//   v <- chi * (phi_t v + c1 u1 (p - x) + c2 u2 (l - x)),   x <- x + v
// where p is the particle's best position and l the best position in its
// neighbourhood (the whole swarm for the global-best topology). Positions that
// leave the bounds are handled by the BoundPolicy; non-finite fitness values
// are replaced by the penalty value.
//
// Random draws come from counter-based streams keyed by (seed, purpose,
// particle, iteration), so results are bit-identical for any thread count.

#include <cstdint>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "psomle/objective.hpp"
#include "psomle/rng.hpp"

namespace psomle {

/// Fitness assigned to any evaluation that is not a finite real number.
inline constexpr double kPenalty = std::numeric_limits<double>::lowest();

enum class InertiaKind { linear, logarithmic, constant };

struct InertiaSchedule {
  InertiaKind kind = InertiaKind::linear;
  double weight = 1.0;  // used by `constant`

  static InertiaSchedule linear() { return {InertiaKind::linear, 1.0}; }
  static InertiaSchedule logarithmic() { return {InertiaKind::logarithmic, 1.0}; }
  static InertiaSchedule constant(double w) { return {InertiaKind::constant, w}; }
  bool operator==(const InertiaSchedule&) const = default;
};

enum class BoundMode { rerandomize_full, rerandomize_near_edge, none_with_penalty };

/// What happens to a coordinate that leaves [L, U].
///
/// rerandomize_full draws uniformly over [L, U]; when the opposite bound is
/// infinite it falls back to the near-edge rule. rerandomize_near_edge draws
/// from [L, L + lower_edge_width] or [U - upper_edge_width, U], clipped to
/// [L, U]. none_with_penalty leaves the position alone and scores it kPenalty.
struct BoundPolicy {
  BoundMode mode = BoundMode::rerandomize_near_edge;
  double lower_edge_width = 0.5;
  double upper_edge_width = 100.0;
  bool operator==(const BoundPolicy&) const = default;
};

struct Topology {
  enum class Kind { global_best, local_best };
  Kind kind = Kind::global_best;
  std::size_t neighbor_count = 0;  // ring neighbours for local_best

  static Topology global() { return {}; }
  static Topology local(std::size_t k) { return {Kind::local_best, k}; }
  bool operator==(const Topology&) const = default;
};

enum class VelocityInit { zero, uniform };

/// Stop early when the global best has not improved by more than `tolerance`
/// over the last `window` iterations.
struct StagnationStop {
  std::size_t window = 50;
  double tolerance = 0.0;
  bool operator==(const StagnationStop&) const = default;
};

struct SwarmConfig {
  std::size_t swarm_size = 100;
  std::size_t max_iterations = 200;
  double c1 = 2.0;
  double c2 = 2.0;
  double constriction = 1.0;
  InertiaSchedule inertia = InertiaSchedule::linear();
  /// Per-dimension feasible region. Empty means unbounded; infinite ends allowed.
  std::vector<Interval> bounds;
  BoundPolicy bound_policy;
  Topology topology;
  std::uint64_t seed = 1;
  /// Per-dimension box for initial positions. Empty means the objective's default box.
  std::vector<Interval> init_box;
  bool per_dimension_draws = false;
  VelocityInit velocity_init = VelocityInit::zero;
  std::optional<double> v_max;
  std::optional<StagnationStop> stagnation;
  std::size_t threads = 1;

  /// Throws ConfigError describing the first violated invariant.
  void validate(std::size_t dimension) const;
  bool operator==(const SwarmConfig&) const = default;
};

struct TracePoint {
  std::size_t iteration = 0;
  double fitness = 0.0;
  bool operator==(const TracePoint&) const = default;
};

struct FitResult {
  std::vector<double> best_params;
  double best_fitness = kPenalty;
  std::vector<TracePoint> trace;  // starts at iteration 0 (initial swarm)
  SwarmConfig config;             // resolved config, init box and bounds filled in
  std::uint64_t evaluations = 0;
  std::uint64_t nonfinite_evaluations = 0;
  std::string objective;
  std::string data_source;
  bool operator==(const FitResult&) const = default;
};

/// Swarm snapshot handed to an observer after each iteration's best update.
/// Matrices are row-major, one row of `dimension` values per particle.
struct IterationView {
  std::size_t iteration;
  std::size_t dimension;
  std::span<const double> positions;
  std::span<const double> velocities;
  std::span<const double> fitness;
  std::span<const double> personal_best_positions;
  std::span<const double> personal_best_fitness;
  std::span<const double> global_best;
  double global_best_fitness;
};

using Observer = std::function<void(const IterationView&)>;

std::vector<double> position_update(std::span<const double> x, std::span<const double> v);

std::vector<double> velocity_update(std::span<const double> v, std::span<const double> x,
                                    std::span<const double> p, std::span<const double> g,
                                    double phi, double c1, double c2, double u1, double u2,
                                    double chi = 1.0);

/// Inertia weight at iteration t of M. Throws ContractViolation when t is out of range.
double inertia(std::size_t t, std::size_t M, const InertiaSchedule& schedule);

/// Map out-of-bounds coordinates back per the policy. `bounds` must match x.
std::vector<double> apply_bounds(std::span<const double> x, std::span<const Interval> bounds,
                                 const BoundPolicy& policy, CounterRng& rng);

/// Objective value with non-finite results replaced by kPenalty. Increments
/// `*nonfinite` when a replacement happens.
double evaluate_fitness(const Objective& objective, std::span<const double> x,
                        std::uint64_t* nonfinite = nullptr);

/// Run the swarm. Throws ConfigError on invalid configuration or a dimension mismatch.
FitResult run_pso(const Objective& objective, const SwarmConfig& config,
                  const Observer& observer = {});

/// Config for a follow-up run initialized in a relative box around prev.best_params.
///
/// Each dimension gets [(1 - w) theta, (1 + w) theta]; a zero estimate gets
/// [-e, e] intersected with the bounds, e being the lower edge width. Upper
/// bounds are dropped; lower bounds stay. `overrides` replace the box of the
/// listed dimensions. Throws ConfigError unless 0 < rel_width < 1.
SwarmConfig recast_config(const FitResult& prev, double rel_width,
                          const std::map<std::size_t, Interval>& overrides = {});

}  // namespace psomle
