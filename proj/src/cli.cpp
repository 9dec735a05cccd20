#include "psomle/cli.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "psomle/baseline.hpp"
#include "psomle/data_io.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/error.hpp"
#include "psomle/objectives.hpp"
#include "psomle/reproduce.hpp"
#include "psomle/simstudy.hpp"
#include "psomle/swarm.hpp"

namespace psomle::cli {
namespace {


/// Raised for anything the user can fix by changing the command line.
struct UsageError : Error {
  using Error::Error;
};

/// Run a preparation step, reporting library errors as usage errors.
template <class F>
auto usage(F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const UsageError&) {
    throw;
  } catch (const Error& e) {
    throw UsageError(e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    throw UsageError(e.what());
  }
}

double parse_number(std::string_view text, std::string_view what) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end || text.empty())
    throw UsageError(fmt::format("{}: '{}' is not a number", what, text));
  return v;
}

std::vector<std::string> split(std::string_view text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = text.find(sep, start);
    out.emplace_back(text.substr(start, pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::pair<std::string, std::string> split_assignment(std::string_view text, std::string_view flag) {
  const auto eq = text.find('=');
  if (eq == std::string_view::npos || eq == 0)
    throw UsageError(fmt::format("{} expects NAME=VALUE, got '{}'", flag, text));
  return {std::string(text.substr(0, eq)), std::string(text.substr(eq + 1))};
}

/// "name=lo:hi" against a parameter space.
std::pair<std::size_t, Interval> parse_box(std::string_view text, const ParamSpace& space,
                                           std::string_view flag) {
  const auto [name, range] = split_assignment(text, flag);
  const auto parts = split(range, ':');
  if (parts.size() != 2) throw UsageError(fmt::format("{} expects NAME=LO:HI, got '{}'", flag, text));
  const Interval iv{parse_number(parts[0], flag), parse_number(parts[1], flag)};
  if (!(iv.lo < iv.hi)) throw UsageError(fmt::format("{}: empty interval in '{}'", flag, text));
  return {usage([&] { return space.resolve(name); }), iv};
}

BoundPolicy parse_bound_policy(const std::string& text) {
  BoundPolicy p;
  if (text == "near-edge") p.mode = BoundMode::rerandomize_near_edge;
  else if (text == "full") p.mode = BoundMode::rerandomize_full;
  else if (text == "penalty") p.mode = BoundMode::none_with_penalty;
  else throw UsageError("--bound-policy must be near-edge, full or penalty");
  return p;
}

Topology parse_topology(const std::string& text) {
  if (text == "global") return Topology::global();
  if (text.starts_with("local:")) {
    const double k = parse_number(std::string_view(text).substr(6), "--topology");
    if (k < 1 || k != std::floor(k)) throw UsageError("--topology local:K needs a positive integer K");
    return Topology::local(static_cast<std::size_t>(k));
  }
  throw UsageError("--topology must be global or local:K");
}

bool is_regression_model(std::string_view model) {
  return model == "logbinom" || model == "logbinom-lasso";
}

void check_model(const std::string& model) {
  for (const auto& n : objective_names())
    if (n == model) return;
  usage([&] { return model_space(model, 1); });  // throws the lookup error with valid names
}

/// Flags describing a regression CSV.
struct RegressionFlags {
  std::string response;
  std::string trials;
  std::string covariates;
  bool no_intercept = false;

  void add(CLI::App* app) {
    app->add_option("--response", response, "Response column of a regression CSV");
    app->add_option("--trials", trials, "Trials column (default: Bernoulli responses)");
    app->add_option("--covariates", covariates, "Comma-separated covariate columns (default: all others)");
    app->add_flag("--no-intercept", no_intercept, "Do not add an intercept column");
  }

  CsvSchema schema(bool regression) const {
    if (!regression) return UnivariateSchema{};
    if (response.empty()) throw UsageError("regression models need --response");
    RegressionSchema s;
    s.response = response;
    if (!trials.empty()) s.trials = trials;
    if (!covariates.empty()) s.covariates = split(covariates, ',');
    s.add_intercept = !no_intercept;
    return s;
  }
};

/// Flags shared by the commands that run the swarm.
struct SwarmFlags {
  std::size_t swarm = 100;
  std::size_t iters = 200;
  std::uint64_t seed = 1;
  std::vector<std::string> init_box;
  std::string bound_policy = "near-edge";
  std::string topology = "global";
  std::size_t threads = 1;

  void add(CLI::App* app, std::size_t default_swarm, std::size_t default_iters) {
    swarm = default_swarm;
    iters = default_iters;
    app->add_option("--swarm", swarm, "Number of particles")->capture_default_str();
    app->add_option("--iters", iters, "Number of iterations")->capture_default_str();
    app->add_option("--seed", seed, "Random seed")->capture_default_str();
    app->add_option("--init-box", init_box, "Initial box for one parameter, NAME=LO:HI (repeatable)");
    app->add_option("--bound-policy", bound_policy, "near-edge, full or penalty")->capture_default_str();
    app->add_option("--topology", topology, "global or local:K")->capture_default_str();
    app->add_option("--threads", threads, "Worker threads")->capture_default_str();
  }

  /// Section defaults: linear inertia and c1 = c2 = 2 with positions kept
  /// nonnegative for distribution models; the LASSO settings for penalized fits.
  SwarmConfig config(const Objective& obj) const {
    SwarmConfig cfg;
    if (obj.name() == "logbinom-lasso") {
      cfg = default_lasso_swarm(obj.dimension(), seed);
    } else if (obj.name() == "logbinom") {
      cfg.seed = seed;
    } else {
      cfg = distribution_swarm(obj.dimension(), swarm, iters, seed);
    }
    cfg.swarm_size = swarm;
    cfg.max_iterations = iters;
    cfg.bound_policy = parse_bound_policy(bound_policy);
    cfg.topology = parse_topology(topology);
    cfg.threads = threads;
    if (!init_box.empty()) {
      if (cfg.init_box.empty()) cfg.init_box = obj.space().default_init_box;
      for (const auto& b : init_box) {
        const auto [j, iv] = parse_box(b, obj.space(), "--init-box");
        cfg.init_box[j] = iv;
      }
    }
    usage([&] { cfg.validate(obj.dimension()); return 0; });
    return cfg;
  }
};

void print_fit(const FitResult& fit, const ParamSpace& space, std::ostream& out) {
  out << fmt::format("objective {} on {}\n", fit.objective, fit.data_source);
  for (std::size_t j = 0; j < fit.best_params.size(); ++j)
    out << fmt::format("  {:<16} {:.10g}\n", space.names[j], fit.best_params[j]);
  out << fmt::format("fitness {:.10f}\n", fit.best_fitness);
  out << fmt::format("evaluations {}, non-finite {}\n", fit.evaluations, fit.nonfinite_evaluations);
}

void print_baseline(const BaselineResult& b, const FitResult& fit, std::string_view label,
                    std::ostream& out) {
  std::string params;
  for (double v : b.params) params += fmt::format("{}{:.8g}", params.empty() ? "" : ", ", v);
  out << fmt::format("{}: fitness {:.10f} at ({}), {}\n", label, b.objective_value, params,
                     b.converged ? "converged"
                                 : fmt::format("not converged ({})",
                                               b.failure_reason ? to_string(*b.failure_reason)
                                                                : "unknown"));
  out << fmt::format("swarm minus {}: {:.6g}\n", label, fit.best_fitness - b.objective_value);
}

void write_json(const PersistedResult& result, const std::string& path) {
  if (path.empty()) return;
  persist_result(result, path);
  std::cout << "wrote " << path << '\n';
}

// --- fit ------------------------------------------------------------------------

struct FitCmd {
  std::string model;
  std::string data;
  double rho = 0.0;
  std::string baseline;
  std::string out;
  SwarmFlags swarm;
  RegressionFlags reg;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("fit", "Fit a model by particle swarm");
    sub->add_option("--model", model, "Model name")->required();
    sub->add_option("--data", data, "builtin:NAME or a CSV path")->required();
    sub->add_option("--rho", rho, "LASSO weight for logbinom-lasso")->capture_default_str();
    sub->add_option("--baseline", baseline, "Also run a classical optimizer")
        ->check(CLI::IsMember({"nelder-mead", "fisher", "grid"}));
    sub->add_option("--out", out, "Write the FitResult as JSON");
    swarm.add(sub, 100, 200);
    reg.add(sub);
    sub->callback([this] { code = execute(); });
  }

  int code = 0;

  int execute() {
    check_model(model);
    const bool regression = is_regression_model(model);
    const Dataset ds = usage([&] { return resolve_data(data, reg.schema(regression)); });
    if (rho < 0) throw UsageError("--rho must be nonnegative");
    if (baseline == "fisher" && model != "logbinom")
      throw UsageError("--baseline fisher needs --model logbinom");
    const Objective obj = usage([&] { return make_objective(model, ds, {rho}); });
    const SwarmConfig cfg = swarm.config(obj);
    if (baseline == "grid" && obj.dimension() > 4)
      throw UsageError("--baseline grid supports at most four parameters");

    FitResult fit = run_pso(obj, cfg);
    fit.data_source = data;
    print_fit(fit, obj.space(), std::cout);
    std::vector<Interval> box = fit.config.init_box;
    if (!regression)
      for (auto& iv : box) iv.lo = std::max(iv.lo, 1e-3 * iv.hi);
    if (baseline == "fisher") {
      std::vector<double> init(obj.dimension(), 0.0);
      init[0] = -0.1;
      print_baseline(fisher_scoring_logbinom(ds.regression(), init), fit, "fisher scoring",
                     std::cout);
    } else if (baseline == "nelder-mead") {
      print_baseline(nelder_mead_multistart(obj, box, 20, cfg.seed), fit, "nelder-mead best of 20",
                     std::cout);
    } else if (baseline == "grid") {
      const std::size_t points = obj.dimension() <= 2 ? 401 : obj.dimension() == 3 ? 101 : 31;
      print_baseline(brute_force_grid(obj, box, points), fit,
                     fmt::format("grid {} per axis", points), std::cout);
    }
    write_json(fit, out);
    return 0;
  }
};

// --- recast -----------------------------------------------------------------------

struct RecastCmd {
  std::string from;
  std::string data;
  double width = 0.1;
  double rho = 0.0;
  std::size_t iters = 0;
  std::size_t swarm = 0;
  std::uint64_t seed = 1;
  std::vector<std::string> init_box;
  std::string out;
  RegressionFlags reg;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("recast", "Rerun the swarm in a relative box around a previous fit");
    sub->add_option("--from", from, "FitResult JSON to start from")->required();
    sub->add_option("--data", data, "Data source (default: the one recorded in the fit)");
    sub->add_option("--width", width, "Relative half-width of the new box")->capture_default_str();
    sub->add_option("--rho", rho, "LASSO weight for logbinom-lasso")->capture_default_str();
    sub->add_option("--swarm", swarm, "Number of particles (default: as in the fit)");
    sub->add_option("--iters", iters, "Number of iterations (default: as in the fit)");
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--init-box", init_box, "Override the box of one parameter, NAME=LO:HI (repeatable)");
    sub->add_option("--out", out, "Write the FitResult as JSON");
    reg.add(sub);
    sub->callback([this] { code = execute(); });
  }

  int execute() {
    const FitResult prev = usage([&] { return load_fit_result(from); });
    const std::string source = data.empty() ? prev.data_source : data;
    if (source.empty()) throw UsageError("the fit records no data source; pass --data");
    check_model(prev.objective);
    const Dataset ds = usage(
        [&] { return resolve_data(source, reg.schema(is_regression_model(prev.objective))); });
    if (rho < 0) throw UsageError("--rho must be nonnegative");
    const Objective obj = usage([&] { return make_objective(prev.objective, ds, {rho}); });
    if (prev.best_params.size() != obj.dimension())
      throw UsageError("the fit's parameter vector does not match the model");

    std::map<std::size_t, Interval> overrides;
    for (const auto& b : init_box) {
      const auto [j, iv] = parse_box(b, obj.space(), "--init-box");
      overrides[j] = iv;
    }
    SwarmConfig cfg = usage([&] { return recast_config(prev, width, overrides); });
    cfg.seed = seed;
    if (swarm) cfg.swarm_size = swarm;
    if (iters) cfg.max_iterations = iters;
    usage([&] { cfg.validate(obj.dimension()); return 0; });

    FitResult fit = run_pso(obj, cfg);
    fit.data_source = source;
    print_fit(fit, obj.space(), std::cout);
    std::cout << fmt::format("change from previous fit {:.6g}\n", fit.best_fitness - prev.best_fitness);
    write_json(fit, out);
    return 0;
  }
};

// --- profile ------------------------------------------------------------------------

struct ProfileCmd {
  std::string model;
  std::string data;
  std::vector<std::string> fix;
  std::vector<std::string> grid;
  bool log_spacing = false;
  double tolerance = 1e-3;
  std::size_t threads = 1;
  std::string out;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("profile", "Log-likelihood over a two-parameter grid");
    sub->add_option("--model", model, "Model name")->required();
    sub->add_option("--data", data, "builtin:NAME or a CSV path")->required();
    sub->add_option("--fix", fix, "Fixed parameter, NAME=VALUE (repeatable)");
    sub->add_option("--grid", grid, "Grid axis, NAME=LO:HI:N (exactly two)")->required();
    sub->add_flag("--log-spacing", log_spacing, "Space grid points geometrically");
    sub->add_option("--flat-tolerance", tolerance, "Log-likelihood span of a flat ridge")
        ->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sub->add_option("--out", out, "Write the grid (.csv, or JSON otherwise)");
    sub->callback([this] { code = execute(); });
  }

  ProfileAxis parse_axis(const std::string& text) const {
    const auto [name, spec] = split_assignment(text, "--grid");
    const auto parts = split(spec, ':');
    if (parts.size() != 3) throw UsageError(fmt::format("--grid expects NAME=LO:HI:N, got '{}'", text));
    const double lo = parse_number(parts[0], "--grid");
    const double hi = parse_number(parts[1], "--grid");
    const double n = parse_number(parts[2], "--grid");
    if (!(lo < hi) || n < 2 || n != std::floor(n))
      throw UsageError(fmt::format("--grid: need LO < HI and integer N >= 2 in '{}'", text));
    if (log_spacing && !(lo > 0)) throw UsageError("--log-spacing needs a positive lower end");
    ProfileAxis axis{name, {}};
    const auto count = static_cast<std::size_t>(n);
    for (std::size_t i = 0; i < count; ++i) {
      const double t = static_cast<double>(i) / static_cast<double>(count - 1);
      axis.grid.push_back(log_spacing ? lo * std::pow(hi / lo, t) : lo + t * (hi - lo));
    }
    axis.grid.back() = hi;
    return axis;
  }

  int execute() {
    check_model(model);
    if (is_regression_model(model)) throw UsageError("profile supports the univariate models");
    if (grid.size() != 2) throw UsageError("profile needs exactly two --grid axes");
    const Dataset ds = usage([&] { return resolve_data(data); });
    const Objective obj = usage([&] { return make_objective(model, ds); });
    std::vector<std::pair<std::string, double>> fixed;
    for (const auto& f : fix) {
      const auto [name, value] = split_assignment(f, "--fix");
      fixed.emplace_back(name, parse_number(value, "--fix"));
    }
    const ProfileAxis a1 = parse_axis(grid[0]);
    const ProfileAxis a2 = parse_axis(grid[1]);
    const ProfileGrid g = usage([&] { return profile_loglik_grid(obj, fixed, a1, a2, threads); });

    const auto ridge = ridge_trace(g);
    std::cout << fmt::format("{} x {} grid, {} flagged cells\n", a1.grid.size(), a2.grid.size(),
                             g.flagged_count());
    if (!ridge.empty()) {
      const auto best = std::max_element(ridge.begin(), ridge.end(),
                                         [](auto& a, auto& b) { return a.loglik < b.loglik; });
      std::cout << fmt::format("grid maximum {:.10f} at {}={:.6g}, {}={:.6g}\n", best->loglik,
                               a1.name, best->axis1, a2.name, best->axis2);
      const FlatStretch flat = longest_flat_stretch(ridge, tolerance);
      std::cout << fmt::format(
          "flattest ridge stretch: {} from {:.6g} to {:.6g} (factor {:.3g}), log-likelihood span {:.3g}\n",
          a1.name, ridge[flat.begin].axis1, ridge[flat.end].axis1, flat.axis1_factor,
          flat.loglik_span);
    }
    if (!out.empty()) {
      if (std::filesystem::path(out).extension() == ".csv") {
        std::ofstream f(out);
        if (!f) throw Error("cannot write " + out);
        write_profile_csv(g, f);
        std::cout << "wrote " << out << '\n';
      } else {
        write_json(g, out);
      }
    }
    return 0;
  }
};

// --- simulate -----------------------------------------------------------------------

struct SimulateCmd {
  SimDesign design;
  std::size_t target = 200;
  std::size_t swarm = 200;
  std::size_t iters = 1500;
  std::vector<double> init{-0.1, 0.0};
  std::size_t threads = 1;
  std::string out;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("simulate", "Log-binomial study: classical fit versus swarm on failures");
    sub->add_option("--n", design.n_per_sample, "Observations per sample")->capture_default_str();
    sub->add_option("--beta0", design.beta0, "True intercept")->capture_default_str();
    sub->add_option("--beta1", design.beta1, "True slope")->capture_default_str();
    sub->add_option("--target", target, "Non-convergent samples to refit")->capture_default_str();
    sub->add_option("--max-replicates", design.max_replicates, "Cap on generated samples")
        ->capture_default_str();
    sub->add_option("--seed", design.seed, "Random seed")->capture_default_str();
    sub->add_option("--swarm", swarm, "Number of particles")->capture_default_str();
    sub->add_option("--iters", iters, "Number of iterations")->capture_default_str();
    sub->add_option("--baseline-init", init, "Initial (b0, b1) of the classical fit")
        ->expected(2)
        ->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sub->add_option("--out", out, "Write the StudyReport as JSON");
    sub->callback([this] { code = execute(); });
  }

  int execute() {
    usage([&] { design.validate(); return 0; });
    if (target == 0) throw UsageError("--target must be positive");
    SwarmConfig cfg = default_study_swarm(design.seed);
    cfg.swarm_size = swarm;
    cfg.max_iterations = iters;
    usage([&] { cfg.validate(2); return 0; });
    StudyOptions opts;
    opts.baseline_init = init;
    opts.threads = threads;

    const StudyReport r = run_comparison_study(design, target, cfg, opts);
    const auto& s = r.summary;
    std::cout << fmt::format("samples generated {}, non-convergent {} ({:.1f}%), inadmissible stops {}\n",
                             r.samples_generated, r.nonconvergent, 100 * r.nonconvergence_rate,
                             r.inadmissible);
    std::cout << fmt::format("mean classical log-likelihood on converged samples {:.4f}\n",
                             r.mean_converged_fitness);
    std::cout << fmt::format("refit {} of {} requested{}\n", r.records.size(), r.target,
                             r.complete ? "" : " (replicate cap reached)");
    if (!r.records.empty()) {
      std::cout << fmt::format("swarm not worse on {} of {}\n", s.pso_not_worse, r.records.size());
      std::cout << fmt::format("improvement mean {:.4g}, sd {:.4g}, min {:.4g}, max {:.4g}\n",
                               s.mean_delta, s.sd_delta, s.min_delta, s.max_delta);
      std::cout << fmt::format("relative bias (%) swarm b0 {:.3f}, b1 {:.3f}; classical b0 {:.3f}, b1 {:.3f}\n",
                               s.relative_bias_pso_b0, s.relative_bias_pso_b1,
                               s.relative_bias_baseline_b0, s.relative_bias_baseline_b1);
    }
    write_json(r, out);
    return 0;
  }
};

// --- cv -----------------------------------------------------------------------------

struct CvCmd {
  std::string data;
  std::size_t cohort = 1000;
  std::vector<double> rho{0, 0.05, 0.1, 1, 10, 100};
  std::size_t folds = 5;
  std::size_t swarm = 100;
  std::size_t iters = 300;
  std::uint64_t seed = 1;
  std::size_t threads = 1;
  std::string out;
  RegressionFlags reg;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("cv", "Cross-validate the LASSO weight of a log-binomial fit");
    sub->add_option("--data", data, "Regression CSV (default: a synthetic cohort)");
    sub->add_option("--cohort", cohort, "Rows of the synthetic cohort")->capture_default_str();
    sub->add_option("--rho", rho, "Candidate weights")->delimiter(',')->capture_default_str();
    sub->add_option("--folds", folds, "Number of folds")->capture_default_str();
    sub->add_option("--swarm", swarm, "Number of particles")->capture_default_str();
    sub->add_option("--iters", iters, "Number of iterations")->capture_default_str();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sub->add_option("--out", out, "Write rho, mean held-out loss and the full-data fit as CSV");
    reg.add(sub);
    sub->callback([this] { code = execute(); });
  }

  int execute() {
    for (double r : rho)
      if (!(r >= 0)) throw UsageError("--rho values must be nonnegative");
    const RegressionData rd = usage([&] {
      if (data.empty()) return generate_chd_cohort(cohort, seed);
      return resolve_data(data, reg.schema(true)).regression();
    });
    SwarmConfig cfg = default_lasso_swarm(rd.cols(), seed);
    cfg.swarm_size = swarm;
    cfg.max_iterations = iters;
    cfg.threads = threads;
    usage([&] { cfg.validate(rd.cols()); return 0; });
    const CvResult cv = usage([&] { return cross_validate_rho(rd, rho, folds, cfg); });
    for (const auto& w : cv.warnings) std::cerr << "warning: " << w << '\n';

    // Full-data fit at every weight, for the shrinkage path.
    const std::vector<ShrinkagePoint> path = lasso_path(rd, cv.rho_grid, cfg);
    auto point = [&](double r) {
      return *std::find_if(path.begin(), path.end(), [&](const auto& p) { return p.rho == r; });
    };
    std::cout << fmt::format("{:>10} {:>16} {:>12} {:>12}\n", "rho", "heldout loss", "l1 norm",
                             "mean p");
    for (std::size_t i = 0; i < cv.rho_grid.size(); ++i) {
      const ShrinkagePoint p = point(cv.rho_grid[i]);
      std::cout << fmt::format("{:>10g} {:>16.6f} {:>12.6g} {:>12.6f}\n", p.rho, cv.mean_loss[i],
                               p.l1_norm, p.mean_p);
    }
    std::cout << fmt::format("selected rho {}\n", cv.best_rho);
    if (!out.empty()) {
      std::ofstream f(out);
      if (!f) throw Error("cannot write " + out);
      f << "rho,heldout_loss,l1_norm,mean_p\n";
      for (std::size_t i = 0; i < cv.rho_grid.size(); ++i)
        f << fmt::format("{},{},{},{}\n", cv.rho_grid[i], cv.mean_loss[i],
                         point(cv.rho_grid[i]).l1_norm, point(cv.rho_grid[i]).mean_p);
      std::cout << "wrote " << out << '\n';
    }
    return 0;
  }
};

// --- reproduce ----------------------------------------------------------------------

struct ReproduceCmd {
  int table = 0;
  std::uint64_t seed = 1;
  std::size_t seeds = 5;
  std::string data;
  std::size_t threads = 1;
  std::string out;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("reproduce", "Run the protocol of a published table");
    sub->add_option("--table", table, "1, 2, 3, 4 or 7")->required();
    sub->add_option("--seed", seed, "Random seed")->capture_default_str();
    sub->add_option("--seeds", seeds, "Runs per row; the best is reported")->capture_default_str();
    sub->add_option("--data", data, "Replace the builtin sample (tables 1-4)");
    sub->add_option("--threads", threads, "Worker threads")->capture_default_str();
    sub->add_option("--out", out, "Directory for the report and fitted results");
    sub->callback([this] { code = execute(); });
  }

  int execute() {
    const auto& valid = reproducible_tables();
    if (std::find(valid.begin(), valid.end(), table) == valid.end())
      throw UsageError(fmt::format("no protocol for table {} (valid: 1, 2, 3, 4, 7)", table));
    if (seeds == 0) throw UsageError("--seeds must be positive");
    ReproduceOptions opts;
    opts.seed = seed;
    opts.seeds = seeds;
    opts.threads = threads;
    if (!data.empty()) {
      if (table == 7) throw UsageError("table 7 uses its three builtin data sets");
      opts.data = usage([&] { return resolve_data(data); });
    }
    const TableReport report = reproduce_table(table, opts);
    print_report(report, std::cout);
    if (!out.empty()) {
      const std::filesystem::path dir(out);
      std::filesystem::create_directories(dir);
      std::ofstream f(dir / fmt::format("table{}.txt", table));
      if (!f) throw Error("cannot write into " + out);
      print_report(report, f);
      for (std::size_t i = 0; i < report.sequence.size(); ++i)
        persist_result(report.sequence[i], dir / fmt::format("table{}_run{}.json", table, i));
      for (std::size_t i = 0; i < report.alternate.size(); ++i)
        persist_result(report.alternate[i], dir / fmt::format("table{}_search_run{}.json", table, i));
      if (report.divergence)
        persist_result(*report.divergence, dir / fmt::format("table{}_divergence.json", table));
      std::cout << "wrote " << dir.string() << '\n';
    }
    return 0;
  }
};

// --- ecdf-fit -----------------------------------------------------------------------

std::function<double(double)> model_cdf(const std::string& model, const std::vector<double>& p) {
  if (model == "we")
    return [p](double x) { return weibull_g_cdf(-std::expm1(-p[2] * x), p[0], p[1]); };
  if (model == "ew")
    return [p](double x) { return std::pow(-std::expm1(-std::pow(p[2] * x, p[1])), p[0]); };
  if (model == "ee") return [p](double x) { return std::pow(-std::expm1(-p[1] * x), p[0]); };
  if (model == "eeiw") return [p](double x) { return eeiw_cdf(x, p[0], p[1], p[2]); };
  throw UsageError("ecdf-fit supports we, ew, ee and eeiw");
}

struct EcdfFitCmd {
  std::string model;
  std::string data;
  std::string from;
  std::vector<double> params;
  std::vector<double> compare;
  int code = 0;

  void add(CLI::App& app) {
    auto* sub = app.add_subcommand("ecdf-fit", "Distance between the empirical and a fitted cdf");
    sub->add_option("--model", model, "Model name (default: from --from)");
    sub->add_option("--data", data, "builtin:NAME or a CSV path (default: from --from)");
    sub->add_option("--from", from, "FitResult JSON supplying the parameters");
    sub->add_option("--params", params, "Parameters, comma-separated")->delimiter(',');
    sub->add_option("--compare", compare, "Second parameter vector to compare against")
        ->delimiter(',');
    sub->callback([this] { code = execute(); });
  }

  int execute() {
    std::string source = data;
    if (!from.empty()) {
      const FitResult fit = usage([&] { return load_fit_result(from); });
      if (model.empty()) model = fit.objective;
      if (source.empty()) source = fit.data_source;
      if (params.empty()) params = fit.best_params;
    }
    if (model.empty() || source.empty() || params.empty())
      throw UsageError("ecdf-fit needs --model, --data and --params, or --from");
    check_model(model);
    const std::size_t dim = usage([&] { return model_space(model).dimension(); });
    auto check = [&](const std::vector<double>& p, std::string_view flag) {
      if (p.size() != dim) throw UsageError(fmt::format("{} needs {} values", flag, dim));
      for (double v : p)
        if (!(v > 0) || !std::isfinite(v)) throw UsageError(fmt::format("{} must be positive", flag));
    };
    check(params, "--params");
    if (!compare.empty()) check(compare, "--compare");
    const Dataset ds = usage([&] { return resolve_data(source); });
    const auto sample = ds.sample();

    auto report = [&](const std::vector<double>& p, std::string_view label) {
      const auto cdf = model_cdf(model, p);
      const double ks = cdf_fit_distance(sample, cdf, FitDistance::kolmogorov_smirnov);
      const double cvm = cdf_fit_distance(sample, cdf, FitDistance::cramer_von_mises);
      const double ll = make_objective(model, ds)(p);
      std::cout << fmt::format("{:<10} KS {:.6f}  CvM {:.6f}  log-likelihood {:.6f}\n", label, ks,
                               cvm, ll);
      return ks;
    };
    const double ks = report(params, "fit");
    if (!compare.empty()) {
      const double other = report(compare, "compare");
      std::cout << (ks < other ? "fit is closer to the ecdf\n" : "compare is closer to the ecdf\n");
    }
    return 0;
  }
};

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Maximum likelihood estimation by particle swarm optimization", "psomle"};
  app.require_subcommand(1);
  FitCmd fit;
  RecastCmd recast;
  ProfileCmd profile;
  SimulateCmd simulate;
  CvCmd cv;
  ReproduceCmd reproduce;
  EcdfFitCmd ecdf;
  fit.add(app);
  recast.add(app);
  profile.add(app);
  simulate.add(app);
  cv.add(app);
  reproduce.add(app);
  ecdf.add(app);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return fit.code | recast.code | profile.code | simulate.code | cv.code | reproduce.code |
         ecdf.code;
}

}  // namespace psomle::cli
