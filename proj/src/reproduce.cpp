#include "psomle/reproduce.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include <fmt/format.h>

#include "psomle/data_io.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/error.hpp"
#include "psomle/objectives.hpp"
#include "psomle/rng.hpp"

namespace psomle {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::uint64_t kNelderMeadStream = 0x4e4d;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

ReproRow fit_row(std::string label, double published, std::optional<double> threshold,
                 std::vector<double> published_params, const FitResult& fit, double secs) {
  ReproRow row;
  row.label = std::move(label);
  row.published = published;
  row.obtained = fit.best_fitness;
  row.threshold = threshold;
  row.pass = !threshold || fit.best_fitness >= *threshold;
  row.published_params = std::move(published_params);
  row.params = fit.best_params;
  row.seconds = secs;
  return row;
}

Dataset table_data(const ReproduceOptions& options, std::string_view builtin) {
  return options.data ? *options.data : builtin_dataset(builtin);
}

TableReport table1(const ReproduceOptions& options) {
  TableReport report;
  report.table = 1;
  report.title = "Weibull-exponential fits on glass fiber strength";
  const Dataset data = table_data(options, "glass_fibers");
  report.dataset = data.label();
  const Objective obj = make_objective("we", data);
  report.param_names = obj.space().names;

  struct Spec {
    std::size_t swarm, iters;
    std::vector<double> params;
    double ll;
  };
  const std::vector<Spec> specs = {{100, 200, {0.014742, 2.87936, 1.01793}, -14.4020744},
                                   {50, 200, {0.014865, 2.88085, 1.01705}, -14.4020746},
                                   {100, 100, {0.014879, 2.88427, 1.01513}, -14.4020771},
                                   {50, 150, {0.014777, 2.88057, 1.01723}, -14.4020745}};
  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    SwarmConfig cfg = distribution_swarm(3, s.swarm, s.iters, derive_key(options.seed, {1, i}));
    cfg.threads = options.threads;
    const auto start = Clock::now();
    const FitResult fit = best_of_seeds(obj, cfg, options.seeds);
    // The smaller budgets are held to two decimals; only the first row carries
    // the four-decimal requirement.
    const double threshold = i == 0 ? -14.4021 : s.ll - 0.01;
    report.rows.push_back(fit_row(fmt::format("PSO {}/{}", s.swarm, s.iters), s.ll, threshold,
                                  s.params, fit, seconds_since(start)));
    report.rows.back().note = fmt::format("gap to published {:.3g}", fit.best_fitness - s.ll);
  }

  // Parameter agreement of the first row, within 2% per coordinate.
  const ReproRow& first = report.rows.front();
  const std::vector<double> target = {0.0147, 2.879, 1.018};
  ReproRow params;
  params.label = "params within 2% of (0.0147, 2.879, 1.018)";
  params.published_params = target;
  params.params = first.params;
  double worst = 0.0;
  for (std::size_t j = 0; j < target.size(); ++j)
    worst = std::max(worst, std::fabs(first.params[j] - target[j]) / target[j]);
  params.obtained = worst;
  params.pass = worst <= 0.02;
  params.note = fmt::format("largest relative deviation {:.4f}", worst);
  report.rows.push_back(std::move(params));
  return report;
}

TableReport table2(const ReproduceOptions& options) {
  TableReport report;
  report.table = 2;
  report.title = "Exponentiated Weibull and exponentiated exponential fits on glass fiber strength";
  const Dataset data = table_data(options, "glass_fibers");
  report.dataset = data.label();

  const Objective ew = make_objective("ew", data);
  SwarmConfig cfg = distribution_swarm(3, 1000, 1500, derive_key(options.seed, {2, 0}));
  cfg.threads = options.threads;
  auto start = Clock::now();
  FitResult fit = best_of_seeds(ew, cfg, options.seeds);
  report.rows.push_back(fit_row("EW PSO 1000/1500", -14.6755222, -14.6756,
                                {0.671243, 7.28459, 0.58203}, fit, seconds_since(start)));
  report.rows.back().note = "params (alpha, beta, lambda)";

  const Objective ee = make_objective("ee", data);
  cfg = distribution_swarm(2, 1000, 1500, derive_key(options.seed, {2, 1}));
  cfg.threads = options.threads;
  start = Clock::now();
  fit = best_of_seeds(ee, cfg, options.seeds);
  report.rows.push_back(fit_row("EE PSO 1000/1500", -31.38347214, -31.3835, {31.3489, 2.61157},
                                fit, seconds_since(start)));
  report.rows.back().note = "params (alpha, lambda)";
  return report;
}

struct RecastSpec {
  int table;
  std::string model;
  std::vector<Interval> initial_bounds;
  std::vector<double> initial_published;
  double initial_ll;
  std::vector<std::vector<double>> recast_published;
  std::vector<double> recast_ll;
  // When set, `recasts` rounds restart from the published initial estimate and
  // the swarm's own search gets the same number of rounds of its own.
  bool ridge_from_published = false;
  std::size_t recasts = 3;
  double threshold;
  std::string comparator_label;
  double comparator_ll;
  std::vector<std::string> expected_divergent;
};

struct RecastRun {
  const Objective& obj;
  const ReproduceOptions& options;
  std::uint64_t stream;

  FitResult round(const FitResult& prev, std::size_t r) const {
    SwarmConfig next = recast_config(prev, 0.1);
    next.seed = derive_key(options.seed, {stream, r});
    // The fast-decaying schedule leaves most iterations for refinement, which
    // is what lets the best position creep along a flat ridge.
    next.inertia = InertiaSchedule::logarithmic();
    next.threads = options.threads;
    return best_of_seeds(obj, next, options.seeds);
  }
};

TableReport recast_table(const RecastSpec& spec, const ReproduceOptions& options) {
  TableReport report;
  report.table = spec.table;
  report.title = spec.model == "wbxii" ? "Weibull Burr XII recast sequence on aluminum coupons"
                                       : "Beta Burr XII recast sequence on aluminum coupons";
  const Dataset data = table_data(options, "aluminum_coupons");
  report.dataset = data.label();
  const Objective obj = make_objective(spec.model, data);
  report.param_names = obj.space().names;
  report.expected_divergent = spec.expected_divergent;
  const auto table = static_cast<std::uint64_t>(spec.table);

  SwarmConfig cfg = distribution_swarm(5, 1000, 2000, derive_key(options.seed, {table, 0}));
  cfg.bounds = spec.initial_bounds;
  cfg.init_box = spec.initial_bounds;
  cfg.threads = options.threads;
  auto start = Clock::now();
  std::vector<FitResult> search{best_of_seeds(obj, cfg, options.seeds)};
  const std::string prefix = spec.ridge_from_published ? "search: " : "";
  report.rows.push_back(fit_row(prefix + "PSO 1000/2000", spec.initial_ll, std::nullopt,
                                spec.initial_published, search.back(), seconds_since(start)));

  const RecastRun search_run{obj, options, derive_key(table, {1})};
  for (std::size_t r = 0; r < spec.recasts; ++r) {
    const bool last = r + 1 == spec.recasts;
    start = Clock::now();
    search.push_back(search_run.round(search.back(), r));
    report.rows.push_back(fit_row(fmt::format("{}PSO recast {}", prefix, r + 1), spec.recast_ll[r],
                                  last ? std::optional<double>(spec.threshold) : std::nullopt,
                                  spec.recast_published[r], search.back(), seconds_since(start)));
  }

  double best_fitness = search.back().best_fitness;
  if (spec.ridge_from_published) {
    ReproRow mode;
    mode.label = "search: divergent parameters (informational)";
    mode.obtained = search.back().best_fitness;
    const auto d = detect_divergence(search, obj.space().names).divergent();
    std::string listed;
    for (const auto& n : d) listed += (listed.empty() ? "" : ", ") + n;
    mode.note = fmt::format("found {{{}}}", listed);
    report.rows.push_back(std::move(mode));
    report.alternate = search;

    FitResult seed_fit;
    seed_fit.best_params = spec.initial_published;
    seed_fit.best_fitness = obj(spec.initial_published);
    seed_fit.config = cfg;
    seed_fit.objective = obj.name();
    seed_fit.data_source = data.label();
    report.sequence.push_back(seed_fit);
    ReproRow origin;
    origin.label = "ridge: published initial estimate";
    origin.published = spec.initial_ll;
    origin.obtained = seed_fit.best_fitness;
    origin.params = seed_fit.best_params;
    report.rows.push_back(std::move(origin));

    const RecastRun ridge_run{obj, options, derive_key(table, {2})};
    for (std::size_t r = 0; r < spec.recasts; ++r) {
      const bool last = r + 1 == spec.recasts;
      start = Clock::now();
      report.sequence.push_back(ridge_run.round(report.sequence.back(), r));
      report.rows.push_back(fit_row(fmt::format("ridge: PSO recast {}", r + 1), spec.recast_ll[r],
                                    last ? std::optional<double>(spec.threshold) : std::nullopt,
                                    spec.recast_published[r], report.sequence.back(),
                                    seconds_since(start)));
    }
    best_fitness = std::max(best_fitness, report.sequence.back().best_fitness);
  } else {
    report.sequence = std::move(search);
  }

  std::vector<Interval> nm_box = obj.space().default_init_box;
  for (auto& iv : nm_box) iv.lo = std::max(iv.lo, 1e-3 * iv.hi);
  start = Clock::now();
  report.nelder_mead =
      nelder_mead_multistart(obj, nm_box, 20, derive_key(options.seed, {kNelderMeadStream}));
  ReproRow nm;
  nm.label = "Nelder-Mead best of 20 (PSO must exceed)";
  nm.published = spec.comparator_ll;
  nm.obtained = report.nelder_mead->objective_value;
  nm.params = report.nelder_mead->params;
  nm.pass = best_fitness > nm.obtained;
  nm.seconds = seconds_since(start);
  nm.note = fmt::format("published value is {}; best PSO {:.9g}, margin {:.3g}",
                        spec.comparator_label, best_fitness, best_fitness - nm.obtained);
  report.rows.push_back(std::move(nm));

  report.divergence = detect_divergence(report.sequence, obj.space().names);
  ReproRow div;
  div.label = spec.ridge_from_published ? "ridge: divergent parameters" : "divergent parameters";
  const auto found = report.divergence->divergent();
  div.pass = found == spec.expected_divergent;
  div.obtained = report.divergence->fitness_span;
  std::string listed;
  for (const auto& n : found) listed += (listed.empty() ? "" : ", ") + n;
  std::string expected;
  for (const auto& n : spec.expected_divergent) expected += (expected.empty() ? "" : ", ") + n;
  div.note = fmt::format("found {{{}}}, expected {{{}}}", listed, expected);
  report.rows.push_back(std::move(div));
  return report;
}

TableReport table3(const ReproduceOptions& options) {
  RecastSpec spec;
  spec.table = 3;
  spec.model = "wbxii";
  spec.initial_bounds = {{0, 200}, {0, 200}, {0, 200}, {0, 200}, {0, 200}};
  spec.initial_published = {138.96, 0.9214, 143.73, 0.0082, 9.9763};
  spec.initial_ll = -455.09719;
  spec.recast_published = {{672.5, 0.8597, 145.26, 9.93e-4, 10.513},
                           {38417.2, 0.8653, 145.26, 9.68e-6, 10.455},
                           {106321.7, 0.8653, 145.26, 2.98e-6, 10.455}};
  spec.recast_ll = {-455.09113, -455.09099, -455.09099};
  spec.threshold = -455.0911;
  spec.comparator_label = "OPTIM -455.0961";
  spec.comparator_ll = -455.0961;
  spec.expected_divergent = {"alpha", "k"};
  return recast_table(spec, options);
}

TableReport table4(const ReproduceOptions& options) {
  RecastSpec spec;
  spec.table = 4;
  spec.model = "bbxii";
  spec.initial_bounds = {{0, 400}, {0, 400}, {0, 400}, {0, 400}, {0, 400}};
  spec.initial_published = {1.8817, 24.044, 148.698, 0.1537, 6.010};
  spec.initial_ll = -455.34831;
  spec.recast_published = {{0.9268, 23.350, 141.584, 0.06134, 9.887},
                           {0.9268, 36.581, 141.582, 0.03913, 9.888},
                           {0.9267, 40.416, 141.582, 0.03541, 9.888}};
  spec.recast_ll = {-455.104862, -455.104859, -455.104858};
  spec.ridge_from_published = true;
  spec.threshold = -455.1049;
  spec.comparator_label = "OPTIM -455.1083";
  spec.comparator_ll = -455.1083;
  spec.expected_divergent = {"beta", "k"};
  return recast_table(spec, options);
}

TableReport table7(const ReproduceOptions& options) {
  TableReport report;
  report.table = 7;
  report.title = "Exponentiated exponential-inverse Weibull fits";
  report.dataset = "builtin:covid19, builtin:carbon_fibers, builtin:ball_bearings";
  report.param_names = model_space("eeiw").names;

  struct Spec {
    std::string data;
    double ll;
    std::vector<double> params;
    double threshold;
    std::vector<double> reported;
    double reported_ll;
  };
  const std::vector<Spec> specs = {
      {"covid19", 95.371, {1.232, 293.441, 0.271}, 95.37, {1.573, 5.431, 0.040}, 83.970},
      {"carbon_fibers", -141.889, {0.410, 657.059, 9.969}, -141.89, {6.146, 0.108, 0.021},
       -237.205},
      {"ball_bearings", -113.461, {0.694, 16.537, 57.825}, -113.47, {3.951, 0.0641, 2.303},
       -150.318},
      {"ball_bearings_corrected", -113.461, {0.694, 16.537, 57.825}, -kInf,
       {3.951, 0.0641, 2.303}, -150.318}};

  for (std::size_t i = 0; i < specs.size(); ++i) {
    const auto& s = specs[i];
    const Dataset data = builtin_dataset(s.data);
    const Objective obj = make_objective("eeiw", data);
    SwarmConfig cfg = distribution_swarm(3, 1000, 1000, derive_key(options.seed, {7, i}));
    cfg.threads = options.threads;
    const auto start = Clock::now();
    const FitResult fit = best_of_seeds(obj, cfg, options.seeds);
    const bool scored = std::isfinite(s.threshold);
    report.rows.push_back(fit_row(s.data + " PSO 1000/1000", s.ll,
                                  scored ? std::optional<double>(s.threshold) : std::nullopt,
                                  s.params, fit, seconds_since(start)));
    if (!scored) report.rows.back().note = "28.92 in place of the printed 28, 92; not scored";

    const auto sample = data.sample();
    const auto& p = fit.best_params;
    const auto& q = s.reported;
    const double ks_pso = cdf_fit_distance(
        sample, [&](double x) { return eeiw_cdf(x, p[0], p[1], p[2]); });
    const double ks_reported = cdf_fit_distance(
        sample, [&](double x) { return eeiw_cdf(x, q[0], q[1], q[2]); });
    ReproRow ks;
    ks.label = s.data + " KS distance, PSO vs reported";
    ks.published = ks_reported;
    ks.obtained = ks_pso;
    ks.published_params = q;
    ks.params = p;
    ks.pass = !scored || ks_pso < ks_reported;
    ks.note = fmt::format("reported-parameter log-likelihood {}", s.reported_ll);
    report.rows.push_back(std::move(ks));
  }
  return report;
}

std::string format_params(const std::vector<double>& p) {
  std::string s = "(";
  for (std::size_t i = 0; i < p.size(); ++i) s += fmt::format("{}{:.6g}", i ? ", " : "", p[i]);
  return s + ")";
}

}  // namespace

bool TableReport::passed() const {
  return std::all_of(rows.begin(), rows.end(), [](const ReproRow& r) { return r.pass; });
}

const std::vector<int>& reproducible_tables() {
  static const std::vector<int> tables = {1, 2, 3, 4, 7};
  return tables;
}

SwarmConfig distribution_swarm(std::size_t dimension, std::size_t swarm, std::size_t iterations,
                               std::uint64_t seed) {
  SwarmConfig cfg;
  cfg.swarm_size = swarm;
  cfg.max_iterations = iterations;
  cfg.seed = seed;
  cfg.bounds.assign(dimension, {0.0, kInf});
  return cfg;
}

FitResult best_of_seeds(const Objective& objective, const SwarmConfig& config,
                        std::size_t seeds) {
  if (seeds == 0) throw ConfigError("seeds must be positive");
  FitResult best;
  for (std::size_t r = 0; r < seeds; ++r) {
    SwarmConfig cfg = config;
    cfg.seed = r == 0 ? config.seed : derive_key(config.seed, {r});
    FitResult fit = run_pso(objective, cfg);
    if (r == 0 || fit.best_fitness > best.best_fitness) best = std::move(fit);
  }
  return best;
}

TableReport reproduce_table(int table, const ReproduceOptions& options) {
  if (options.seeds == 0) throw ConfigError("seeds must be positive");
  const auto start = Clock::now();
  TableReport report;
  switch (table) {
    case 1: report = table1(options); break;
    case 2: report = table2(options); break;
    case 3: report = table3(options); break;
    case 4: report = table4(options); break;
    case 7:
      if (options.data) throw ConfigError("table 7 uses its three builtin data sets");
      report = table7(options);
      break;
    default:
      throw ConfigError(fmt::format("no protocol for table {} (valid: 1, 2, 3, 4, 7)", table));
  }
  report.seconds = seconds_since(start);
  return report;
}

void print_report(const TableReport& report, std::ostream& out) {
  out << fmt::format("Table {}: {}\n", report.table, report.title);
  out << fmt::format("data: {}\n", report.dataset);
  if (!report.param_names.empty()) {
    std::string names;
    for (const auto& n : report.param_names) names += (names.empty() ? "" : ", ") + n;
    out << fmt::format("parameters: ({})\n", names);
  }
  out << fmt::format("{:<48} {:>16} {:>16} {:>14}  {}\n", "row", "published", "obtained",
                     "threshold", "result");
  for (const auto& r : report.rows) {
    const std::string pub = r.published ? fmt::format("{:.9g}", *r.published) : "-";
    const std::string thr = r.threshold ? fmt::format("{:.9g}", *r.threshold) : "-";
    out << fmt::format("{:<48} {:>16} {:>16.9g} {:>14}  {}\n", r.label, pub, r.obtained, thr,
                       r.pass ? "PASS" : "FAIL");
    if (!r.params.empty()) {
      out << "    obtained  " << format_params(r.params);
      if (!r.published_params.empty()) out << "  published " << format_params(r.published_params);
      out << '\n';
    }
    if (!r.note.empty()) out << "    " << r.note << '\n';
  }
  if (report.divergence) {
    for (const auto& p : report.divergence->parameters)
      out << fmt::format("    {:<6} {:<15} relative change {:.3g}\n", p.name,
                         to_string(p.classification), p.relative_change);
    out << fmt::format("    fitness span over the window {:.3g}\n",
                       report.divergence->fitness_span);
  }
  out << fmt::format("elapsed {:.2f} s, {}\n", report.seconds, report.passed() ? "PASS" : "FAIL");
}

}  // namespace psomle
