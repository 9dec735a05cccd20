// Acceptance suite: one PASS/FAIL line per criterion, details indented below.
//
// Usage: acceptance [--data-dir DIR] [--threads N] [--report FILE] [SUITE...]
// Each SUITE is a unit-test executable run for criterion 7. The report is
// also written to FILE (default acceptance_report.txt).

#include <sys/wait.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "psomle/data_io.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/objectives.hpp"
#include "psomle/reproduce.hpp"
#include "psomle/simstudy.hpp"

using namespace psomle;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Outcome {
  bool pass = true;
  std::vector<std::string> details;

  void require(bool ok, std::string what) {
    details.push_back(fmt::format("{} {}", ok ? "ok  " : "FAIL", std::move(what)));
    pass = pass && ok;
  }
  void note(std::string what) { details.push_back("     " + std::move(what)); }
};

struct Source {
  std::string label;
  std::optional<Dataset> data;  // nullopt: the embedded vector
};

std::vector<double> log_grid(double lo, double hi, std::size_t n) {
  std::vector<double> g(n);
  for (std::size_t i = 0; i < n; ++i)
    g[i] = lo * std::pow(hi / lo, static_cast<double>(i) / static_cast<double>(n - 1));
  return g;
}

std::string failed_rows(const TableReport& r) {
  std::string out;
  for (const auto& row : r.rows)
    if (!row.pass) out += (out.empty() ? "" : "; ") + row.label;
  return out.empty() ? "none" : out;
}

TableReport run_table(int table, const Source& src, std::size_t threads) {
  ReproduceOptions o;
  o.data = src.data;
  o.threads = threads;
  return reproduce_table(table, o);
}

// Criteria 1 and 2: a table passes on at least one of the two sample vectors.
Outcome glass_tables(int table, const std::vector<Source>& sources, std::size_t threads,
                     double row_seconds) {
  Outcome out;
  bool any = false;
  for (const auto& src : sources) {
    const TableReport r = run_table(table, src, threads);
    bool fast = true;
    for (const auto& row : r.rows) fast = fast && row.seconds < row_seconds;
    const bool ok = r.passed() && fast;
    any = any || ok;
    out.note(fmt::format("{}: {} in {:.1f} s, failed rows: {}", src.label, ok ? "reproduces" : "does not reproduce",
                         r.seconds, failed_rows(r)));
    for (const auto& row : r.rows)
      if (row.threshold) out.note(fmt::format("  {} obtained {:.7f}, threshold {:.7f}", row.label, row.obtained, *row.threshold));
  }
  out.require(any, "reproduces on at least one glass-fiber vector");
  return out;
}

Outcome burr_tables(const std::vector<Source>& sources, std::size_t threads) {
  Outcome out;
  bool any = false;
  for (const auto& src : sources) {
    bool both = true;
    for (int table : {3, 4}) {
      const TableReport r = run_table(table, src, threads);
      both = both && r.passed();
      std::string found = "-";
      if (r.divergence) {
        found.clear();
        for (const auto& n : r.divergence->divergent()) found += (found.empty() ? "" : ", ") + n;
      }
      out.note(fmt::format("{} table {}: {} in {:.0f} s, best recast fitness {:.6f}, divergent {{{}}}, failed rows: {}",
                           src.label, table, r.passed() ? "PASS" : "FAIL", r.seconds,
                           r.sequence.empty() ? NAN : r.sequence.back().best_fitness, found,
                           failed_rows(r)));
    }
    any = any || both;
  }
  out.require(any, "tables 3 and 4 reproduce on at least one aluminum vector");
  return out;
}

Outcome profile_ridge(const std::vector<Source>& sources, std::size_t threads) {
  Outcome out;
  bool any = false;
  for (const auto& src : sources) {
    const Dataset data = src.data ? *src.data : builtin_dataset("aluminum_coupons");
    const Objective bbxii = make_objective("bbxii", data);
    const ProfileGrid g = profile_loglik_grid(bbxii, {{"alpha", 0.9268}, {"s", 141.583}, {"c", 9.887}},
                                              {"beta", log_grid(10, 200, 30)},
                                              {"k", log_grid(0.005, 0.2, 2000)}, threads);
    const auto ridge = ridge_trace(g);
    const FlatStretch flat = longest_flat_stretch(ridge, 1e-3);
    const bool ok = flat.axis1_factor >= 3.0 && flat.loglik_span < 1e-3;
    any = any || ok;
    out.note(fmt::format("{}: beta {:.4g} -> {:.4g} (factor {:.2f}), log-likelihood span {:.2e}", src.label,
                         ridge[flat.begin].axis1, ridge[flat.end].axis1, flat.axis1_factor, flat.loglik_span));
  }
  out.require(any, "a ridge where beta grows by a factor >= 3 with log-likelihood span < 1e-3");
  return out;
}

Outcome study(std::size_t n, std::size_t threads) {
  Outcome out;
  SimDesign d;
  d.n_per_sample = n;
  StudyOptions o;
  o.threads = threads;
  const auto t0 = Clock::now();
  const StudyReport r = run_comparison_study(d, 200, default_study_swarm(1), o);
  const double secs = seconds_since(t0);
  out.note(fmt::format("n = {} per sample; {} samples generated, {} non-convergent, {} inadmissible stops", n,
                       r.samples_generated, r.nonconvergent, r.inadmissible));
  out.require(r.complete, "200 non-convergent samples harvested");
  out.require(r.nonconvergence_rate >= 0.30 && r.nonconvergence_rate <= 0.50,
              fmt::format("non-convergence rate {:.1f}% in [30%, 50%]", 100 * r.nonconvergence_rate));
  out.require(r.mean_converged_fitness >= -190 && r.mean_converged_fitness <= -140,
              fmt::format("mean classical log-likelihood {:.2f} in [-190, -140]", r.mean_converged_fitness));
  out.require(r.summary.pso_not_worse == r.records.size() && !r.records.empty(),
              fmt::format("swarm not worse on {} of {}", r.summary.pso_not_worse, r.records.size()));
  out.require(r.summary.mean_delta > 0, fmt::format("mean improvement {:.4g} > 0", r.summary.mean_delta));
  out.require(std::fabs(r.summary.relative_bias_pso_b0) <= 5 && std::fabs(r.summary.relative_bias_pso_b1) <= 5,
              fmt::format("swarm relative bias (b0, b1) = ({:.3f}, {:.3f}) within 5 points",
                          r.summary.relative_bias_pso_b0, r.summary.relative_bias_pso_b1));
  out.require(secs < 900, fmt::format("runtime {:.0f} s < 900 s", secs));
  return out;
}

Outcome eeiw(std::size_t threads) {
  Outcome out;
  ReproduceOptions o;
  o.threads = threads;
  const TableReport r = reproduce_table(7, o);
  for (const auto& row : r.rows)
    out.note(fmt::format("{}: {} obtained {:.7g}{}", row.pass ? "ok  " : "FAIL", row.label, row.obtained,
                         row.threshold ? fmt::format(", threshold {:.7g}", *row.threshold) : ""));
  out.require(r.passed(), "fitness thresholds met and swarm KS below the reported-parameter KS");
  return out;
}

Outcome property_suites(const std::vector<std::string>& suites) {
  Outcome out;
  out.require(!suites.empty(), fmt::format("{} property suites given", suites.size()));
  for (const auto& exe : suites) {
    const int status = std::system((exe + " > /dev/null 2>&1").c_str());
    const bool ok = WIFEXITED(status) && WEXITSTATUS(status) == 0;
    out.require(ok, exe);
  }
  return out;
}

Outcome lasso_shrinkage() {
  Outcome out;
  const RegressionData cohort = generate_chd_cohort(1000, 1);
  const std::vector<double> grid{0, 0.05, 0.1, 1, 10, 100};
  const auto path = lasso_path(cohort, grid, default_lasso_swarm(cohort.cols(), 1));
  bool l1_down = true, p_up = true;
  for (std::size_t i = 0; i < path.size(); ++i) {
    out.note(fmt::format("rho {:>6g}: l1 norm {:.6f}, mean p {:.6f}", path[i].rho, path[i].l1_norm, path[i].mean_p));
    if (i > 0) {
      l1_down = l1_down && path[i].l1_norm < path[i - 1].l1_norm;
      p_up = p_up && path[i].mean_p > path[i - 1].mean_p;
    }
  }
  out.require(l1_down, "l1 norm strictly decreasing in rho");
  out.require(p_up, "mean fitted probability strictly increasing in rho");
  out.require(path.back().l1_norm < 0.5 * path.front().l1_norm,
              "l1 norm at rho = 100 below half its unpenalized value");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance suite"};
  std::string data_dir = PSOMLE_TEST_DATA;
  std::size_t threads = 1;
  std::size_t study_n = 470;
  std::string report_path = "acceptance_report.txt";
  std::vector<std::string> suites;
  app.add_option("--report", report_path, "Copy of the report");
  app.add_option("--data-dir", data_dir, "Directory holding the canonical CSV files");
  app.add_option("--threads", threads, "Worker threads");
  app.add_option("--study-n", study_n, "Observations per simulated sample");
  app.add_option("suites", suites, "Unit-test executables for the property criterion");
  CLI11_PARSE(app, argc, argv);

  const std::vector<Source> glass{{"embedded 57-value vector", std::nullopt},
                                  {"canonical 63-value vector", load_csv(data_dir + "/glass_fibers_smith_naylor_63.csv")}};
  const std::vector<Source> aluminum{
      {"embedded 99-value vector", std::nullopt},
      {"canonical 101-value vector", load_csv(data_dir + "/aluminum_birnbaum_saunders_101.csv")}};

  struct Criterion {
    int id;
    std::string title;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria{
      {1, "Table 1 WE fit", [&] { return glass_tables(1, glass, threads, 10.0); }},
      {2, "Table 2 EW and EE fits", [&] { return glass_tables(2, glass, threads, 60.0); }},
      {3, "Tables 3-4 recasts and divergence", [&] { return burr_tables(aluminum, threads); }},
      {4, "flat ridge in the BBXII profile", [&] { return profile_ridge(aluminum, threads); }},
      {5, "log-binomial comparison study", [&] { return study(study_n, threads); }},
      {6, "Table 7 EE-IW fits", [&] { return eeiw(threads); }},
      {7, "property suites", [&] { return property_suites(suites); }},
      {8, "LASSO shrinkage on a synthetic cohort", lasso_shrinkage},
  };

  std::ofstream report(report_path);
  bool all = true;
  for (const auto& c : criteria) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.require(false, fmt::format("error: {}", e.what()));
    }
    all = all && o.pass;
    std::string text = fmt::format("criterion {} {}: {} ({:.1f} s)\n", c.id, o.pass ? "PASS" : "FAIL",
                                   c.title, seconds_since(t0));
    for (const auto& d : o.details) text += "    " + d + '\n';
    std::cout << text << std::flush;
    report << text << std::flush;
  }
  return all ? 0 : 1;
}
