#pragma once

// Scripted reproductions of the published result tables.
//
// Table numbers: 1 (WE on glass fibers), 2 (EW and EE on glass fibers),
// 3 (WBXII recast sequence on aluminum coupons), 4 (BBXII recast sequence),
// 7 (EE-IW on the three lifetime data sets).

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "psomle/baseline.hpp"
#include "psomle/dataset.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/swarm.hpp"

namespace psomle {

struct ReproRow {
  std::string label;
  std::optional<double> published;  // value printed in the table
  double obtained = 0.0;
  std::optional<double> threshold;  // pass when obtained >= threshold
  bool pass = true;
  std::vector<double> published_params;
  std::vector<double> params;
  double seconds = 0.0;
  std::string note;
};

struct TableReport {
  int table = 0;
  std::string title;
  std::string dataset;
  std::vector<std::string> param_names;
  std::vector<ReproRow> rows;
  std::vector<FitResult> sequence;   // tables 3 and 4: the recast sequence tested for divergence
  std::vector<FitResult> alternate;  // table 4: the swarm's own search and its recasts
  std::optional<DivergenceReport> divergence;
  std::optional<BaselineResult> nelder_mead;
  std::vector<std::string> expected_divergent;
  double seconds = 0.0;

  bool passed() const;
};

struct ReproduceOptions {
  std::uint64_t seed = 1;
  std::size_t seeds = 5;  // independent runs per row; the best is reported
  std::optional<Dataset> data;  // replaces the builtin sample for tables 1-4
  std::size_t threads = 1;
};

/// Tables accepted by reproduce_table.
const std::vector<int>& reproducible_tables();

/// Run the protocol of one table. Throws ConfigError for an unknown table or
/// a data override on table 7.
TableReport reproduce_table(int table, const ReproduceOptions& options = {});

/// Best of `seeds` runs of `config`, seeds derived from config.seed.
FitResult best_of_seeds(const Objective& objective, const SwarmConfig& config, std::size_t seeds);

/// Swarm settings for the distribution fits: linear inertia, c1 = c2 = 2,
/// positions kept in [0, inf) with negatives redrawn from [0, 0.5].
SwarmConfig distribution_swarm(std::size_t dimension, std::size_t swarm, std::size_t iterations,
                               std::uint64_t seed);

/// Side-by-side listing of published and obtained values.
void print_report(const TableReport& report, std::ostream& out);

}  // namespace psomle
