#pragma once

// Embedded data sets, CSV ingestion, and JSON persistence of results.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "psomle/dataset.hpp"
#include "psomle/diagnostics.hpp"
#include "psomle/simstudy.hpp"
#include "psomle/swarm.hpp"

namespace psomle {

// --- builtin data -------------------------------------------------------------

/// Names accepted by builtin_dataset, in a fixed order.
const std::vector<std::string>& builtin_names();

/// An embedded sample, exactly as published. Throws LookupError listing the
/// valid names for anything else.
Dataset builtin_dataset(std::string_view name);

// --- CSV ----------------------------------------------------------------------

/// One numeric column as a univariate sample. Empty name: the first column.
struct UnivariateSchema {
  std::string column;
};

/// Binomial regression table. Empty `covariates` means every column other
/// than the response and trials columns.
struct RegressionSchema {
  std::string response;
  std::optional<std::string> trials;
  std::vector<std::string> covariates;
  bool add_intercept = true;
  bool drop_incomplete_rows = false;  // skip rows with empty or NA cells
};

using CsvSchema = std::variant<UnivariateSchema, RegressionSchema>;

/// Parse CSV text with a header row. Cells may be quoted; '.' is the decimal
/// separator. Throws ParseError (with the 1-based line) for a missing column,
/// a non-numeric or non-finite cell, or a ragged row; DomainError when there
/// are no data rows or responses fall outside [0, trials].
Dataset parse_csv(std::string_view text, const CsvSchema& schema, std::string name);

Dataset load_csv(const std::filesystem::path& path, const CsvSchema& schema = UnivariateSchema{});

/// Write a data set as CSV: column "x" for samples, the covariate names plus
/// "y" and "trials" for regression tables.
void write_csv(const Dataset& data, std::ostream& out);

/// "builtin:NAME" or a CSV path.
Dataset resolve_data(std::string_view spec, const CsvSchema& schema = UnivariateSchema{});

/// CSV with columns axis1, axis2, loglik (empty loglik for flagged cells).
void write_profile_csv(const ProfileGrid& grid, std::ostream& out);

/// CSV with columns b0, b1, state.
void write_convergence_map_csv(const ConvergenceMap& map, std::ostream& out);

// --- JSON ---------------------------------------------------------------------

inline constexpr int kSchemaVersion = 1;

using PersistedResult = std::variant<FitResult, StudyReport, DivergenceReport, ProfileGrid>;

std::string to_json(const PersistedResult& result, int indent = 2);

/// Throws ParseError on malformed input and IncompatibleVersion on a schema mismatch.
PersistedResult from_json(std::string_view text);

void persist_result(const PersistedResult& result, const std::filesystem::path& path);
PersistedResult load_result(const std::filesystem::path& path);

/// load_result narrowed to a FitResult; throws ParseError for other kinds.
FitResult load_fit_result(const std::filesystem::path& path);

}  // namespace psomle
