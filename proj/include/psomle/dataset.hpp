#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "psomle/kernels.hpp"

namespace psomle {

/// Binomial-response regression data: y_i successes out of n_i trials with
/// covariate row x_i. The design is stored column-major for the kernels.
class RegressionData {
 public:
  RegressionData() = default;

  /// Build from a row-major design (rows x cols). Empty `trials` means Bernoulli
  /// responses. Throws DomainError on shape mismatch, non-finite values, or
  /// responses outside [0, n_i].
  static RegressionData from_rows(std::span<const double> design, std::size_t cols,
                                  std::vector<double> y, std::vector<double> trials = {},
                                  std::vector<std::string> names = {});

  std::size_t rows() const { return y_.size(); }
  std::size_t cols() const { return cols_; }
  double x(std::size_t row, std::size_t col) const { return columns_[col * rows() + row]; }
  std::span<const double> column(std::size_t col) const {
    return {columns_.data() + col * rows(), rows()};
  }
  std::span<const double> y() const { return y_; }
  std::span<const double> trials() const { return trials_; }
  std::span<const double> failures() const { return failures_; }
  const std::vector<std::string>& names() const { return names_; }
  double log_binomial_constant() const { return log_binomial_constant_; }
  bool binary() const;

  /// Linear predictor x_i'b for one row.
  double linear_predictor(std::size_t row, std::span<const double> coef) const;

  /// A new data set holding the listed rows, in the given order.
  RegressionData subset(std::span<const std::size_t> rows) const;

  kernels::DesignView view() const;

  bool operator==(const RegressionData&) const = default;

 private:
  std::size_t cols_ = 0;
  std::vector<double> columns_;
  std::vector<double> y_;
  std::vector<double> trials_;
  std::vector<double> failures_;
  std::vector<std::string> names_;
  double log_binomial_constant_ = 0.0;
};

enum class DataSource { builtin, file, generated };

/// A named data set: a univariate sample or a regression table.
struct Dataset {
  std::string name;
  DataSource source = DataSource::builtin;
  std::variant<std::vector<double>, RegressionData> values;

  bool univariate() const { return std::holds_alternative<std::vector<double>>(values); }
  std::size_t n() const;
  const std::vector<double>& sample() const;
  const RegressionData& regression() const;
  /// "builtin:NAME" for embedded data, otherwise the name (file path).
  std::string label() const;
};

}  // namespace psomle
