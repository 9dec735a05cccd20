#include "psomle/dataset.hpp"

#include <cmath>

#include "psomle/error.hpp"

namespace psomle {

RegressionData RegressionData::from_rows(std::span<const double> design, std::size_t cols,
                                         std::vector<double> y, std::vector<double> trials,
                                         std::vector<std::string> names) {
  const std::size_t n = y.size();
  if (cols == 0) throw DomainError("regression design needs at least one column");
  if (design.size() != n * cols)
    throw DomainError("design has " + std::to_string(design.size()) + " cells, expected " +
                      std::to_string(n) + " x " + std::to_string(cols));
  if (trials.empty()) trials.assign(n, 1.0);
  if (trials.size() != n) throw DomainError("trials length does not match responses");
  if (!names.empty() && names.size() != cols)
    throw DomainError("covariate names do not match column count");

  RegressionData d;
  d.cols_ = cols;
  d.columns_.resize(n * cols);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < cols; ++j) {
      const double v = design[i * cols + j];
      if (!std::isfinite(v))
        throw DomainError("non-finite covariate at row " + std::to_string(i + 1));
      d.columns_[j * n + i] = v;
    }
  d.failures_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (!std::isfinite(y[i]) || !std::isfinite(trials[i]) || trials[i] < 1.0 ||
        std::floor(trials[i]) != trials[i] || y[i] < 0.0 || y[i] > trials[i] ||
        std::floor(y[i]) != y[i])
      throw DomainError("response at row " + std::to_string(i + 1) +
                        " must be an integer in [0, trials]");
    d.failures_[i] = trials[i] - y[i];
    d.log_binomial_constant_ += std::lgamma(trials[i] + 1.0) - std::lgamma(y[i] + 1.0) -
                                std::lgamma(trials[i] - y[i] + 1.0);
  }
  d.y_ = std::move(y);
  d.trials_ = std::move(trials);
  d.names_ = std::move(names);
  return d;
}

bool RegressionData::binary() const {
  for (double t : trials_)
    if (t != 1.0) return false;
  return true;
}

double RegressionData::linear_predictor(std::size_t row, std::span<const double> coef) const {
  double eta = 0.0;
  for (std::size_t j = 0; j < cols_; ++j) eta += x(row, j) * coef[j];
  return eta;
}

RegressionData RegressionData::subset(std::span<const std::size_t> rows) const {
  std::vector<double> design;
  design.reserve(rows.size() * cols_);
  std::vector<double> y, trials;
  for (std::size_t r : rows) {
    if (r >= this->rows()) throw ContractViolation("subset row out of range");
    for (std::size_t j = 0; j < cols_; ++j) design.push_back(x(r, j));
    y.push_back(y_[r]);
    trials.push_back(trials_[r]);
  }
  return from_rows(design, cols_, std::move(y), std::move(trials), names_);
}

kernels::DesignView RegressionData::view() const {
  return {rows(), cols_, columns_.data(), y_, failures_, log_binomial_constant_};
}

std::size_t Dataset::n() const {
  return univariate() ? sample().size() : regression().rows();
}

const std::vector<double>& Dataset::sample() const {
  if (auto* v = std::get_if<std::vector<double>>(&values)) return *v;
  throw DomainError("data set '" + name + "' is a regression table, not a univariate sample");
}

const RegressionData& Dataset::regression() const {
  if (auto* r = std::get_if<RegressionData>(&values)) return *r;
  throw DomainError("data set '" + name + "' is a univariate sample, not a regression table");
}

std::string Dataset::label() const {
  return source == DataSource::builtin ? "builtin:" + name : name;
}

}  // namespace psomle
