#include "psomle/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>

#include "kernels/scalar_terms.hpp"
#include "psomle/error.hpp"
#include "psomle/kernels.hpp"

namespace psomle {
namespace {

namespace st = kernels::scalar;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(std::initializer_list<double> params) {
  for (double p : params)
    if (!(p > 0.0) || !std::isfinite(p))
      throw DomainError("distribution parameters must be positive and finite");
}

void require_positive_data(std::span<const double> x) {
  if (x.empty()) throw DomainError("empty sample");
  for (double v : x)
    if (!(v > 0.0) || !std::isfinite(v)) throw DomainError("observations must be positive");
}

bool all_positive(std::span<const double> p) {
  return std::all_of(p.begin(), p.end(), [](double v) { return v > 0.0 && std::isfinite(v); });
}

/// A sample with its logarithms, shared by the closures of one objective.
struct Sample {
  std::vector<double> x;
  std::vector<double> log_x;

  explicit Sample(std::span<const double> values) : x(values.begin(), values.end()) {
    log_x.reserve(x.size());
    for (double v : x) log_x.push_back(std::log(v));
  }
  kernels::SampleView view() const { return {x, log_x}; }
};

double l1_norm(std::span<const double> coef) {
  double s = 0.0;
  for (double b : coef) s += std::fabs(b);
  return s;
}

}  // namespace

double weibull_g_cdf(double G, double alpha, double beta) {
  require_positive({alpha, beta});
  if (!(G >= 0.0 && G <= 1.0)) throw DomainError("parent cdf value must lie in [0, 1]");
  if (G == 1.0) return 1.0;
  return -std::expm1(-alpha * std::pow(G / (1.0 - G), beta));
}

double eeiw_cdf(double x, double alpha, double beta, double c) {
  require_positive({x, alpha, beta, c});
  const double z = c * std::exp(-alpha * std::log(x));
  return -std::expm1(beta * st::log1mexp(z));
}

double logpdf_we(double x, double alpha, double beta, double lambda) {
  require_positive({x, alpha, beta, lambda});
  return std::log(alpha) + std::log(beta) + std::log(lambda) + st::we_term(alpha, beta, lambda, x);
}

double logpdf_ew(double x, double alpha, double beta, double lambda) {
  require_positive({x, alpha, beta, lambda});
  const double log_lambda = std::log(lambda);
  return std::log(alpha) + std::log(beta) + beta * log_lambda +
         st::ew_term(alpha, beta, log_lambda, std::log(x));
}

double logpdf_ee(double x, double alpha, double lambda) {
  require_positive({x, alpha, lambda});
  return std::log(alpha) + std::log(lambda) + st::ee_term(alpha, lambda, x);
}

double logpdf_wbxii(double x, double alpha, double beta, double scale, double k, double c) {
  require_positive({x, alpha, beta, scale, k, c});
  const double log_scale = std::log(scale);
  return std::log(alpha) + std::log(beta) + std::log(c) + std::log(k) - c * log_scale +
         st::wbxii_term(alpha, beta, k, c, log_scale, std::log(x));
}

double logpdf_bbxii(double x, double alpha, double beta, double scale, double k, double c) {
  require_positive({x, alpha, beta, scale, k, c});
  const double log_scale = std::log(scale);
  return std::log(c) + std::log(k) - c * log_scale - st::log_beta_fn(alpha, beta) +
         st::bbxii_term(alpha, beta, k, c, log_scale, std::log(x));
}

double logpdf_eeiw(double x, double alpha, double beta, double c) {
  require_positive({x, alpha, beta, c});
  return std::log(c) + std::log(alpha) + std::log(beta) +
         st::eeiw_term(alpha, beta, c, std::log(x));
}

double loglik_we(double alpha, double beta, double lambda, std::span<const double> x) {
  require_positive({alpha, beta, lambda});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().we(alpha, beta, lambda, s.view());
}

double loglik_ew(double alpha, double beta, double lambda, std::span<const double> x) {
  require_positive({alpha, beta, lambda});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().ew(alpha, beta, lambda, s.view());
}

double loglik_ee(double alpha, double lambda, std::span<const double> x) {
  require_positive({alpha, lambda});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().ee(alpha, lambda, s.view());
}

double loglik_wbxii(double alpha, double beta, double scale, double k, double c,
                    std::span<const double> x) {
  require_positive({alpha, beta, scale, k, c});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().wbxii(alpha, beta, scale, k, c, s.view());
}

double loglik_bbxii(double alpha, double beta, double scale, double k, double c,
                    std::span<const double> x) {
  require_positive({alpha, beta, scale, k, c});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().bbxii(alpha, beta, scale, k, c, s.view());
}

double loglik_eeiw(double alpha, double beta, double c, std::span<const double> x) {
  require_positive({alpha, beta, c});
  require_positive_data(x);
  const Sample s(x);
  return kernels::active().eeiw(alpha, beta, c, s.view());
}

double loglik_logbinom(std::span<const double> coef, const RegressionData& data) {
  if (coef.size() != data.cols())
    throw ContractViolation("coefficient vector has " + std::to_string(coef.size()) +
                            " entries, design has " + std::to_string(data.cols()) + " columns");
  return kernels::active().logbinom(coef, data.view(), kernels::LogLink::strict);
}

double penalized_logbinom(std::span<const double> coef, const RegressionData& data, double rho) {
  if (!(rho >= 0.0)) throw DomainError("rho must be nonnegative");
  if (coef.size() != data.cols())
    throw ContractViolation("coefficient vector has " + std::to_string(coef.size()) +
                            " entries, design has " + std::to_string(data.cols()) + " columns");
  const double l = kernels::active().logbinom(coef, data.view(), kernels::LogLink::clamp_zero);
  if (!std::isfinite(l)) return kInf;
  return -l + rho * l1_norm(coef);
}

const std::vector<std::string>& objective_names() {
  static const std::vector<std::string> names = {"we",       "ew",             "ee",  "wbxii",
                                                 "bbxii",    "logbinom",       "logbinom-lasso",
                                                 "eeiw"};
  return names;
}

ParamSpace model_space(std::string_view name, std::size_t regression_cols) {
  auto positive_space = [](std::vector<std::string> names, std::vector<Interval> box) {
    ParamSpace s;
    s.positive.assign(names.size(), true);
    s.names = std::move(names);
    s.default_init_box = std::move(box);
    return s;
  };
  if (name == "we") return positive_space({"alpha", "beta", "lambda"}, {{0, 4}, {0, 4}, {0, 4}});
  if (name == "ew")
    return positive_space({"alpha", "beta", "lambda"}, {{0, 10}, {0, 10}, {0, 10}});
  if (name == "ee") return positive_space({"alpha", "lambda"}, {{0, 40}, {0, 40}});
  if (name == "wbxii")
    return positive_space({"alpha", "beta", "s", "k", "c"},
                          {{0, 200}, {0, 200}, {0, 200}, {0, 30}, {0, 30}});
  if (name == "bbxii")
    return positive_space({"alpha", "beta", "s", "k", "c"},
                          {{0, 400}, {0, 400}, {0, 400}, {0, 400}, {0, 400}});
  if (name == "eeiw") return positive_space({"alpha", "beta", "c"}, {{0, 5}, {0, 1000}, {0, 100}});
  if (name == "logbinom" || name == "logbinom-lasso") {
    if (regression_cols == 0) throw DomainError("log-binomial space needs the design width");
    ParamSpace s;
    for (std::size_t j = 0; j < regression_cols; ++j) s.names.push_back("b" + std::to_string(j));
    s.positive.assign(regression_cols, false);
    s.default_init_box.assign(regression_cols, {-3.0, 3.0});
    return s;
  }
  std::string valid;
  for (const auto& n : objective_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw LookupError("unknown model '" + std::string(name) + "' (valid: " + valid + ")");
}

Objective make_objective(std::string_view name, const Dataset& data,
                         const ObjectiveOptions& options) {
  const std::string model(name);
  if (model == "logbinom" || model == "logbinom-lasso") {
    if (data.univariate())
      throw DomainError("model '" + model + "' needs a regression data set");
    auto reg = std::make_shared<const RegressionData>(data.regression());
    ParamSpace space = model_space(model, reg->cols());
    if (reg->names().size() == reg->cols())
      for (std::size_t j = 0; j < reg->cols(); ++j) space.names[j] = reg->names()[j];
    if (model == "logbinom")
      return Objective(model, std::move(space), [reg](std::span<const double> b) {
        return kernels::active().logbinom(b, reg->view(), kernels::LogLink::strict);
      });
    if (!(options.rho >= 0.0)) throw DomainError("rho must be nonnegative");
    const double rho = options.rho;
    return Objective(model, std::move(space), [reg, rho](std::span<const double> b) {
      const double l = kernels::active().logbinom(b, reg->view(), kernels::LogLink::clamp_zero);
      return std::isfinite(l) ? l - rho * l1_norm(b) : -kInf;
    });
  }

  ParamSpace space = model_space(model);
  if (!data.univariate()) throw DomainError("model '" + model + "' needs a univariate sample");
  require_positive_data(data.sample());
  auto s = std::make_shared<const Sample>(data.sample());

  // Out-of-domain parameters evaluate to NaN; the swarm engine penalizes them.
  constexpr double nan = std::numeric_limits<double>::quiet_NaN();
  Objective::Fn fn;
  if (model == "we")
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().we(p[0], p[1], p[2], s->view()) : nan;
    };
  else if (model == "ew")
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().ew(p[0], p[1], p[2], s->view()) : nan;
    };
  else if (model == "ee")
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().ee(p[0], p[1], s->view()) : nan;
    };
  else if (model == "wbxii")
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().wbxii(p[0], p[1], p[2], p[3], p[4], s->view())
                             : nan;
    };
  else if (model == "bbxii")
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().bbxii(p[0], p[1], p[2], p[3], p[4], s->view())
                             : nan;
    };
  else
    fn = [s](std::span<const double> p) {
      return all_positive(p) ? kernels::active().eeiw(p[0], p[1], p[2], s->view()) : nan;
    };
  return Objective(model, std::move(space), std::move(fn));
}

}  // namespace psomle
