#pragma once

// Likelihood families.
//
// The loglik_* functions validate their arguments (DomainError on nonpositive
// parameters or observations) and evaluate through the active kernel variant.
// The logpdf_* functions return a single observation's log-density and are the
// building blocks for pointwise checks.
//
// Model definitions
//   WE    Weibull-G with exponential parent, G(x) = 1 - exp(-lambda x)
//   EW    exponentiated Weibull
//   EE    exponentiated exponential
//   WBXII Weibull-G with Burr-XII parent, G(x) = 1 - (1 + (x/s)^c)^-k
//   BBXII beta-G with Burr-XII parent
//   EEIW  exponentiated exponential - inverse Weibull,
//         f(x) = c a b x^(-a-1) exp(-c x^-a) (1 - exp(-c x^-a))^(b-1)

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "psomle/dataset.hpp"
#include "psomle/objective.hpp"

namespace psomle {

/// Weibull-G cdf 1 - exp(-alpha (G/(1-G))^beta) as a function of the parent cdf value G.
double weibull_g_cdf(double G, double alpha, double beta);

/// 1 - (1 - exp(-c x^-alpha))^beta.
double eeiw_cdf(double x, double alpha, double beta, double c);

double logpdf_we(double x, double alpha, double beta, double lambda);
double logpdf_ew(double x, double alpha, double beta, double lambda);
double logpdf_ee(double x, double alpha, double lambda);
double logpdf_wbxii(double x, double alpha, double beta, double scale, double k, double c);
double logpdf_bbxii(double x, double alpha, double beta, double scale, double k, double c);
double logpdf_eeiw(double x, double alpha, double beta, double c);

double loglik_we(double alpha, double beta, double lambda, std::span<const double> x);
double loglik_ew(double alpha, double beta, double lambda, std::span<const double> x);
double loglik_ee(double alpha, double lambda, std::span<const double> x);
double loglik_wbxii(double alpha, double beta, double scale, double k, double c,
                    std::span<const double> x);
double loglik_bbxii(double alpha, double beta, double scale, double k, double c,
                    std::span<const double> x);
double loglik_eeiw(double alpha, double beta, double c, std::span<const double> x);

/// Log-binomial log-likelihood with log p_i = x_i'b. Returns -inf (not an
/// exception) when b is inadmissible, i.e. x_i'b > 0 for some row or
/// x_i'b = 0 for a row with failures.
double loglik_logbinom(std::span<const double> coef, const RegressionData& data);

/// LASSO objective -l(b) + rho ||b||_1 with log p_i = min(x_i'b, 0); to be
/// minimized. Returns +inf where the clamped likelihood is -inf.
double penalized_logbinom(std::span<const double> coef, const RegressionData& data, double rho);

struct ObjectiveOptions {
  double rho = 0.0;  // LASSO weight for "logbinom-lasso"
};

/// Objective names accepted by make_objective.
const std::vector<std::string>& objective_names();

/// Bind a likelihood family to a data set. All objectives are maximized; the
/// LASSO objective is returned negated. Throws LookupError for unknown names
/// and DomainError when the data set has the wrong shape for the model.
Objective make_objective(std::string_view name, const Dataset& data,
                         const ObjectiveOptions& options = {});

/// Parameter space (names, positivity, default init box) of a model.
/// `regression_cols` sizes the log-binomial spaces.
ParamSpace model_space(std::string_view name, std::size_t regression_cols = 0);

}  // namespace psomle
