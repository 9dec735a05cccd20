// Scalar reference kernels.

#include <cmath>
#include <limits>

#include "kernels/backends.hpp"
#include "kernels/scalar_terms.hpp"

namespace psomle::kernels::scalar {
namespace {

double we(double alpha, double beta, double lambda, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  double sum = n * (std::log(alpha) + std::log(beta) + std::log(lambda));
  for (double x : s.x) sum += we_term(alpha, beta, lambda, x);
  return sum;
}

double ew(double alpha, double beta, double lambda, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  const double log_lambda = std::log(lambda);
  double sum = n * (std::log(alpha) + std::log(beta) + beta * log_lambda);
  for (std::size_t i = 0; i < s.x.size(); ++i)
    sum += ew_term(alpha, beta, log_lambda, s.log_x[i]);
  return sum;
}

double ee(double alpha, double lambda, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  double sum = n * (std::log(alpha) + std::log(lambda));
  for (double x : s.x) sum += ee_term(alpha, lambda, x);
  return sum;
}

double wbxii(double alpha, double beta, double scale, double k, double c, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  const double log_scale = std::log(scale);
  double sum = n * (std::log(alpha) + std::log(beta) + std::log(c) + std::log(k) - c * log_scale);
  for (double lx : s.log_x) sum += wbxii_term(alpha, beta, k, c, log_scale, lx);
  return sum;
}

double bbxii(double alpha, double beta, double scale, double k, double c, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  const double log_scale = std::log(scale);
  double sum =
      n * (std::log(c) + std::log(k) - c * log_scale - log_beta_fn(alpha, beta));
  for (double lx : s.log_x) sum += bbxii_term(alpha, beta, k, c, log_scale, lx);
  return sum;
}

double eeiw(double alpha, double beta, double c, SampleView s) {
  const auto n = static_cast<double>(s.x.size());
  double sum = n * (std::log(c) + std::log(alpha) + std::log(beta));
  for (double lx : s.log_x) sum += eeiw_term(alpha, beta, c, lx);
  return sum;
}

double logbinom(std::span<const double> coef, const DesignView& d, LogLink link) {
  double sum = d.log_binomial_constant;
  for (std::size_t i = 0; i < d.rows; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < d.cols; ++j) eta += d.columns[j * d.rows + i] * coef[j];
    if (eta > 0.0) {
      if (link == LogLink::strict) return -std::numeric_limits<double>::infinity();
      eta = 0.0;
    }
    sum += d.successes[i] * eta;
    if (d.failures[i] != 0.0) sum += d.failures[i] * log1mexp(-eta);
  }
  return sum;
}

template <double (*F)(double)>
void map(std::span<const double> in, std::span<double> out) {
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = F(in[i]);
}

double exp_(double v) { return std::exp(v); }
double log_(double v) { return std::log(v); }
double expm1_(double v) { return std::expm1(v); }
double log1p_(double v) { return std::log1p(v); }

}  // namespace

const KernelTable& kernel_table() {
  static const KernelTable t{
      Isa::scalar, we, ew, ee, wbxii, bbxii, eeiw, logbinom,
      map<exp_>, map<log_>, map<expm1_>, map<log1p_>, map<log1mexp>, map<softplus>,
  };
  return t;
}

}  // namespace psomle::kernels::scalar
