// AVX2/FMA kernels: four observations per step, scalar reference terms for the tail.

#include <cmath>
#include <limits>

#include "kernels/avx2_math.hpp"
#include "kernels/backends.hpp"
#include "kernels/scalar_terms.hpp"

namespace psomle::kernels::avx2 {
namespace {

inline V load(const double* p) { return _mm256_loadu_pd(p); }
inline V add(V a, V b) { return _mm256_add_pd(a, b); }
inline V sub(V a, V b) { return _mm256_sub_pd(a, b); }
inline V mul(V a, V b) { return _mm256_mul_pd(a, b); }

double we(double alpha, double beta, double lambda, SampleView s) {
  const std::size_t n = s.x.size();
  double sum = static_cast<double>(n) * (std::log(alpha) + std::log(beta) + std::log(lambda));
  const V va = splat(alpha), vb = splat(beta), vl = splat(lambda), vlb = splat(lambda * beta);
  const V vshape = splat(beta - 1.0);
  const bool shaped = beta != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V x = load(s.x.data() + i);
    const V lx = mul(vl, x);
    const V odds_pow = exp(mul(vb, log(expm1(lx))));
    V term = sub(mul(vlb, x), mul(va, odds_pow));
    if (shaped) term = _mm256_fmadd_pd(vshape, log1mexp(lx), term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::we_term(alpha, beta, lambda, s.x[i]);
  return sum;
}

double ew(double alpha, double beta, double lambda, SampleView s) {
  const std::size_t n = s.x.size();
  const double log_lambda = std::log(lambda);
  double sum = static_cast<double>(n) * (std::log(alpha) + std::log(beta) + beta * log_lambda);
  const V vb = splat(beta), vll = splat(log_lambda), vbm1 = splat(beta - 1.0);
  const V vshape = splat(alpha - 1.0);
  const bool shaped = alpha != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V lx = load(s.log_x.data() + i);
    const V z = exp(mul(vb, add(vll, lx)));
    V term = _mm256_fmsub_pd(vbm1, lx, z);
    if (shaped) term = _mm256_fmadd_pd(vshape, log1mexp(z), term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::ew_term(alpha, beta, log_lambda, s.log_x[i]);
  return sum;
}

double ee(double alpha, double lambda, SampleView s) {
  const std::size_t n = s.x.size();
  double sum = static_cast<double>(n) * (std::log(alpha) + std::log(lambda));
  const V vl = splat(lambda), vshape = splat(alpha - 1.0);
  const bool shaped = alpha != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V lx = mul(vl, load(s.x.data() + i));
    V term = sub(zero(), lx);
    if (shaped) term = _mm256_fmadd_pd(vshape, log1mexp(lx), term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::ee_term(alpha, lambda, s.x[i]);
  return sum;
}

double wbxii(double alpha, double beta, double scale, double k, double c, SampleView s) {
  const std::size_t n = s.x.size();
  const double log_scale = std::log(scale);
  double sum = static_cast<double>(n) *
               (std::log(alpha) + std::log(beta) + std::log(c) + std::log(k) - c * log_scale);
  const V va = splat(alpha), vb = splat(beta), vk = splat(k), vc = splat(c);
  const V vls = splat(log_scale), vcm1 = splat(c - 1.0), v1mk = splat(1.0 - k);
  const V vshape = splat(beta - 1.0);
  const bool shaped = beta != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V lx = load(s.log_x.data() + i);
    const V t = softplus(mul(vc, sub(lx, vls)));
    const V log_u = log(expm1(mul(vk, t)));
    V term = _mm256_fnmadd_pd(v1mk, t, mul(vcm1, lx));
    term = _mm256_fnmadd_pd(va, exp(mul(vb, log_u)), term);
    if (shaped) term = _mm256_fmadd_pd(vshape, log_u, term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::wbxii_term(alpha, beta, k, c, log_scale, s.log_x[i]);
  return sum;
}

double bbxii(double alpha, double beta, double scale, double k, double c, SampleView s) {
  const std::size_t n = s.x.size();
  const double log_scale = std::log(scale);
  double sum = static_cast<double>(n) * (std::log(c) + std::log(k) - c * log_scale -
                                         scalar::log_beta_fn(alpha, beta));
  const V vk = splat(k), vc = splat(c), vls = splat(log_scale), vcm1 = splat(c - 1.0);
  const V vkb1 = splat(k * beta + 1.0), vshape = splat(alpha - 1.0);
  const bool shaped = alpha != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V lx = load(s.log_x.data() + i);
    const V t = softplus(mul(vc, sub(lx, vls)));
    V term = _mm256_fnmadd_pd(vkb1, t, mul(vcm1, lx));
    if (shaped) term = _mm256_fmadd_pd(vshape, log1mexp(mul(vk, t)), term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::bbxii_term(alpha, beta, k, c, log_scale, s.log_x[i]);
  return sum;
}

double eeiw(double alpha, double beta, double c, SampleView s) {
  const std::size_t n = s.x.size();
  double sum = static_cast<double>(n) * (std::log(c) + std::log(alpha) + std::log(beta));
  const V vna = splat(-alpha), vc = splat(c), vap1 = splat(alpha + 1.0);
  const V vshape = splat(beta - 1.0);
  const bool shaped = beta != 1.0;
  V acc = zero();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    const V lx = load(s.log_x.data() + i);
    const V z = mul(vc, exp(mul(vna, lx)));
    V term = sub(zero(), _mm256_fmadd_pd(vap1, lx, z));
    if (shaped) term = _mm256_fmadd_pd(vshape, log1mexp(z), term);
    acc = add(acc, term);
  }
  sum += hsum(acc);
  for (; i < n; ++i) sum += scalar::eeiw_term(alpha, beta, c, s.log_x[i]);
  return sum;
}

double logbinom(std::span<const double> coef, const DesignView& d, LogLink link) {
  const double neg_inf = -std::numeric_limits<double>::infinity();
  double sum = d.log_binomial_constant;
  V acc = zero();
  V violated = zero();
  std::size_t i = 0;
  for (; i + 4 <= d.rows; i += 4) {
    V eta = zero();
    for (std::size_t j = 0; j < d.cols; ++j)
      eta = _mm256_fmadd_pd(load(d.columns + j * d.rows + i), splat(coef[j]), eta);
    violated = _mm256_or_pd(violated, _mm256_cmp_pd(eta, zero(), _CMP_GT_OQ));
    eta = _mm256_min_pd(eta, zero());
    const V fail = load(d.failures.data() + i);
    const V fail_term = select(_mm256_cmp_pd(fail, zero(), _CMP_EQ_OQ), zero(),
                               mul(fail, log1mexp(sub(zero(), eta))));
    acc = add(acc, _mm256_fmadd_pd(load(d.successes.data() + i), eta, fail_term));
  }
  if (link == LogLink::strict && _mm256_movemask_pd(violated) != 0) return neg_inf;
  sum += hsum(acc);
  for (; i < d.rows; ++i) {
    double eta = 0.0;
    for (std::size_t j = 0; j < d.cols; ++j) eta += d.columns[j * d.rows + i] * coef[j];
    if (eta > 0.0) {
      if (link == LogLink::strict) return neg_inf;
      eta = 0.0;
    }
    sum += d.successes[i] * eta;
    if (d.failures[i] != 0.0) sum += d.failures[i] * scalar::log1mexp(-eta);
  }
  return sum;
}

template <V (*F)(V), double (*Ref)(double)>
void map(std::span<const double> in, std::span<double> out) {
  std::size_t i = 0;
  for (; i + 4 <= in.size(); i += 4) _mm256_storeu_pd(out.data() + i, F(load(in.data() + i)));
  for (; i < in.size(); ++i) out[i] = Ref(in[i]);
}

double exp_ref(double v) { return std::exp(v); }
double log_ref(double v) { return std::log(v); }
double expm1_ref(double v) { return std::expm1(v); }
double log1p_ref(double v) { return std::log1p(v); }

}  // namespace

const KernelTable& kernel_table() {
  static const KernelTable t{
      Isa::avx2,
      we,
      ew,
      ee,
      wbxii,
      bbxii,
      eeiw,
      logbinom,
      map<exp, exp_ref>,
      map<log, log_ref>,
      map<expm1, expm1_ref>,
      map<log1p, log1p_ref>,
      map<log1mexp, scalar::log1mexp>,
      map<softplus, scalar::softplus>,
  };
  return t;
}

}  // namespace psomle::kernels::avx2
