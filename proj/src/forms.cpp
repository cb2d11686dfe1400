#include "hiw/forms.hpp"

#include <cmath>
#include <numbers>

#include "hiw/error.hpp"
#include "hiw/special.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;

}  // namespace

std::int64_t index_gamma0(std::int64_t level) {
  require(level >= 1, "index_gamma0: level must be positive");
  std::int64_t r = level;
  for (auto p : prime_divisors(level)) r = r / p * (p + 1);
  return r;
}

SpaceParams make_space_params(int k, int N, int character_index) {
  if (k < 3) fail(ErrorKind::InvalidArgument, "weight parameter requires k ≥ 3 (got " + std::to_string(k) + ")");
  if (N < 1) fail(ErrorKind::InvalidArgument, "level parameter requires N >= 1");
  SpaceParams p;
  p.k = k;
  p.N = N;
  const auto chars = enumerate_even_characters(p.level());
  if (character_index < 0 || character_index >= static_cast<int>(chars.size()))
    fail(ErrorKind::InvalidArgument, "character index out of range: " + std::to_string(chars.size()) +
                                         " even characters mod " + std::to_string(p.level()));
  p.character_index = character_index;
  p.psi = chars[character_index];
  p.index_i4N = index_gamma0(p.level());
  p.strip_lo = k / 2.0 - 0.25;
  p.strip_hi = k / 2.0 + 0.75;
  return p;
}

cplx QExpansion::evaluate(cplx z) const {
  const cplx q = std::exp(2.0 * kPi * cplx(0.0, 1.0) * z);
  cplx qn = q, sum = constant;
  for (const cplx& c : coeffs) {
    sum += c * qn;
    qn *= q;
  }
  return sum;
}

double QExpansion::tail_error(double y0) const {
  const double r = std::exp(-2.0 * kPi * y0);
  double sum = 0.0;
  for (long n = M() + 1; n < M() + 100000; ++n) {
    const double t = tail_constant * std::pow(static_cast<double>(n), tail_bound_exponent) *
                     std::pow(r, static_cast<double>(n));
    sum += t;
    if (t < 1e-30 * sum || t == 0.0) break;
  }
  return sum;
}

double cusp_growth_exponent(int k) { return k / 2.0 - 1.0 / 28.0 + 1e-3; }

double poincare_tail_bound(int m, const SpaceParams& params, std::int64_t c_max) {
  // trivial bound |K| <= c/2, |J_nu(x)| <= (x/2)^nu / Gamma(nu+1), integral comparison in c
  const double nu = params.k - 0.5;
  const double T0 = static_cast<double>(c_max / params.level());
  const double lead = kPi * std::pow(2.0 * kPi * m / params.level(), nu) / std::tgamma(nu + 1.0);
  return lead * std::pow(T0, 1.0 - nu) / (nu - 1.0);
}

std::vector<QExpansion> poincare_rows(const std::vector<int>& ns, const SpaceParams& params,
                                      int M, std::int64_t c_max) {
  const std::int64_t q = params.level();
  if (c_max < q) fail(ErrorKind::InvalidArgument, "poincare: c_max must be at least 4N");
  require(M >= 1, "poincare: M must be positive");
  for (int n : ns) require(n >= 1, "poincare: index n must be positive");

  const int two_nu = 2 * params.k - 1;
  const double nu = params.k - 0.5;
  const std::vector<std::int64_t> ms(ns.begin(), ns.end());
  std::vector<std::vector<cplx>> acc(ns.size(), std::vector<cplx>(M, 0.0));
  std::vector<double> sq(M + 1);
  for (int m = 1; m <= M; ++m) sq[m] = std::sqrt(static_cast<double>(m));

  for (std::int64_t c = q; c <= c_max; c += q) {
    const KloostermanTable table(c, params.psi, params.k);
    const auto K = table.sums_for_all_n(ms, M + 1);
    const double cd = static_cast<double>(c);
    for (std::size_t r = 0; r < ns.size(); ++r) {
      const double scale = 4.0 * kPi * sq[ns[r]] / cd;
      for (int m = 1; m <= M; ++m) {
        const cplx& k = K[r][c > M ? m : m % c];
        if (k == 0.0) continue;
        acc[r][m - 1] += k * (bessel_j_half(two_nu, scale * sq[m]) / cd);
      }
    }
  }

  const cplx i_pow = std::exp(cplx(0.0, -kPi * params.kappa() / 2.0));  // i^{-k-1/2}
  std::vector<QExpansion> out;
  for (std::size_t r = 0; r < ns.size(); ++r) {
    QExpansion f;
    f.coeffs.resize(M);
    f.coeff_error.resize(M);
    const double n = ns[r];
    for (int m = 1; m <= M; ++m) {
      const double ratio = std::pow(m / n, nu / 2.0);
      f.coeffs[m - 1] = (m == ns[r] ? 1.0 : 0.0) + 2.0 * kPi * i_pow * ratio * acc[r][m - 1];
      f.coeff_error[m - 1] = poincare_tail_bound(m, params, c_max);
    }
    f.tail_bound_exponent = cusp_growth_exponent(params.k);
    double c_est = 0.0;
    for (int m = std::max(1, M / 2); m <= M; ++m)
      c_est = std::max(c_est, std::abs(f.coeffs[m - 1]) / std::pow(m, f.tail_bound_exponent));
    f.tail_constant = 2.0 * c_est;
    out.push_back(std::move(f));
  }
  return out;
}

QExpansion poincare_expansion(int n, const SpaceParams& params, int M, std::int64_t c_max) {
  return poincare_rows({n}, params, M, c_max).front();
}

QExpansion theta_series(int M) {
  require(M >= 1, "theta_series: M must be positive");
  QExpansion f;
  f.constant = 1.0;
  f.coeffs.assign(M, 0.0);
  for (long j = 1; j * j <= M; ++j) f.coeffs[j * j - 1] = 2.0;
  return f;
}

QExpansion weight2_form_F(int M) {
  require(M >= 1, "weight2_form_F: M must be positive");
  QExpansion f;
  f.coeffs.assign(M, 0.0);
  for (long d = 1; d <= M; d += 2)
    for (long n = d; n <= M; n += 2 * d) f.coeffs[n - 1] += static_cast<double>(d);
  return f;
}

QExpansion multiply(const QExpansion& f, const QExpansion& g, int M) {
  QExpansion h;
  h.coeffs.assign(M, 0.0);
  h.constant = f.constant * g.constant;
  for (int n = 1; n <= M; ++n) {
    cplx s = f.constant * g.a(n) + f.a(n) * g.constant;
    for (int j = 1; j < n; ++j) s += f.a(j) * g.a(n - j);
    h.coeffs[n - 1] = s;
  }
  return h;
}

std::vector<QExpansion> theta_ring_cusp_forms(int k, int M) {
  const int B = (2 * k + 1) / 4;
  std::vector<QExpansion> out;
  if (B < 2) return out;
  const QExpansion theta = theta_series(M), F = weight2_form_F(M);
  std::vector<QExpansion> tpow(2 * k + 2), fpow(B + 1);
  tpow[0].constant = 1.0;
  tpow[0].coeffs.assign(M, 0.0);
  fpow[0] = tpow[0];
  for (int j = 1; j <= 2 * k + 1; ++j) tpow[j] = multiply(tpow[j - 1], theta, M);
  for (int b = 1; b <= B; ++b) fpow[b] = multiply(fpow[b - 1], F, M);
  auto monomial = [&](int b) { return multiply(tpow[2 * k + 1 - 4 * b], fpow[b], M); };
  // b = 0 is excluded by the cusp at infinity; the cusp 0 forces sum_b c_b 16^{-b} = 0
  const QExpansion m1 = monomial(1);
  for (int b = 2; b <= B; ++b) {
    QExpansion f = monomial(b);
    const double w = std::pow(16.0, 1 - b);
    for (int n = 0; n < M; ++n) f.coeffs[n] -= w * m1.coeffs[n];
    f.constant -= w * m1.constant;
    f.tail_bound_exponent = cusp_growth_exponent(k);
    out.push_back(std::move(f));
  }
  return out;
}

}  // namespace hiw
