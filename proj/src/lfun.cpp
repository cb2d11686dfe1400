#include "hiw/lfun.hpp"

#include <cmath>
#include <iomanip>
#include <numbers>

#include "hiw/error.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kDerivativeNodes = 64;

// Bound on Gamma(sigma, x) for real sigma.
double upper_gamma_bound(double sigma, double x) {
  if (sigma <= 1.0) return std::pow(x, sigma - 1.0) * std::exp(-x);
  if (x > 2.0 * (sigma - 1.0)) return std::pow(x, sigma - 1.0) * std::exp(-x) / (1.0 - (sigma - 1.0) / x);
  return std::tgamma(sigma);
}

struct SideSum {
  cplx value{0.0, 0.0};
  double tail = 0.0;
  double coeff_err = 0.0;
  int terms = 0;
};

// sum_n c(n) X_n^{-u} Gamma(u, X_n tau), X_n = 2 pi n / sqrt(4N); with derivative in u when asked.
SideSum side_sum(const QExpansion& c, cplx u, double tau, const SpaceParams& params, bool derivative) {
  SideSum out;
  const double unit = 2.0 * kPi / std::sqrt(static_cast<double>(params.level()));
  const double beta = c.tail_bound_exponent;
  const QuadratureRule* gl = derivative ? &gauss_laguerre(kDerivativeNodes) : nullptr;
  double abs_sum = 0.0;
  int n = 1;
  auto growth = [&](int m) { return c.tail_constant * std::pow(static_cast<double>(m), beta); };
  for (; n <= c.M(); ++n) {
    const double X = unit * n;
    const double env = std::pow(X, -u.real()) * upper_gamma_bound(u.real(), X * tau);
    if (n >= 3 && abs_sum > 0.0 && std::max(std::abs(c.a(n)), growth(n)) * env < 1e-20 * abs_sum) break;
    const cplx a = c.a(n);
    const double err = n <= static_cast<int>(c.coeff_error.size()) ? c.coeff_error[n - 1] : 0.0;
    if (a == 0.0 && err == 0.0) continue;
    const cplx xu = std::exp(-u * std::log(X));
    const double x = X * tau;
    cplx term;
    if (derivative) {
      const SpecialValue g = upper_incomplete_gamma(u, x);
      cplx dg = 0.0;
      for (std::size_t i = 0; i < gl->nodes.size(); ++i) {
        const double t = x + gl->nodes[i];
        dg += gl->weights[i] * std::exp((u - 1.0) * std::log(t)) * std::log(t);
      }
      dg *= std::exp(-x);
      term = xu * (dg - std::log(X) * g.value);
    } else {
      term = xu * upper_incomplete_gamma(u, x).value;
    }
    out.value += a * term;
    abs_sum += std::abs(a * term);
    out.coeff_err += err * std::abs(term);
    ++out.terms;
  }
  // remainder from n onward: stored coefficients where present, growth bound beyond M
  for (int m = n; m < n + 200000; ++m) {
    const double X = unit * m;
    double bound = (m <= c.M() ? std::abs(c.a(m)) : growth(m)) * std::pow(X, -u.real()) *
                   upper_gamma_bound(u.real(), X * tau);
    if (derivative) bound *= 1.0 + std::abs(std::log(X)) + std::log(X * tau + 1.0) + 1.0;
    out.tail += bound;
    if (m > c.M() && bound < 1e-30 * (out.tail + abs_sum)) break;
    if (m > c.M() && bound == 0.0) break;
  }
  return out;
}

void check_split(double t0) { require(t0 > 0.0 && std::isfinite(t0), "l_star: split point must be positive"); }

}  // namespace

CompletedLValue l_naive(const QExpansion& f, const SpaceParams& params, cplx s, int M, double margin) {
  const double beta = cusp_growth_exponent(params.k);
  if (!(s.real() > beta + 1.0 + margin))
    fail(ErrorKind::Region, "l_naive: Re s must exceed beta + 1 + margin = " + std::to_string(beta + 1.0 + margin) +
                                "; use l_star inside the critical region");
  require(M >= 1, "l_naive: M must be positive");
  if (M > f.M()) fail(ErrorKind::Truncation, "l_naive: expansion has only " + std::to_string(f.M()) + " coefficients");
  CompletedLValue out;
  out.s = s;
  out.method = "naive-series";
  cplx sum = 0.0;
  double cerr = 0.0;
  for (int n = 1; n <= M; ++n) {
    const cplx ns = std::exp(-s * std::log(static_cast<double>(n)));
    sum += f.a(n) * ns;
    if (n <= static_cast<int>(f.coeff_error.size())) cerr += f.coeff_error[n - 1] * std::abs(ns);
  }
  // sum_{n > M} C n^{beta - sigma} <= C M^{beta - sigma + 1} / (sigma - beta - 1)
  const double ex = s.real() - f.tail_bound_exponent - 1.0;
  const double tail = ex > 0 ? f.tail_constant * std::pow(static_cast<double>(M), -ex) / ex
                             : std::numeric_limits<double>::infinity();
  const cplx pre = std::exp(-s * std::log(2.0 * kPi) + 0.5 * s * std::log(static_cast<double>(params.level()))) *
                   gamma_complex(s).value;
  out.value = pre * sum;
  out.tail_error = std::abs(pre) * tail;
  out.coefficient_error = std::abs(pre) * cerr;
  out.terms = M;
  return out;
}

CompletedLValue l_naive(const EigenformRecord& f, const SpaceParams& params, cplx s, int M) {
  return l_naive(f.expansion, params, s, M);
}

CompletedLValue l_star(const QExpansion& f, const QExpansion& f_fricke, const SpaceParams& params, cplx s,
                       double t0) {
  check_split(t0);
  const SideSum a = side_sum(f, s, t0, params, false);
  const SideSum b = side_sum(f_fricke, params.kappa() - s, 1.0 / t0, params, false);
  CompletedLValue out;
  out.s = s;
  out.method = "incomplete-gamma";
  out.value = a.value + b.value;
  out.tail_error = a.tail + b.tail;
  out.coefficient_error = a.coeff_err + b.coeff_err;
  out.terms = a.terms + b.terms;
  const double scale = std::abs(out.value) + 1e-300;
  if (out.tail_error > 1e-6 * std::max(scale, 1e-8))
    fail(ErrorKind::Truncation, "l_star: truncation tail " + std::to_string(out.tail_error) +
                                    " too large; rebuild the space with a larger M");
  return out;
}

CompletedLValue l_star(const EigenformRecord& f, const SpaceParams& params, cplx s, double t0) {
  return l_star(f.expansion, f.fricke_image, params, s, t0);
}

cplx l_star_derivative(const QExpansion& f, const QExpansion& f_fricke, const SpaceParams& params, cplx s,
                       double t0) {
  check_split(t0);
  const SideSum a = side_sum(f, s, t0, params, true);
  const SideSum b = side_sum(f_fricke, params.kappa() - s, 1.0 / t0, params, true);
  return a.value - b.value;
}

FunctionalEquationReport functional_equation_check(const EigenformRecord& f, const SpaceParams& params, cplx s,
                                                   bool flip_sign) {
  FunctionalEquationReport r;
  r.s = s;
  r.lhs = l_star(f.expansion, f.fricke_image, params, s, 1.0).value;
  r.rhs = l_star(f.fricke_image, f.expansion, params, params.kappa() - s, 1.5).value;
  if (flip_sign) r.rhs = -r.rhs;
  r.residual = std::abs(r.lhs - r.rhs) / std::max({std::abs(r.lhs), std::abs(r.rhs), kResidualFloor});
  return r;
}

double residue_probe(const EigenformRecord& f, const SpaceParams& params, cplx center, double radius, int points) {
  cplx acc = 0.0;
  for (int j = 0; j < points; ++j) {
    const cplx e = std::polar(1.0, 2.0 * kPi * j / points);
    acc += l_star(f, params, center + radius * e).value * e;
  }
  return std::abs(acc) * radius / points;
}

cplx l_value(const EigenformRecord& h, const SpaceParams& params, cplx s) {
  const cplx pre = std::exp(-s * std::log(2.0 * kPi) + 0.5 * s * std::log(static_cast<double>(params.level()))) *
                   gamma_complex(s).value;
  return l_star(h, params, s).value / pre;
}

CentralReport central_log_derivative(const EigenformRecord& h, const SpaceParams& params, double threshold) {
  if (h.lambda != 1)
    fail(ErrorKind::NotInE, "central_log_derivative: needs lambda = +1 (got " + std::to_string(h.lambda) + ")");
  CentralReport r;
  r.s0 = params.kappa() / 2.0;
  r.central_value = l_value(h, params, r.s0);
  if (std::abs(r.central_value) <= threshold)
    fail(ErrorKind::NotInE, "central value |L(h, k/2 + 1/4)| is below the E-membership threshold");
  const cplx lstar = l_star(h, params, r.s0).value;
  const double shift = std::log(2.0 * kPi / std::sqrt(static_cast<double>(params.level()))) - digamma(r.s0);
  r.log_derivative = l_star_derivative(h.expansion, h.fricke_image, params, r.s0, 1.25) / lstar + shift;
  const double step = 1e-4;
  const cplx up = l_star(h, params, r.s0 + step).value, dn = l_star(h, params, r.s0 - step).value;
  r.finite_difference = (up - dn) / (2.0 * step) / lstar + shift;
  r.reference = std::log(kPi) - digamma(r.s0);
  r.deviation = std::abs(r.log_derivative - r.reference);
  r.fd_deviation = std::abs(r.log_derivative - r.finite_difference);
  r.measured_constant = r.log_derivative.real() + digamma(r.s0);
  return r;
}

ESetReport e_set_scan(const Eigenbasis& eb, const SpaceParams& params, double threshold) {
  ESetReport rep;
  for (std::size_t j = 0; j < eb.forms.size(); ++j) {
    EMember m;
    m.index = static_cast<int>(j);
    m.lambda = eb.forms[j].lambda;
    m.central_value = l_value(eb.forms[j], params, params.kappa() / 2.0);
    m.member = m.lambda != -1 && std::abs(m.central_value) > threshold;
    if (m.member) rep.empty = false;
    rep.forms.push_back(m);
  }
  return rep;
}

void write_lvalue_csv(std::ostream& out, const Eigenbasis& eb, const SpaceParams& params,
                      const std::vector<cplx>& points) {
  out << "form,s_re,s_im,lstar_re,lstar_im,fe_residual,tail_error\n";
  out << std::setprecision(17);
  for (std::size_t j = 0; j < eb.forms.size(); ++j)
    for (const cplx& s : points) {
      const CompletedLValue v = l_star(eb.forms[j], params, s);
      const FunctionalEquationReport fe = functional_equation_check(eb.forms[j], params, s);
      out << j << ',' << s.real() << ',' << s.imag() << ',' << v.value.real() << ',' << v.value.imag() << ','
          << fe.residual << ',' << v.error() << '\n';
    }
}

}  // namespace hiw
