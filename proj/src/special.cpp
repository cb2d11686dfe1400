#include "hiw/special.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <limits>
#include <map>
#include <mutex>
#include <numbers>

#include "hiw/error.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kEps = std::numeric_limits<double>::epsilon();

// B_{2n}, n = 1..10
constexpr std::array<double, 10> kBernoulli2n = {
    1.0 / 6.0,        -1.0 / 30.0,       1.0 / 42.0,    -1.0 / 30.0,         5.0 / 66.0,
    -691.0 / 2730.0,  7.0 / 6.0,         -3617.0 / 510.0, 43867.0 / 798.0,   -174611.0 / 330.0};

bool near_nonpositive_integer(cplx s, long& m, double tol) {
  if (std::abs(s.imag()) > tol || s.real() > 0.5) return false;
  const double r = std::round(s.real());
  if (std::abs(s.real() - r) > tol) return false;
  m = static_cast<long>(-r);
  return true;
}

// Stirling series for log Gamma(w), |w| >= 15, Re w > 0.
cplx log_gamma_stirling(cplx w) {
  cplx sum = (w - 0.5) * std::log(w) - w + 0.5 * std::log(2.0 * kPi);
  const cplx w2 = w * w;
  cplx wp = w;
  for (std::size_t n = 1; n <= kBernoulli2n.size(); ++n) {
    const double denom = static_cast<double>(2 * n * (2 * n - 1));
    const cplx term = kBernoulli2n[n - 1] / (denom * wp);
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum)) break;
    wp *= w2;
  }
  return sum;
}

int shift_for(cplx s) {
  int m = 0;
  while (std::abs(s + static_cast<double>(m)) < 15.0) ++m;
  return m;
}

cplx gamma_right(cplx s) {
  const int m = shift_for(s);
  cplx prod{1.0, 0.0};
  for (int j = 0; j < m; ++j) prod *= s + static_cast<double>(j);
  return std::exp(log_gamma_stirling(s + static_cast<double>(m))) / prod;
}

// Kahan-compensated complex accumulator.
struct Compensated {
  cplx sum{0.0, 0.0};
  cplx carry{0.0, 0.0};
  void add(cplx v) {
    const cplx y = v - carry;
    const cplx t = sum + y;
    carry = (t - sum) - y;
    sum = t;
  }
};

double exp_integral_e1(double x) {
  if (x <= 2.0) {
    double sum = 0.0, term = 1.0;
    for (int j = 1; j < 200; ++j) {
      term *= -x / j;
      const double add = term / j;
      sum += add;
      if (std::abs(add) < 1e-18) break;
    }
    return -0.57721566490153286061 - std::log(x) - sum;
  }
  return upper_incomplete_gamma_cf(cplx{0.0, 0.0}, x).value.real();
}

cplx taylor_1f1(cplx a, cplx b, cplx z, double& err) {
  Compensated acc;
  cplx term{1.0, 0.0};
  double max_term = 1.0;
  acc.add(term);
  int small_run = 0;
  for (int j = 0; j < 2000; ++j) {
    term *= (a + static_cast<double>(j)) / ((b + static_cast<double>(j)) * static_cast<double>(j + 1)) * z;
    acc.add(term);
    max_term = std::max(max_term, std::abs(term));
    if (std::abs(term) <= 1e-17 * std::abs(acc.sum) || std::abs(term) == 0.0) {
      if (++small_run >= 2 && j > std::abs(z)) break;
    } else {
      small_run = 0;
    }
  }
  err = std::abs(term) + 4.0 * kEps * max_term;
  return acc.sum;
}

// Continue 1F1 along the ray 0 -> z by local Taylor steps of Kummer's ODE.
cplx ode_1f1(cplx a, cplx b, cplx z, double& err) {
  const double r0 = 4.0;
  const cplx dir = z / std::abs(z);
  cplx w = r0 * dir;
  double e0 = 0.0, e1 = 0.0;
  cplx y = taylor_1f1(a, b, w, e0);
  cplx dy = a / b * taylor_1f1(a + 1.0, b + 1.0, w, e1);
  err = e0 + e1;
  double remaining = std::abs(z) - r0;
  while (remaining > 0.0) {
    const double step = std::min(0.5 * std::abs(w), remaining);
    const cplx h = step * dir;
    cplx t0 = y, t1 = dy * h;
    cplx val = t0 + t1, der = t1 / h;
    double scale = std::abs(t0) + std::abs(t1);
    int small_run = 0;
    for (int m = 0; m < 400; ++m) {
      const double md = m;
      const cplx t2 = ((w - b - md) * t1 * h / (md + 2.0) +
                       (a + md) * t0 * h * h / ((md + 1.0) * (md + 2.0))) / w;
      val += t2;
      der += (md + 2.0) * t2 / h;
      scale = std::max(scale, std::abs(t2));
      t0 = t1;
      t1 = t2;
      if (std::abs(t2) < 1e-18 * std::abs(val)) {
        if (++small_run >= 3) break;
      } else {
        small_run = 0;
      }
    }
    err += 4.0 * kEps * scale;
    y = val;
    dy = der;
    w += h;
    remaining -= step;
  }
  return y;
}

}  // namespace

SpecialValue gamma_complex(cplx s) {
  long m = 0;
  if (near_nonpositive_integer(s, m, 1e-14)) throw PoleError(-m);
  if (s.imag() == 0.0 && std::abs(s.real()) < 170.0) {
    const double v = std::tgamma(s.real());
    return {cplx{v, 0.0}, 4.0 * kEps * std::abs(v)};
  }
  cplx value;
  if (s.real() < 0.5) {
    value = kPi / (std::sin(kPi * s) * gamma_right(1.0 - s));
  } else {
    value = gamma_right(s);
  }
  return {value, 8.0 * kEps * std::abs(value) * (1.0 + std::abs(s))};
}

cplx log_gamma(cplx s) {
  long m = 0;
  if (near_nonpositive_integer(s, m, 1e-14)) throw PoleError(-m);
  if (s.real() < 0.5) return std::log(kPi) - std::log(std::sin(kPi * s)) - log_gamma(1.0 - s);
  const int shift = shift_for(s);
  cplx acc = log_gamma_stirling(s + static_cast<double>(shift));
  for (int j = 0; j < shift; ++j) acc -= std::log(s + static_cast<double>(j));
  return acc;
}

double digamma(double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "digamma: x must be positive");
  double acc = 0.0;
  while (x < 10.0) {
    acc -= 1.0 / x;
    x += 1.0;
  }
  const double x2 = 1.0 / (x * x);
  const double series =
      x2 * (1.0 / 12 - x2 * (1.0 / 120 - x2 * (1.0 / 252 - x2 * (1.0 / 240 - x2 * (1.0 / 132 - x2 * (691.0 / 32760 - x2 / 12))))));
  return acc + std::log(x) - 0.5 / x - series;
}

SpecialValue lower_incomplete_gamma(cplx s, double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "lower_incomplete_gamma: x must be positive");
  if (s.real() <= 0.0) fail(ErrorKind::Domain, "lower_incomplete_gamma: Re s must be positive");
  // x^s e^{-x} sum_j x^j / (s)_{j+1}
  Compensated acc;
  cplx term = 1.0 / s;
  double max_mag = std::abs(term);
  acc.add(term);
  for (int j = 1; j < 4000; ++j) {
    term *= x / (s + static_cast<double>(j));
    acc.add(term);
    max_mag = std::max(max_mag, std::abs(term));
    if (j > x && std::abs(term) < 1e-18 * std::abs(acc.sum)) break;
  }
  const cplx pref = std::exp(s * std::log(x) - x);
  return {pref * acc.sum, std::abs(pref) * (2.0 * std::abs(term) + 4.0 * kEps * max_mag)};
}

SpecialValue upper_incomplete_gamma_series(cplx s, double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "upper_incomplete_gamma: x must be positive");
  long m = 0;
  if (near_nonpositive_integer(s, m, 1e-9)) {
    // Gamma(-m, x) from E1 by downward recurrence
    double e1 = exp_integral_e1(x);
    double tail = 0.0, fact = 1.0, xp = x;
    for (long j = 0; j < m; ++j) {
      if (j > 0) fact *= static_cast<double>(j);
      tail += ((j % 2 == 0) ? 1.0 : -1.0) * fact / xp;
      xp *= x;
    }
    double mfact = 1.0;
    for (long j = 2; j <= m; ++j) mfact *= static_cast<double>(j);
    const double v = ((m % 2 == 0) ? 1.0 : -1.0) / mfact * (e1 - std::exp(-x) * tail);
    return {cplx{v, 0.0}, 1e-14 * std::abs(v)};
  }
  if (s.real() <= 0.0) {
    // x^s sum_j (-x)^j / (j! (s + j)); the positive-term form needs Re s > 0
    Compensated acc;
    double fact = 1.0, max_mag = 0.0, term_mag = 0.0;
    for (int j = 0; j < 4000; ++j) {
      if (j > 0) fact *= -x / j;
      const cplx t = fact / (s + static_cast<double>(j));
      acc.add(t);
      term_mag = std::abs(t);
      max_mag = std::max(max_mag, term_mag);
      if (j > x && term_mag < 1e-18 * std::abs(acc.sum)) break;
    }
    const cplx xs = std::exp(s * std::log(x));
    const SpecialValue g = gamma_complex(s);
    return {g.value - xs * acc.sum, g.abs_error + std::abs(xs) * (term_mag + 4.0 * kEps * max_mag)};
  }
  const SpecialValue lower = lower_incomplete_gamma(s, x);
  const SpecialValue g = gamma_complex(s);
  return {g.value - lower.value, g.abs_error + lower.abs_error};
}

SpecialValue upper_incomplete_gamma_cf(cplx s, double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "upper_incomplete_gamma: x must be positive");
  constexpr double tiny = 1e-300;
  cplx b = x + 1.0 - s;
  cplx c = 1.0 / tiny;
  cplx d = 1.0 / b;
  cplx h = d;
  double delta_err = 1.0;
  for (int i = 1; i < 100000; ++i) {
    const cplx an = -static_cast<double>(i) * (static_cast<double>(i) - s);
    b += 2.0;
    d = an * d + b;
    if (std::abs(d) < tiny) d = tiny;
    c = b + an / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const cplx del = d * c;
    h *= del;
    delta_err = std::abs(del - 1.0);
    if (delta_err < 1e-16) break;
  }
  const cplx v = std::exp(s * std::log(x) - x) * h;
  return {v, std::abs(v) * (delta_err + 8.0 * kEps)};
}

double incomplete_gamma_crossover(cplx s) {
  // for Re s < 0 the series cancels against Gamma(s) long before |s| + 2
  return s.real() < 0.0 ? 1.0 : std::abs(s) + 2.0;
}

SpecialValue upper_incomplete_gamma(cplx s, double x) {
  if (!(x > 0.0)) fail(ErrorKind::Domain, "upper_incomplete_gamma: x must be positive");
  if (x < incomplete_gamma_crossover(s)) return upper_incomplete_gamma_series(s, x);
  return upper_incomplete_gamma_cf(s, x);
}

cplx hyp1f1(cplx alpha, cplx beta, cplx z) {
  long m = 0;
  if (near_nonpositive_integer(beta, m, 1e-14)) throw PoleError(-m);
  if (z.real() < 0.0) return std::exp(z) * hyp1f1(beta - alpha, beta, -z);
  double err = 0.0;
  if (std::abs(z) <= 6.0) return taylor_1f1(alpha, beta, z, err);
  return ode_1f1(alpha, beta, z, err);
}

KummerValue kummer_1f1(cplx alpha, cplx beta, cplx z) {
  long m = 0;
  if (near_nonpositive_integer(beta, m, 1e-14)) throw PoleError(-m);
  double err = 0.0;
  cplx F;
  if (z.real() < 0.0) {
    const KummerValue t = kummer_1f1(beta - alpha, beta, -z);
    const cplx ez = std::exp(z);
    F = ez * t.F.value;
    err = std::abs(ez) * t.F.abs_error;
  } else if (std::abs(z) <= 6.0) {
    F = taylor_1f1(alpha, beta, z, err);
  } else {
    F = ode_1f1(alpha, beta, z, err);
  }
  KummerValue out;
  out.F = {F, err};
  long p1 = 0, p2 = 0;
  if (near_nonpositive_integer(alpha, p1, 1e-14) || near_nonpositive_integer(beta - alpha, p2, 1e-14)) {
    out.f = {cplx{std::nan(""), std::nan("")}, std::numeric_limits<double>::infinity()};
  } else {
    const cplx norm = gamma_complex(alpha).value * gamma_complex(beta - alpha).value /
                      gamma_complex(beta).value;
    out.f = {norm * F, std::abs(norm) * err + 16.0 * kEps * std::abs(norm * F)};
  }
  return out;
}

double bessel_j_half(int two_nu, double x) {
  if (two_nu <= 0 || two_nu % 2 == 0) fail(ErrorKind::InvalidArgument, "bessel_j_half: two_nu must be odd positive");
  if (!(x > 0.0)) fail(ErrorKind::Domain, "bessel_j_half: x must be positive");
  const double nu = 0.5 * two_nu;
  const int l = (two_nu - 1) / 2;  // spherical index: J_{l+1/2} = sqrt(2x/pi) j_l

  if (x < 2.0 || x * x < 4.0 * (nu + 1.0) * 0.25) {
    // ascending series
    double term = std::exp(nu * std::log(0.5 * x) - std::lgamma(nu + 1.0));
    double sum = term;
    const double q = 0.25 * x * x;
    for (int j = 1; j < 500; ++j) {
      term *= -q / (j * (nu + j));
      sum += term;
      if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
  }
  const double pref = std::sqrt(2.0 * x / kPi);
  const double j0 = std::sin(x) / x;
  if (l == 0) return pref * j0;
  const double j1 = std::sin(x) / (x * x) - std::cos(x) / x;
  if (x >= static_cast<double>(l)) {
    double jm = j0, jc = j1;
    for (int n = 1; n < l; ++n) {
      const double jn = (2.0 * n + 1.0) / x * jc - jm;
      jm = jc;
      jc = jn;
    }
    return pref * jc;
  }
  // Miller's downward recurrence, normalized by whichever of j0, j1 is larger
  const int start = l + 20 + static_cast<int>(std::sqrt(40.0 * (l + 1)));
  double jp = 0.0, jc = 1e-300, target = 0.0, r0 = 0.0, r1 = 0.0;
  for (int n = start; n >= 1; --n) {
    const double jm = (2.0 * n + 1.0) / x * jc - jp;
    jp = jc;
    jc = jm;
    if (n - 1 == l) target = jc;
    if (n - 1 == 1) r1 = jc;
    if (n - 1 == 0) r0 = jc;
    if (std::abs(jc) > 1e250) {
      jc *= 1e-250;
      jp *= 1e-250;
      target *= 1e-250;
      r1 *= 1e-250;
    }
  }
  const double scale = std::abs(j0) >= std::abs(j1) ? j0 / r0 : j1 / r1;
  return pref * target * scale;
}

SpecialValue hurwitz_zeta(cplx s, double q) {
  if (!(q > 0.0)) fail(ErrorKind::Domain, "hurwitz_zeta: q must be positive");
  if (std::abs(s - 1.0) < 1e-14) throw PoleError(1);
  const double amin = std::max(12.0, std::abs(s));
  Compensated acc;
  double a = q;
  while (a < amin) {
    acc.add(std::exp(-s * std::log(a)));
    a += 1.0;
  }
  const cplx la = std::log(cplx{a, 0.0});
  const cplx a_s = std::exp(-s * la);
  acc.add(a * a_s / (s - 1.0));
  acc.add(0.5 * a_s);
  // sum_j B_{2j}/(2j)! (s)_{2j-1} a^{-s-2j+1}
  cplx rising = s;  // (s)_{2j-1}
  double fact = 2.0;  // (2j)!
  cplx apow = a_s / a;  // a^{-s-1}
  double last = 0.0;
  for (std::size_t j = 1; j <= kBernoulli2n.size(); ++j) {
    const cplx term = kBernoulli2n[j - 1] / fact * rising * apow;
    acc.add(term);
    last = std::abs(term);
    if (last < 1e-18 * std::abs(acc.sum)) break;
    rising *= (s + static_cast<double>(2 * j - 1)) * (s + static_cast<double>(2 * j));
    fact *= static_cast<double>((2 * j + 1) * (2 * j + 2));
    apow /= a * a;
  }
  return {acc.sum, last + 8.0 * kEps * std::abs(acc.sum)};
}

namespace {

QuadratureRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& off, double mu0) {
  const auto n = diag.size();
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    J(i, i) = diag(i);
    if (i + 1 < n) J(i, i + 1) = J(i + 1, i) = off(i);
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  QuadratureRule rule;
  for (Eigen::Index i = 0; i < n; ++i) {
    rule.nodes.push_back(es.eigenvalues()(i));
    const double v = es.eigenvectors()(0, i);
    rule.weights.push_back(mu0 * v * v);
  }
  return rule;
}

}  // namespace

const QuadratureRule& gauss_laguerre(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  Eigen::VectorXd diag(n), off(std::max(n - 1, 0));
  for (int i = 0; i < n; ++i) diag(i) = 2.0 * i + 1.0;
  for (int i = 0; i + 1 < n; ++i) off(i) = i + 1.0;
  return cache.emplace(n, golub_welsch(diag, off, 1.0)).first->second;
}

QuadratureRule gauss_legendre(int n) {
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n), off(std::max(n - 1, 0));
  for (int i = 0; i + 1 < n; ++i) {
    const double k = i + 1.0;
    off(i) = k / std::sqrt(4.0 * k * k - 1.0);
  }
  return golub_welsch(diag, off, 2.0);
}

}  // namespace hiw
