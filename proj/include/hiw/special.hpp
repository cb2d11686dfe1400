#pragma once

// Transcendental functions in double precision with error estimates.

#include <complex>
#include <vector>

namespace hiw {

using cplx = std::complex<double>;

struct SpecialValue {
  cplx value;
  double abs_error = 0.0;  // bound on the truncation error of what was summed
};

/// Gamma(s); throws PoleError at nonpositive integers.
SpecialValue gamma_complex(cplx s);

/// log Gamma(s), summed as a sum of principal logs (continuous off the negative axis).
cplx log_gamma(cplx s);

double digamma(double x);

/// Gamma(s, x) = int_x^inf t^{s-1} e^{-t} dt. Series below
/// incomplete_gamma_crossover(s), Legendre continued fraction above.
SpecialValue upper_incomplete_gamma(cplx s, double x);

/// |s| + 2, or 1 when Re s < 0.
double incomplete_gamma_crossover(cplx s);

/// The two branches of upper_incomplete_gamma, exposed for crossover checks.
SpecialValue upper_incomplete_gamma_series(cplx s, double x);
SpecialValue upper_incomplete_gamma_cf(cplx s, double x);

/// Lower incomplete gamma by its own power series, independent of the upper routine.
SpecialValue lower_incomplete_gamma(cplx s, double x);

struct KummerValue {
  SpecialValue F;  // 1F1(alpha; beta; z)
  SpecialValue f;  // Gamma(alpha) Gamma(beta - alpha) / Gamma(beta) * 1F1
};

/// Kummer's 1F1 together with its gamma-normalized companion 1f1. The
/// normalized value is NaN when alpha or beta - alpha hits a gamma pole.
KummerValue kummer_1f1(cplx alpha, cplx beta, cplx z);

/// 1F1 only, skipping the normalization gammas (hot loop of the kernel).
cplx hyp1f1(cplx alpha, cplx beta, cplx z);

/// J_{two_nu/2}(x) for odd two_nu > 0.
double bessel_j_half(int two_nu, double x);

/// Hurwitz zeta sum_{m>=0} (q+m)^{-s}, s != 1, q > 0, by Euler-Maclaurin.
SpecialValue hurwitz_zeta(cplx s, double q);

/// Gauss-Laguerre rule (weight e^{-t} on [0, inf)).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
const QuadratureRule& gauss_laguerre(int n);
QuadratureRule gauss_legendre(int n);

}  // namespace hiw
