#pragma once

// Completed L-functions L*(f, s) = (2 pi)^{-s} (4N)^{s/2} Gamma(s) L(f, s).

#include <ostream>
#include <string>
#include <vector>

#include "hiw/forms.hpp"
#include "hiw/special.hpp"

namespace hiw {

struct CompletedLValue {
  cplx s;
  cplx value;
  double tail_error = 0.0;         // truncation of the summed series
  double coefficient_error = 0.0;  // propagated from the stored coefficient bounds
  std::string method;              // "incomplete-gamma" or "naive-series"
  int terms = 0;

  double error() const { return tail_error + coefficient_error; }
};

/// (2 pi)^{-s} (4N)^{s/2} Gamma(s) sum_{n <= M} a(n) n^{-s}; requires Re s > beta + 1 + margin.
CompletedLValue l_naive(const QExpansion& f, const SpaceParams& params, cplx s, int M, double margin = 0.25);
CompletedLValue l_naive(const EigenformRecord& f, const SpaceParams& params, cplx s, int M);

/// Mellin split at height t0 / sqrt(4N):
///   sum a(n) X_n^{-s} Gamma(s, X_n t0) + sum b(n) X_n^{s-kappa} Gamma(kappa - s, X_n / t0),
/// X_n = 2 pi n / sqrt(4N), b the coefficients of f | H_{4N}.
CompletedLValue l_star(const QExpansion& f, const QExpansion& f_fricke, const SpaceParams& params, cplx s,
                       double t0 = 1.0);
CompletedLValue l_star(const EigenformRecord& f, const SpaceParams& params, cplx s, double t0 = 1.0);

/// d/ds L*(f, s) from the same split, differentiated term by term.
cplx l_star_derivative(const QExpansion& f, const QExpansion& f_fricke, const SpaceParams& params, cplx s,
                       double t0 = 1.0);

struct FunctionalEquationReport {
  cplx s;
  cplx lhs;  // L*(f, s)
  cplx rhs;  // L*(f | H_{4N}, kappa - s), which is lambda L*(f, kappa - s) when f | K H = lambda f
  double residual = 0.0;
};

inline constexpr double kResidualFloor = 1e-30;

/// lhs and rhs use different split points. flip_sign negates rhs (negative control).
FunctionalEquationReport functional_equation_check(const EigenformRecord& f, const SpaceParams& params, cplx s,
                                                   bool flip_sign = false);

/// |(1 / 2 pi i) \oint L*(f, z) dz| over a circle, by the trapezoid rule.
double residue_probe(const EigenformRecord& f, const SpaceParams& params, cplx center, double radius,
                     int points = 64);

struct CentralReport {
  double s0 = 0.0;
  cplx central_value;       // L(h, s0)
  cplx log_derivative;      // L'/L(h, s0), analytic
  cplx finite_difference;   // central difference with h = 1e-4
  double reference = 0.0;   // log(pi) - Psi(s0)
  double deviation = 0.0;   // |log_derivative - reference|
  double fd_deviation = 0.0;  // |log_derivative - finite_difference|
  double measured_constant = 0.0;  // Re L'/L + Psi(s0); log(2 pi / sqrt(4N)) by the normalization of L*
};

inline constexpr double kCentralThreshold = 1e-8;

/// Requires lambda = +1 and |L(h, s0)| > threshold (else NotInE).
CentralReport central_log_derivative(const EigenformRecord& h, const SpaceParams& params,
                                     double threshold = kCentralThreshold);

/// L(h, s) = L*(h, s) / ((2 pi)^{-s} (4N)^{s/2} Gamma(s)).
cplx l_value(const EigenformRecord& h, const SpaceParams& params, cplx s);

struct EMember {
  int index = 0;
  int lambda = 0;
  cplx central_value;
  bool member = false;
};

struct ESetReport {
  std::vector<EMember> forms;
  bool empty = true;
};

ESetReport e_set_scan(const Eigenbasis& eb, const SpaceParams& params, double threshold = kCentralThreshold);

/// Columns: form,s_re,s_im,lstar_re,lstar_im,fe_residual,tail_error
void write_lvalue_csv(std::ostream& out, const Eigenbasis& eb, const SpaceParams& params,
                      const std::vector<cplx>& points);

}  // namespace hiw
