#pragma once

// The kernel R_{s,psi}: Fourier coefficients by the direct (a, c) double sum,
// by the Poincare series, and by the eigenform expansion, plus the averaged
// sum D(s) and its scan over the critical strip.

#include <json.hpp>
#include <ostream>
#include <string>
#include <vector>

#include "hiw/forms.hpp"
#include "hiw/lfun.hpp"
#include "hiw/serialize.hpp"

namespace hiw {

/// 1/2 e^{pi i s / 2} Gamma(s) Gamma(k + 1/2 - s); PoleError at gamma poles.
cplx gamma_k(cplx s, int k);

struct KernelCutoffs {
  std::int64_t c_max = 0;  // 0: 2000 N, rounded down to a multiple of 4N
  std::int64_t a_max = 0;  // 0: 2000 N
  int m_max = 0;           // truncated Poincare diagnostic, 0: 200
  std::int64_t c_accel = 0;  // levels c <= c_accel get the |a| > a_max tail in closed form; 0: 40 N, -1: off
};

struct KernelValue {
  cplx value;
  double error = 0.0;  // truncation bound (direct, truncated Poincare) or propagated L* error
  std::string route;
};

/// (2 pi)^s Gamma(kappa - s) n^{s-1}.
cplx kernel_main_term(int n, cplx s, const SpaceParams& params);

/// Main term plus the (a, c) double sum, c > 0 with 4N | c, a != 0 coprime to c,
/// a^{-s} on the principal branch. Requires 1 < Re s < k - 1/2.
KernelValue kernel_coeff_direct(int n, cplx s, const SpaceParams& params, const KernelCutoffs& cut = {});

/// The double sum alone, divided by the main term (the correction in 1 + correction = a_R(n) / main).
struct DirectCorrection {
  cplx correction;      // sum / main term
  double abs_sum = 0.0;  // sum of |term| / |main term|
  double tail = 0.0;     // truncation bound relative to |main term|
  double max_abs_1f1_ratio = 0.0;  // max |1f1| / B(sigma, kappa - sigma) over the summed terms
};
DirectCorrection direct_correction(int n, cplx s, const SpaceParams& params, const KernelCutoffs& cut = {});
/// Same for many s at once, sharing the arithmetic factors.
std::vector<DirectCorrection> direct_corrections(int n, const std::vector<cplx>& ss, const SpaceParams& params,
                                                 const KernelCutoffs& cut = {});
std::vector<KernelValue> kernel_coeff_direct(int n, const std::vector<cplx>& ss, const SpaceParams& params,
                                             const KernelCutoffs& cut = {});

/// (2 pi)^s Gamma(kappa - s) n^{k-1/2} conj(L(P_n, kappa - conj s)), the analytically
/// continued m-sum sum_m m^{s-1} a_{P_m}(n). Requires 1 < Re s < k - beta - 1/2.
KernelValue kernel_coeff_via_poincare(int n, cplx s, const FormsDocument& doc);

/// The literal truncated sum (2 pi)^s Gamma(kappa - s) sum_{m <= m_max} m^{s-1} a_{P_m}(n),
/// from the pairing symmetry; error is the growth-bound tail estimate.
KernelValue kernel_coeff_via_poincare_truncated(int n, cplx s, const FormsDocument& doc, int m_max);

/// 2^{-2k+1+s} pi Gamma(k - 1/2) / (i_{4N} N^{k/2+1/4-s/2}).
cplx spectral_prefactor(cplx s, const SpaceParams& params);

/// prefactor * sum_j L*(f_j | H_{4N}, s) a_j(n) / <f_j, f_j>; this is the
/// lambda_j L*(f_j, s) form whenever H_{4N} preserves the space. Any s.
KernelValue kernel_coeff_spectral(int n, cplx s, const Eigenbasis& eb, const SpaceParams& params);

struct DTerm {
  int j = 0;
  cplx lstar;  // L*(f_j, s)
  int lambda = 0;
  cplx a1;
  double norm = 0.0;
  cplx contribution;  // L*(f_j | H, s) a_j(1) / <f_j, f_j>
  double error = 0.0;
};

struct DValue {
  cplx s;
  cplx value;
  double error = 0.0;
  std::vector<DTerm> terms;
};

DValue average_sum_D(cplx s, const Eigenbasis& eb, const SpaceParams& params);

struct ScanReport {
  double r0 = 0.0;
  std::vector<double> sigma;
  std::vector<cplx> D;
  std::vector<double> error;
  std::vector<std::vector<DTerm>> breakdown;
  double min_abs_D = 0.0;
  double max_error = 0.0;
  int dimension = 0;
  std::string verdict;  // "verified non-vanishing", "inconclusive", "trivially zero (d=0)"
};

inline constexpr int kDefaultGrid = 64;

/// sigma_i = k/2 - 1/4 + (i + 1/2) / grid, i = 0..grid-1 (grid even puts k/2 + 1/4 between two
/// points, so the center is appended explicitly).
std::vector<double> strip_grid(const SpaceParams& params, int grid);

ScanReport nonvanishing_scan(double r0, int grid, const Eigenbasis& eb, const SpaceParams& params);

/// Columns: sigma,r0,D_re,D_im,D_abs,error_bound
void write_scan_csv(std::ostream& out, const ScanReport& rep);

struct ProofDiagnostic {
  int k = 0;
  int N = 0;
  double delta = 0.0;
  double r0 = 0.0;
  cplx s;
  double ratio = 0.0;       // |correction| against the unit main term
  double abs_bound = 0.0;   // sum of |terms|, the triangle-inequality side
  double tail = 0.0;
};

/// The averaged-kernel correction against its main term, normalized at n = 1, s = k/2 + 1/4 - delta + i r0.
ProofDiagnostic proof_inequality_diagnostic(double delta, double r0, const SpaceParams& params,
                                            const KernelCutoffs& cut = {});

struct RouteResult {
  std::string route;
  bool ran = false;
  std::string skipped;  // reason when not run
  KernelValue value;
};

struct TripleCheck {
  int n = 0;
  cplx s;
  std::vector<RouteResult> routes;
  double max_relative_delta = 0.0;
  int compared = 0;  // number of routes that ran
  bool pass = false;  // all pairwise deltas below tol (vacuous with one route)
};

/// Every route valid at s, compared pairwise; pass when all deltas are below tol.
TripleCheck triple_check(int n, cplx s, const FormsDocument& doc, const KernelCutoffs& cut = {}, double tol = 1e-5);
nlohmann::json to_json(const TripleCheck& t);

}  // namespace hiw
