#include "hiw/kernel.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>

#include "hiw/error.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;
const cplx kI{0.0, 1.0};

KernelCutoffs resolve(const KernelCutoffs& cut, const SpaceParams& params) {
  KernelCutoffs r = cut;
  const std::int64_t q = params.level();
  if (r.c_max == 0) r.c_max = 2000 * static_cast<std::int64_t>(params.N);
  if (r.a_max == 0) r.a_max = 2000 * static_cast<std::int64_t>(params.N);
  if (r.m_max == 0) r.m_max = 200;
  if (r.c_accel == 0) r.c_accel = 40 * static_cast<std::int64_t>(params.N);
  if (r.c_accel < 0) r.c_accel = 0;
  r.c_max -= r.c_max % q;
  if (r.c_max < q) fail(ErrorKind::InvalidArgument, "kernel: c_max must be at least 4N");
  if (r.a_max < 1) fail(ErrorKind::InvalidArgument, "kernel: a_max must be positive");
  return r;
}

double beta_fn(double x, double y) { return std::exp(std::lgamma(x) + std::lgamma(y) - std::lgamma(x + y)); }

void direct_region(cplx s, const SpaceParams& params) {
  if (!(s.real() > 1.0 && s.real() < params.k - 0.5))
    fail(ErrorKind::Region, "direct route needs 1 < Re s < k - 1/2 (Re s = " + std::to_string(s.real()) + ")");
}

void poincare_region(cplx s, const SpaceParams& params) {
  const double top = params.k - cusp_growth_exponent(params.k) - 0.5;
  if (!(s.real() > 1.0 && s.real() < top))
    fail(ErrorKind::Region, "Poincare route needs 1 < Re s < k - beta - 1/2 = " + std::to_string(top));
}

cplx completion(cplx w, const SpaceParams& params) {
  return std::exp(-w * std::log(2.0 * kPi) + 0.5 * w * std::log(static_cast<double>(params.level()))) *
         gamma_complex(w).value;
}

}  // namespace

cplx gamma_k(cplx s, int k) {
  const double kappa = k + 0.5;
  return 0.5 * std::exp(kI * kPi * s / 2.0) * gamma_complex(s).value * gamma_complex(kappa - s).value;
}

cplx kernel_main_term(int n, cplx s, const SpaceParams& params) {
  require(n >= 1, "kernel: n must be positive");
  return std::exp(s * std::log(2.0 * kPi) + (s - 1.0) * std::log(static_cast<double>(n))) *
         gamma_complex(params.kappa() - s).value;
}

std::vector<DirectCorrection> direct_corrections(int n, const std::vector<cplx>& ss, const SpaceParams& params,
                                                 const KernelCutoffs& cut_in) {
  require(n >= 1, "kernel: n must be positive");
  for (const cplx& s : ss) direct_region(s, params);
  const KernelCutoffs cut = resolve(cut_in, params);
  const double kappa = params.kappa();
  const std::size_t S = ss.size();
  const std::int64_t q = params.level(), A = cut.a_max;

  // per-s constants: prefactor / main term, the 1f1 gamma normalization, a^{-s}
  std::vector<cplx> rel(S), G(S), neg_branch(S);
  std::vector<double> B(S);
  std::vector<std::vector<cplx>> apow(S, std::vector<cplx>(A + 1));
  for (std::size_t i = 0; i < S; ++i) {
    const cplx s = ss[i];
    const cplx pref = std::exp(kI * kPi * s / 2.0 + kappa * (std::log(2.0 * kPi) - kI * kPi / 2.0) +
                               (kappa - 1.0) * std::log(static_cast<double>(n)));
    rel[i] = pref / kernel_main_term(n, s, params);
    G[i] = gamma_complex(s).value * gamma_complex(kappa - s).value / std::tgamma(kappa);
    B[i] = beta_fn(s.real(), kappa - s.real());
    neg_branch[i] = std::exp(-kI * kPi * s);
    for (std::int64_t a = 1; a <= A; ++a) apow[i][a] = std::exp(-s * std::log(static_cast<double>(a)));
  }

  std::vector<DirectCorrection> out(S);
  std::vector<cplx> sum(S, 0.0);
  std::vector<double> abs_sum(S, 0.0), worst(S, 0.0);
  for (std::int64_t c = q; c <= cut.c_max; c += q) {
    std::vector<cplx> cpow(S);
    for (std::size_t i = 0; i < S; ++i) cpow[i] = std::exp((ss[i] - kappa) * std::log(static_cast<double>(c)));
    for (std::int64_t a = 1; a <= A; ++a) {
      if (gcd64(a, c) != 1) continue;
      for (int sign : {1, -1}) {
        const std::int64_t as = sign * a;
        const cplx arith = params.psi(as) * theta_power_factor(c, as, params.k) *
                           unit_root(static_cast<std::int64_t>((static_cast<__int128>(n) * mod_inverse(as, c)) % c), c);
        const cplx z(0.0, -2.0 * kPi * n / (static_cast<double>(as) * c));
        for (std::size_t i = 0; i < S; ++i) {
          const cplx f = G[i] * hyp1f1(ss[i], kappa, z);
          worst[i] = std::max(worst[i], std::abs(f) / B[i]);
          const cplx term = arith * cpow[i] * apow[i][a] * (sign < 0 ? neg_branch[i] : cplx(1.0)) * f;
          sum[i] += term;
          abs_sum[i] += std::abs(term);
        }
      }
    }
  }

  // a-tail for small c: g(a) = psi(a) theta(c, a) e(n a'/c) has period c, and
  // 1F1(s; kappa; z) = sum_j t_j z^j turns the tail into Hurwitz zeta values.
  std::vector<double> accel_err(S, 0.0);
  const std::int64_t c_acc = std::min(cut.c_accel, cut.c_max);
  for (std::int64_t c = q; c <= c_acc; c += q) {
    const double cd = static_cast<double>(c);
    const double zmax = 2.0 * kPi * n / (static_cast<double>(A + 1) * cd);
    for (std::size_t i = 0; i < S; ++i) {
      const cplx s = ss[i];
      // Taylor coefficients t_j with |t_j| zmax^j above 1e-18
      std::vector<cplx> t{1.0};
      for (int j = 0; j < 40 && std::abs(t.back()) * std::pow(zmax, j) > 1e-18; ++j)
        t.push_back(t.back() * (s + double(j)) / ((kappa + j) * (j + 1.0)));
      const cplx cpow = std::exp((s - kappa) * std::log(cd));
      cplx tail_sum = 0.0;
      for (std::int64_t r = 1; r < c; ++r) {
        if (gcd64(r, c) != 1) continue;
        std::int64_t first = A + 1 + ((r - (A + 1)) % c + c) % c;  // smallest a > A with a = r mod c
        const double x = static_cast<double>(first) / cd;
        for (int sign : {1, -1}) {
          const std::int64_t rs = sign * r;
          const cplx arith = params.psi(rs) * theta_power_factor(c, rs, params.k) *
                             unit_root(static_cast<std::int64_t>((static_cast<__int128>(n) * mod_inverse(rs, c)) % c), c);
          const cplx zc(0.0, -2.0 * kPi * n / (sign * cd));  // z = zc / a
          cplx inner = 0.0, zj = 1.0;
          for (std::size_t j = 0; j < t.size(); ++j) {
            const SpecialValue h = hurwitz_zeta(s + double(j), x);
            const cplx w = t[j] * zj * std::exp(-(s + double(j)) * std::log(cd));
            inner += w * h.value;
            accel_err[i] += std::abs(w) * h.abs_error * std::abs(cpow) * std::abs(G[i]);
            zj *= zc;
          }
          tail_sum += arith * (sign < 0 ? neg_branch[i] : cplx(1.0)) * inner;
        }
      }
      // Taylor remainder, bounded by the first omitted term over all a > A
      const double rem = std::abs(t.back()) * std::pow(zmax, t.size()) * (1.0 + std::abs(neg_branch[i])) *
                         hurwitz_zeta(s.real(), static_cast<double>(A + 1)).value.real();
      accel_err[i] += rem * std::abs(cpow) * std::abs(G[i]) * cd;
      sum[i] += G[i] * cpow * tail_sum;
    }
  }

  for (std::size_t i = 0; i < S; ++i) {
    if (worst[i] > 1.0 + 1e-8)
      fail(ErrorKind::Inconsistency, "|1f1| exceeded its integral bound in the direct kernel sum");
    const double sigma = ss[i].real();
    // |term| <= c^{sigma - kappa} |a|^{-sigma} B(sigma, kappa - sigma), times e^{pi Im s} when a < 0
    const double pair = 1.0 + std::abs(neg_branch[i]);
    double c_part = 0.0;
    for (std::int64_t c = c_acc + q; c <= cut.c_max; c += q) c_part += std::pow(static_cast<double>(c), sigma - kappa);
    const double a_tail = pair * hurwitz_zeta(sigma, static_cast<double>(A + 1)).value.real();
    const double zeta_sigma = pair * hurwitz_zeta(sigma, 1.0).value.real();
    const double c_tail = std::pow(static_cast<double>(q), sigma - kappa) *
                          hurwitz_zeta(kappa - sigma, static_cast<double>(cut.c_max / q + 1)).value.real();
    const double scale = std::abs(rel[i]);
    out[i].correction = rel[i] * sum[i];
    out[i].abs_sum = scale * abs_sum[i];
    out[i].tail = scale * (B[i] * (c_part * a_tail + c_tail * zeta_sigma) + accel_err[i]);
    out[i].max_abs_1f1_ratio = worst[i];
  }
  return out;
}

DirectCorrection direct_correction(int n, cplx s, const SpaceParams& params, const KernelCutoffs& cut) {
  return direct_corrections(n, {s}, params, cut).front();
}

std::vector<KernelValue> kernel_coeff_direct(int n, const std::vector<cplx>& ss, const SpaceParams& params,
                                             const KernelCutoffs& cut) {
  const auto corr = direct_corrections(n, ss, params, cut);
  std::vector<KernelValue> out;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const cplx main = kernel_main_term(n, ss[i], params);
    out.push_back({main * (1.0 + corr[i].correction), std::abs(main) * corr[i].tail, "direct"});
  }
  return out;
}

KernelValue kernel_coeff_direct(int n, cplx s, const SpaceParams& params, const KernelCutoffs& cut) {
  return kernel_coeff_direct(n, std::vector<cplx>{s}, params, cut).front();
}

namespace {

struct PoincareData {
  QExpansion p, p_fricke;
};

PoincareData poincare_with_fricke(int n, const FormsDocument& doc) {
  const Space& sp = doc.space;
  if (sp.d == 0) fail(ErrorKind::InvalidArgument, "Poincare route: the space is zero");
  PoincareData out;
  const auto it = std::find(sp.generators.begin(), sp.generators.end(), n);
  out.p = it != sp.generators.end() ? sp.basis[it - sp.generators.begin()]
                                    : poincare_expansion(n, sp.params, sp.M, sp.c_max);
  const Eigen::VectorXcd x = coordinates(sp, out.p);
  out.p_fricke = combine(fricke_target(doc), doc.eigen.fricke.matrix * x);
  return out;
}

}  // namespace

KernelValue kernel_coeff_via_poincare(int n, cplx s, const FormsDocument& doc) {
  const SpaceParams& params = doc.space.params;
  poincare_region(s, params);
  const PoincareData pd = poincare_with_fricke(n, doc);
  const cplx w = params.kappa() - std::conj(s);
  const CompletedLValue L = l_star(pd.p, pd.p_fricke, params, w);
  const cplx comp = completion(w, params);
  const cplx pre = std::exp(s * std::log(2.0 * kPi) + (params.k - 0.5) * std::log(static_cast<double>(n))) *
                   gamma_complex(params.kappa() - s).value;
  return {pre * std::conj(L.value / comp), std::abs(pre) * L.error() / std::abs(comp), "poincare"};
}

KernelValue kernel_coeff_via_poincare_truncated(int n, cplx s, const FormsDocument& doc, int m_max) {
  const SpaceParams& params = doc.space.params;
  poincare_region(s, params);
  const Space& sp = doc.space;
  if (m_max > sp.M) fail(ErrorKind::Truncation, "truncated Poincare sum needs m_max <= M");
  const auto it = std::find(sp.generators.begin(), sp.generators.end(), n);
  const QExpansion pn = it != sp.generators.end() ? sp.basis[it - sp.generators.begin()]
                                                  : poincare_expansion(n, params, sp.M, sp.c_max);
  const double nu = params.k - 0.5;
  cplx sum = 0.0;
  // a_{P_m}(n) = n^nu m^{-nu} conj(a_{P_n}(m))
  for (int m = 1; m <= m_max; ++m)
    sum += std::exp((s - 1.0 - nu) * std::log(static_cast<double>(m))) * std::conj(pn.a(m));
  sum *= std::pow(static_cast<double>(n), nu);
  const double ex = nu - pn.tail_bound_exponent - s.real();  // tail sum of m^{sigma - 1 - nu + beta}
  const double tail = std::pow(static_cast<double>(n), nu) * pn.tail_constant * std::pow(m_max, -ex) / ex;
  const cplx pre = std::exp(s * std::log(2.0 * kPi)) * gamma_complex(params.kappa() - s).value;
  return {pre * sum, std::abs(pre) * tail, "poincare-truncated"};
}

cplx spectral_prefactor(cplx s, const SpaceParams& params) {
  const double k = params.k;
  return std::exp((-2.0 * k + 1.0 + s) * std::log(2.0) - (k / 2.0 + 0.25 - s / 2.0) * std::log(double(params.N))) *
         kPi * std::tgamma(k - 0.5) / static_cast<double>(params.index_i4N);
}

KernelValue kernel_coeff_spectral(int n, cplx s, const Eigenbasis& eb, const SpaceParams& params) {
  require(n >= 1, "kernel: n must be positive");
  cplx sum = 0.0;
  double err = 0.0;
  for (const auto& f : eb.forms) {
    if (n > f.expansion.M()) fail(ErrorKind::Truncation, "spectral route: n beyond the stored expansion");
    const CompletedLValue L = l_star(f.fricke_image, f.expansion, params, s);
    const cplx w = f.expansion.a(n) / f.petersson_norm;
    sum += L.value * w;
    err += L.error() * std::abs(w) + 1e-15 * std::abs(L.value * w);
  }
  const cplx pre = spectral_prefactor(s, params);
  return {pre * sum, std::abs(pre) * err, "spectral"};
}

DValue average_sum_D(cplx s, const Eigenbasis& eb, const SpaceParams& params) {
  DValue out;
  out.s = s;
  for (std::size_t j = 0; j < eb.forms.size(); ++j) {
    const auto& f = eb.forms[j];
    DTerm t;
    t.j = static_cast<int>(j);
    const CompletedLValue L = l_star(f, params, s);
    t.lstar = L.value;
    t.lambda = f.lambda;
    t.a1 = f.a1;
    t.norm = f.petersson_norm;
    double err = L.error();
    if (f.lambda != 0) {
      t.contribution = t.lstar * static_cast<double>(t.lambda) * t.a1 / t.norm;
    } else {
      const CompletedLValue LH = l_star(f.fricke_image, f.expansion, params, s);
      t.contribution = LH.value * t.a1 / t.norm;
      err = LH.error();
    }
    t.error = err * std::abs(t.a1) / t.norm + 1e-15 * std::abs(t.contribution);
    out.value += t.contribution;
    out.error += t.error;
    out.terms.push_back(t);
  }
  return out;
}

std::vector<double> strip_grid(const SpaceParams& params, int grid) {
  if (grid < 16) fail(ErrorKind::InvalidArgument, "scan grid needs at least 16 points");
  std::vector<double> out;
  for (int i = 0; i < grid; ++i) out.push_back(params.strip_lo + (i + 0.5) / grid);
  const double center = params.kappa() / 2.0;
  if (grid % 2 == 0) out.insert(out.begin() + grid / 2, center);
  return out;
}

ScanReport nonvanishing_scan(double r0, int grid, const Eigenbasis& eb, const SpaceParams& params) {
  ScanReport rep;
  rep.r0 = r0;
  rep.sigma = strip_grid(params, grid);
  rep.dimension = static_cast<int>(eb.forms.size());
  rep.min_abs_D = std::numeric_limits<double>::infinity();
  for (double sigma : rep.sigma) {
    const DValue d = average_sum_D(cplx(sigma, r0), eb, params);
    rep.D.push_back(d.value);
    rep.error.push_back(d.error);
    rep.breakdown.push_back(d.terms);
    rep.min_abs_D = std::min(rep.min_abs_D, std::abs(d.value));
    rep.max_error = std::max(rep.max_error, d.error);
  }
  if (rep.dimension == 0) {
    rep.min_abs_D = 0.0;
    rep.verdict = "trivially zero (d=0)";
  } else {
    rep.verdict = rep.min_abs_D > 10.0 * rep.max_error ? "verified non-vanishing" : "inconclusive";
  }
  return rep;
}

void write_scan_csv(std::ostream& out, const ScanReport& rep) {
  out << "sigma,r0,D_re,D_im,D_abs,error_bound\n" << std::setprecision(17);
  for (std::size_t i = 0; i < rep.sigma.size(); ++i)
    out << rep.sigma[i] << ',' << rep.r0 << ',' << rep.D[i].real() << ',' << rep.D[i].imag() << ','
        << std::abs(rep.D[i]) << ',' << rep.error[i] << '\n';
}

ProofDiagnostic proof_inequality_diagnostic(double delta, double r0, const SpaceParams& params,
                                            const KernelCutoffs& cut) {
  require(delta >= 0.0 && delta < 0.5, "proof diagnostic: delta must lie in [0, 1/2)");
  ProofDiagnostic d;
  d.k = params.k;
  d.N = params.N;
  d.delta = delta;
  d.r0 = r0;
  d.s = cplx(params.kappa() / 2.0 - delta, r0);
  const DirectCorrection c = direct_correction(1, d.s, params, cut);
  d.ratio = std::abs(c.correction);
  d.abs_bound = c.abs_sum;
  d.tail = c.tail;
  return d;
}

TripleCheck triple_check(int n, cplx s, const FormsDocument& doc, const KernelCutoffs& cut, double tol) {
  const SpaceParams& params = doc.space.params;
  TripleCheck t;
  t.n = n;
  t.s = s;
  auto attempt = [&](const std::string& name, auto&& fn) {
    RouteResult r;
    r.route = name;
    try {
      r.value = fn();
      r.ran = true;
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::Region) throw;
      r.skipped = "out of region";
    }
    t.routes.push_back(r);
  };
  attempt("direct", [&] { return kernel_coeff_direct(n, s, params, cut); });
  attempt("poincare", [&] { return kernel_coeff_via_poincare(n, s, doc); });
  attempt("spectral", [&] { return kernel_coeff_spectral(n, s, doc.eigen, params); });
  for (std::size_t i = 0; i < t.routes.size(); ++i) {
    if (!t.routes[i].ran) continue;
    ++t.compared;
    for (std::size_t j = i + 1; j < t.routes.size(); ++j) {
      if (!t.routes[j].ran) continue;
      const cplx a = t.routes[i].value.value, b = t.routes[j].value.value;
      t.max_relative_delta = std::max(t.max_relative_delta, std::abs(a - b) / std::max(std::abs(a), std::abs(b)));
    }
  }
  t.pass = t.max_relative_delta < tol;
  return t;
}

nlohmann::json to_json(const TripleCheck& t) {
  nlohmann::json routes = nlohmann::json::object();
  for (const auto& r : t.routes) {
    if (r.ran)
      routes[r.route] = {{"re", r.value.value.real()}, {"im", r.value.value.imag()}, {"error", r.value.error}};
    else
      routes[r.route] = {{"skipped", r.skipped}};
  }
  return {{"n", t.n},
          {"s", {t.s.real(), t.s.imag()}},
          {"routes", routes},
          {"max_relative_delta", t.max_relative_delta},
          {"compared_routes", t.compared},
          {"verdict", t.compared < 2 ? "single-route" : (t.pass ? "pass" : "fail")}};
}

}  // namespace hiw
