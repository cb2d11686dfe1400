#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hiw/error.hpp"
#include "hiw/forms.hpp"
#include "hiw/special.hpp"

namespace hiw {

namespace {

constexpr double kPi = std::numbers::pi;

int candidate_count(const SpaceParams& p) {
  return static_cast<int>(std::ceil(p.kappa() * static_cast<double>(p.index_i4N) / 12.0)) + 4;
}

std::int64_t round_to_level(std::int64_t c, std::int64_t q) { return std::max(q, c / q * q); }

// Normalized candidate Gram matrix D^{-1/2} G D^{-1/2}; zero rows stay zero.
Eigen::MatrixXcd normalized(const Eigen::MatrixXcd& G) {
  const auto n = G.rows();
  Eigen::VectorXd s(n);
  for (int i = 0; i < n; ++i) s(i) = G(i, i).real() > 0 ? 1.0 / std::sqrt(G(i, i).real()) : 0.0;
  return s.asDiagonal() * G * s.asDiagonal();
}

int numerical_rank(const Eigen::VectorXd& ev, double tol) {
  const double top = ev.size() ? ev.maxCoeff() : 0.0;
  int r = 0;
  for (int i = 0; i < ev.size(); ++i)
    if (ev(i) > tol * top) ++r;
  return r;
}

double min_eig(const Eigen::MatrixXcd& G, const std::vector<int>& idx) {
  Eigen::MatrixXcd S(idx.size(), idx.size());
  for (std::size_t a = 0; a < idx.size(); ++a)
    for (std::size_t b = 0; b < idx.size(); ++b) S(a, b) = G(idx[a], idx[b]);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(S, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

}  // namespace

double petersson_poincare_constant(int n, const SpaceParams& params) {
  const double nu = params.k - 0.5;
  return std::tgamma(nu) / (static_cast<double>(params.index_i4N) * std::pow(4.0 * kPi * n, nu));
}

std::vector<int> default_hecke_primes(int N) {
  std::vector<int> out;
  for (int p : {3, 5, 7})
    if ((2 * N) % p != 0) out.push_back(p);
  for (int p : {11, 13, 17})
    if (out.size() < 2 && (2 * N) % p != 0) out.push_back(p);
  return out;
}

Space space_basis(const SpaceParams& params, const SpaceOptions& options) {
  Space sp;
  sp.params = params;
  sp.hecke_primes = default_hecke_primes(params.N);
  const std::int64_t q = params.level();
  const int cand = options.candidates > 0 ? options.candidates : candidate_count(params);

  // rank from the candidate Gram matrix, which needs a_{P_m}(n) only for m, n <= cand
  const std::int64_t c_rank = options.c_max > 0 ? round_to_level(options.c_max, q) : round_to_level(6000 * params.N, q);
  std::vector<int> ms(cand);
  for (int m = 1; m <= cand; ++m) ms[m - 1] = m;
  const auto rows = poincare_rows(ms, params, cand, c_rank);
  Eigen::MatrixXcd G(cand, cand);
  for (int m = 1; m <= cand; ++m)
    for (int n = 1; n <= cand; ++n) G(m - 1, n - 1) = petersson_poincare_constant(n, params) * rows[m - 1].a(n);
  G = 0.5 * (G + G.adjoint()).eval();
  // <P_m, P_m> indistinguishable from zero at this cutoff: P_m vanishes
  for (int m = 1; m <= cand; ++m)
    if (std::abs(rows[m - 1].a(m)) <= 10.0 * rows[m - 1].coeff_error[m - 1] + 1e-9) {
      G.row(m - 1).setZero();
      G.col(m - 1).setZero();
    }
  const Eigen::MatrixXcd Gn = normalized(G);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(Gn, Eigen::EigenvaluesOnly);
  const Eigen::VectorXd ev = es.eigenvalues();
  sp.gram_spectrum.assign(ev.data(), ev.data() + ev.size());
  const int r1 = numerical_rank(ev, options.rank_tol), r2 = numerical_rank(ev, options.rank_tol / 10.0);
  if (r1 != r2)
    fail(ErrorKind::IllConditioned, "ill-conditioned space: rank " + std::to_string(r1) + " at tol vs " +
                                        std::to_string(r2) + " at tol/10; increase M or c_max");
  if (r1 == cand)
    fail(ErrorKind::IllConditioned, "candidate Poincare series all independent; increase the candidate count");
  sp.d = r1;

  // generators in natural order, skipping candidates that would spoil conditioning
  for (int m = 0; m < cand && static_cast<int>(sp.generators.size()) < sp.d; ++m) {
    if (Gn(m, m).real() <= 0.0) continue;
    std::vector<int> trial;
    for (int g : sp.generators) trial.push_back(g - 1);
    trial.push_back(m);
    if (min_eig(Gn, trial) > 1e-4) sp.generators.push_back(m + 1);
  }
  for (int m = 0; m < cand && static_cast<int>(sp.generators.size()) < sp.d; ++m) {
    if (std::find(sp.generators.begin(), sp.generators.end(), m + 1) != sp.generators.end()) continue;
    std::vector<int> trial;
    for (int g : sp.generators) trial.push_back(g - 1);
    trial.push_back(m);
    if (min_eig(Gn, trial) > 10.0 * options.rank_tol) sp.generators.push_back(m + 1);
  }
  if (static_cast<int>(sp.generators.size()) != sp.d)
    fail(ErrorKind::IllConditioned, "could not select a well-conditioned generating set");
  std::sort(sp.generators.begin(), sp.generators.end());

  const int pmax = sp.hecke_primes.empty() ? 1 : *std::max_element(sp.hecke_primes.begin(), sp.hecke_primes.end());
  const int gmax = sp.generators.empty() ? 1 : sp.generators.back();
  sp.M = options.M > 0 ? options.M : std::max({200, 40 * sp.d, pmax * pmax * gmax + 4});
  sp.c_max = options.c_max > 0 ? round_to_level(options.c_max, q)
                               : round_to_level(std::max<std::int64_t>(400 * params.N, std::min<std::int64_t>(50 * sp.M, 6000 * params.N)), q);
  if (sp.d > 0) sp.basis = poincare_rows(sp.generators, params, sp.M, sp.c_max);

  sp.gram.resize(sp.d, sp.d);
  for (int i = 0; i < sp.d; ++i)
    for (int j = 0; j < sp.d; ++j)
      sp.gram(i, j) = petersson_poincare_constant(sp.generators[j], params) * sp.basis[i].a(sp.generators[j]);
  sp.gram = 0.5 * (sp.gram + sp.gram.adjoint()).eval();

  if (params.N == 1 && params.psi.is_trivial()) {
    sp.theta_ring_dimension = static_cast<int>(theta_ring_cusp_forms(params.k, 8).size());
    if (sp.theta_ring_dimension != sp.d)
      fail(ErrorKind::Inconsistency, "Poincare rank " + std::to_string(sp.d) + " disagrees with theta-ring dimension " +
                                         std::to_string(sp.theta_ring_dimension));
  }
  return sp;
}

Eigen::VectorXcd coordinates(const Space& space, const QExpansion& f) {
  const int d = space.d;
  Eigen::MatrixXcd At(d, d);
  Eigen::VectorXcd rhs(d);
  for (int j = 0; j < d; ++j) {
    rhs(j) = f.a(space.generators[j]);
    for (int i = 0; i < d; ++i) At(j, i) = space.basis[i].a(space.generators[j]);
  }
  return At.fullPivLu().solve(rhs);
}

QExpansion combine(const Space& space, const Eigen::VectorXcd& x) {
  QExpansion f;
  f.coeffs.assign(space.M, 0.0);
  f.coeff_error.assign(space.M, 0.0);
  f.tail_bound_exponent = cusp_growth_exponent(space.params.k);
  double c = 0.0;
  for (int i = 0; i < space.d; ++i) {
    const QExpansion& b = space.basis[i];
    const bool has_err = static_cast<int>(b.coeff_error.size()) >= space.M;
    for (int n = 0; n < space.M; ++n) {
      f.coeffs[n] += x(i) * b.coeffs[n];
      if (has_err) f.coeff_error[n] += std::abs(x(i)) * b.coeff_error[n];
    }
    c += std::abs(x(i)) * space.basis[i].tail_constant;
  }
  f.tail_constant = c;
  return f;
}

QExpansion hecke_tp2(const QExpansion& f, int p, const SpaceParams& params, int M_out) {
  require(is_prime(p), "hecke_tp2: p must be prime");
  if ((2 * params.N) % p == 0) fail(ErrorKind::InvalidArgument, "hecke_tp2: p must not divide 2N");
  const std::int64_t p2 = static_cast<std::int64_t>(p) * p;
  if (static_cast<std::int64_t>(f.M()) < p2 * M_out)
    fail(ErrorKind::Truncation, "hecke_tp2: truncation too short, need M >= " + std::to_string(p2 * M_out));
  const int k = params.k;
  const cplx psi_p = params.psi(p), psi_p2 = params.psi(p2);
  const double pk1 = std::pow(static_cast<double>(p), k - 1), p2k1 = std::pow(static_cast<double>(p), 2 * k - 1);
  QExpansion g;
  g.coeffs.assign(M_out, 0.0);
  g.tail_bound_exponent = f.tail_bound_exponent;
  g.tail_constant = f.tail_constant * (std::pow(p2, f.tail_bound_exponent) + pk1 + p2k1);
  for (int n = 1; n <= M_out; ++n) {
    const std::int64_t sn = (k % 2 == 0) ? n : -n;
    cplx b = f.a(p2 * n) + psi_p * static_cast<double>(kronecker(sn, p)) * pk1 * f.a(n);
    if (n % p2 == 0) b += psi_p2 * p2k1 * f.a(n / p2);
    g.coeffs[n - 1] = b;
  }
  return g;
}

Eigen::MatrixXcd hecke_matrix(const Space& space, int p) {
  Eigen::MatrixXcd T(space.d, space.d);
  const int m_out = space.M / (p * p);
  for (int i = 0; i < space.d; ++i) T.col(i) = coordinates(space, hecke_tp2(space.basis[i], p, space.params, m_out));
  return T;
}

cplx fricke_slash_value(const QExpansion& f, const SpaceParams& params, cplx z) {
  const double kappa = params.kappa();
  const double level = static_cast<double>(params.level());
  const cplx w = -1.0 / (level * z);
  const cplx factor = std::exp(cplx(0.0, kPi * kappa / 2.0) - kappa * std::log(z) - 0.5 * kappa * std::log(level));
  return factor * f.evaluate(w);
}

FrickeFit fricke_matrix(const Space& space, const Space& target) {
  FrickeFit fit;
  const int d = space.d, dt = target.d;
  fit.matrix = Eigen::MatrixXcd::Zero(dt, d);
  if (d == 0) return fit;
  if (dt == 0) fail(ErrorKind::Inconsistency, "Fricke target space is empty");
  const int J = std::max(24, 6 * std::max(d, dt));
  const double r0 = 1.0 / std::sqrt(static_cast<double>(space.params.level()));
  Eigen::MatrixXcd E(J, dt), F(J, d);
  for (int j = 0; j < J; ++j) {
    const double theta = kPi * (0.25 + 0.5 * (j + 0.5) / J);
    const double rho = (j % 3 == 0) ? 0.92 : ((j % 3 == 1) ? 1.0 : 1.08);
    const cplx z = std::polar(rho * r0, theta);
    for (int l = 0; l < dt; ++l) E(j, l) = target.basis[l].evaluate(z);
    for (int l = 0; l < d; ++l) F(j, l) = fricke_slash_value(space.basis[l], space.params, z);
  }
  fit.matrix = E.colPivHouseholderQr().solve(F);
  fit.residual = (E * fit.matrix - F).norm() / F.norm();
  return fit;
}

FrickeFit fricke_matrix(const Space& space) { return fricke_matrix(space, space); }

int fricke_character_index(const SpaceParams& params) {
  const std::int64_t q = params.level();
  const auto chars = enumerate_even_characters(q);
  for (std::size_t i = 0; i < chars.size(); ++i) {
    bool match = true;
    for (std::int64_t a = 1; a < q && match; a += 2) {
      if (gcd64(a, q) != 1) continue;
      const cplx want = params.psi.conj(a) * static_cast<double>(kronecker(q, a));
      if (std::abs(chars[i](a) - want) > 1e-9) match = false;
    }
    if (match) return static_cast<int>(i);
  }
  fail(ErrorKind::Inconsistency, "twisted character not found");
}

QExpansion u4(const QExpansion& f, int M_out) {
  if (f.M() < 4 * M_out) fail(ErrorKind::Truncation, "u4: need M >= " + std::to_string(4 * M_out));
  QExpansion g;
  g.constant = f.constant;
  g.coeffs.resize(M_out);
  for (int n = 1; n <= M_out; ++n) g.coeffs[n - 1] = f.a(4 * n);
  g.tail_bound_exponent = f.tail_bound_exponent;
  g.tail_constant = f.tail_constant * std::pow(4.0, f.tail_bound_exponent);
  return g;
}

int plus_space_fricke_sign(int k) { return ((k + 1) / 2) % 2 == 0 ? 1 : -1; }

Eigen::MatrixXcd plus_space_coordinates(const Space& space) {
  require(space.params.N == 1, "plus space is defined here for level 4 only");
  const int k = space.params.k;
  // residues (-1)^k n = 2, 3 (mod 4) must vanish
  std::vector<int> bad;
  for (int n = 1; n <= std::min(space.M, 60 + 8 * space.d); ++n) {
    const int r = (((k % 2 == 0) ? n : -n) % 4 + 4) % 4;
    if (r == 2 || r == 3) bad.push_back(n);
  }
  Eigen::MatrixXcd C(bad.size(), space.d);
  for (std::size_t j = 0; j < bad.size(); ++j) {
    const double w = std::pow(static_cast<double>(bad[j]), -(k + 0.5) / 2.0);
    for (int i = 0; i < space.d; ++i) C(j, i) = w * space.basis[i].a(bad[j]);
  }
  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(C, Eigen::ComputeFullV);
  const Eigen::VectorXd sv = svd.singularValues();
  const double top = sv.size() ? sv(0) : 0.0;
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i)
    if (sv(i) > 1e-8 * top) ++rank;
  return svd.matrixV().rightCols(space.d - rank);
}

}  // namespace hiw
