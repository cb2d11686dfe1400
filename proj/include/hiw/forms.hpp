#pragma once

// Concrete models of S_{k+1/2}(4N, psi): Poincare series, Hecke operators
// T(p^2), the Fricke involution and a Hecke eigenbasis.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

#include "hiw/arith.hpp"

namespace hiw {

std::int64_t index_gamma0(std::int64_t level);

struct SpaceParams {
  int k = 0;
  int N = 1;
  int character_index = 0;  // position in enumerate_even_characters(4N)
  DirichletCharacter psi;
  std::int64_t index_i4N = 0;
  double strip_lo = 0.0;  // k/2 - 1/4
  double strip_hi = 0.0;  // k/2 + 3/4

  double kappa() const { return k + 0.5; }
  std::int64_t level() const { return 4 * static_cast<std::int64_t>(N); }
};

/// Validates k >= 3, N >= 1 and picks the character by index.
SpaceParams make_space_params(int k, int N, int character_index = 0);

/// Truncated q-expansion a(0) + sum_{n=1}^{M} a(n) q^n.
struct QExpansion {
  cplx constant{0.0, 0.0};
  std::vector<cplx> coeffs;        // a(1..M) at index n - 1
  std::vector<double> coeff_error;  // optional per-coefficient error bound
  double tail_bound_exponent = 0.0;
  double tail_constant = 1.0;       // |a(n)| <= C n^beta beyond M

  int M() const { return static_cast<int>(coeffs.size()); }
  cplx a(std::int64_t n) const {
    if (n == 0) return constant;
    return n >= 1 && n <= M() ? coeffs[n - 1] : cplx{0.0, 0.0};
  }
  cplx evaluate(cplx z) const;
  /// Bound on sum_{n > M} C n^beta e^{-2 pi n y0}.
  double tail_error(double y0) const;
};

/// Exponent beta = k/2 - 1/28 (+ epsilon) for cusp-form coefficient growth.
double cusp_growth_exponent(int k);

/// a_{P_n}(m) for m = 1..M with the c-sum over 4N | c <= c_max; one
/// expansion per entry of `ns`. coeff_error holds the rigorous c-tail bound.
std::vector<QExpansion> poincare_rows(const std::vector<int>& ns, const SpaceParams& params,
                                      int M, std::int64_t c_max);
QExpansion poincare_expansion(int n, const SpaceParams& params, int M, std::int64_t c_max);

/// Rigorous bound on the part of the c-sum beyond c_max for coefficient m.
double poincare_tail_bound(int m, const SpaceParams& params, std::int64_t c_max);

QExpansion theta_series(int M);
QExpansion weight2_form_F(int M);
QExpansion multiply(const QExpansion& f, const QExpansion& g, int M);

/// Cusp forms of S_{k+1/2}(4) from monomials theta^{2k+1-4b} F^b that vanish
/// at the cusps infinity and 0.
std::vector<QExpansion> theta_ring_cusp_forms(int k, int M);

struct SpaceOptions {
  int M = 0;              // 0: automatic
  std::int64_t c_max = 0;  // 0: automatic
  int candidates = 0;     // number of P_m examined, 0: automatic
  double rank_tol = 1e-8;
};

struct Space {
  SpaceParams params;
  int M = 0;
  std::int64_t c_max = 0;
  int d = 0;
  std::vector<int> generators;        // indices m with basis B_i = P_{m_i}
  std::vector<QExpansion> basis;      // expansions of B_i, length M
  std::vector<double> gram_spectrum;  // eigenvalues of the normalized candidate Gram matrix
  Eigen::MatrixXcd gram;              // <B_i, B_j>
  std::vector<int> hecke_primes;
  int theta_ring_dimension = -1;      // N = 1 and trivial psi only
};

/// Gamma(k - 1/2) / (i_{4N} (4 pi n)^{k - 1/2}): <f, P_n> = this * a_f(n).
double petersson_poincare_constant(int n, const SpaceParams& params);

std::vector<int> default_hecke_primes(int N);

Space space_basis(const SpaceParams& params, const SpaceOptions& options = {});

/// Coordinates x with a_f(m_j) = sum_i x_i a_{B_i}(m_j) at the generator indices.
Eigen::VectorXcd coordinates(const Space& space, const QExpansion& f);
/// sum_i x_i B_i, truncated at the space's M.
QExpansion combine(const Space& space, const Eigen::VectorXcd& x);

/// Index of the character psibar (4N/.) that H_{4N} maps S_{k+1/2}(4N, psi) into.
int fricke_character_index(const SpaceParams& params);

/// Three-term T(p^2) action; output length M_out requires M >= p^2 M_out.
QExpansion hecke_tp2(const QExpansion& f, int p, const SpaceParams& params, int M_out);

/// Matrix of T(p^2) in the basis B: T B_i = sum_l H(l, i) B_l.
Eigen::MatrixXcd hecke_matrix(const Space& space, int p);

/// f|H_{4N}(z) = i^{k+1/2} (4N)^{-k/2-1/4} z^{-k-1/2} f(-1/(4Nz)), principal branches.
cplx fricke_slash_value(const QExpansion& f, const SpaceParams& params, cplx z);

struct FrickeFit {
  Eigen::MatrixXcd matrix;  // B_i | H = sum_l matrix(l, i) B'_l, B' the target basis
  double residual = 0.0;    // relative least-squares residual
};
/// Least-squares fit of B_i | H_{4N} in the basis of `target` from point values.
FrickeFit fricke_matrix(const Space& space, const Space& target);
FrickeFit fricke_matrix(const Space& space);

/// b(n) = a(4n).
QExpansion u4(const QExpansion& f, int M_out);

/// Sign e_k = (-1)^{floor((k+1)/2)} with f | H_4 = e_k 2^{-k} u4(f) on the plus space.
int plus_space_fricke_sign(int k);

/// Coordinates (columns) of a basis of the plus space inside S_{k+1/2}(4).
Eigen::MatrixXcd plus_space_coordinates(const Space& space);

struct EigenformRecord {
  QExpansion expansion;
  QExpansion fricke_image;  // f | H_{4N}
  std::map<int, cplx> hecke_eigenvalues;
  int lambda = 1;  // f | K H_{4N} = lambda f; 0 when H_{4N} leaves the space
  double petersson_norm = 0.0;
  cplx a1{0.0, 0.0};
  Eigen::VectorXcd poincare_coords;
  bool unresolved_multiplicity = false;
};

struct Eigenbasis {
  std::vector<EigenformRecord> forms;
  std::map<int, Eigen::MatrixXcd> hecke;  // in the basis B
  FrickeFit fricke;
  int fricke_target_character = 0;
};

/// Simultaneous eigenforms of T(p^2) for real psi, and of K H_{4N} when H_{4N}
/// preserves the space. Otherwise `twisted` (built on demand when null) is the
/// space of character psibar (4N/.) that receives f | H_{4N}.
Eigenbasis eigenbasis(const Space& space, const Space* twisted = nullptr);

/// Sign from the ratio r(y) = f|H(iy) / f(iy) at y in {1.05, 1.15, 1.30}/sqrt(4N).
int fricke_k_eigenvalue(const QExpansion& f, const SpaceParams& params);

/// <f, f> from the coordinates of f in the basis B and the Poincare pairing.
double petersson_norm(const Space& space, const QExpansion& f);

}  // namespace hiw
