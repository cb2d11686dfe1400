#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "hiw/error.hpp"
#include "hiw/forms.hpp"

namespace hiw {

namespace {

// Weighted relative residual of f against sum x_i B_i over the first indices.
double span_residual(const Space& space, const QExpansion& f, const Eigen::VectorXcd& x) {
  const int gmax = space.generators.empty() ? 1 : space.generators.back();
  const int top = std::min({space.M, f.M(), 4 * gmax + 24});
  const double w = -(space.params.k + 0.5) / 2.0;
  double num = 0.0, den = 0.0;
  for (int n = 1; n <= top; ++n) {
    cplx model = 0.0;
    for (int i = 0; i < space.d; ++i) model += x(i) * space.basis[i].a(n);
    const double s = std::pow(static_cast<double>(n), w);
    num += std::norm(s * (model - f.a(n)));
    den += std::norm(s * f.a(n));
  }
  return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

}  // namespace

int fricke_k_eigenvalue(const QExpansion& f, const SpaceParams& params) {
  const double r0 = 1.0 / std::sqrt(static_cast<double>(params.level()));
  int sign = 0;
  int used = 0;
  for (double t : {1.05, 1.15, 1.30}) {
    const cplx z(0.0, t * r0);
    const cplx v = f.evaluate(z);
    double mass = 0.0;
    for (int n = 1; n <= f.M(); ++n) mass += std::abs(f.a(n)) * std::exp(-2.0 * std::numbers::pi * n * t * r0);
    if (std::abs(v) < 1e-10 * mass) continue;
    const cplx r = fricke_slash_value(f, params, z) / v;
    const int s = r.real() > 0 ? 1 : -1;
    if (std::abs(r - static_cast<double>(s)) > 1e-6)
      fail(ErrorKind::Inconsistency, "Fricke ratio r(y) is not +-1 (|r - sign| = " + std::to_string(std::abs(r - double(s))) + ")");
    if (used > 0 && s != sign) fail(ErrorKind::Inconsistency, "Fricke ratio changes sign between test points");
    sign = s;
    ++used;
  }
  if (used == 0) fail(ErrorKind::Indeterminate, "f(iy) below noise floor at every test point");
  return sign;
}

double petersson_norm(const Space& space, const QExpansion& f) {
  const Eigen::VectorXcd x = coordinates(space, f);
  const double res = span_residual(space, f, x);
  if (res > 1e-6) fail(ErrorKind::Inconsistency, "form is not in the span of the basis (residual " + std::to_string(res) + ")");
  cplx total = 0.0;
  for (int j = 0; j < space.d; ++j) {
    const int m = space.generators[j];
    // <f, f> = sum_j conj(x_j) <f, P_{m_j}>
    total += std::conj(x(j)) * petersson_poincare_constant(m, space.params) * f.a(m);
  }
  if (!(total.real() > 0.0) || std::abs(total.imag()) > 1e-8 * std::abs(total.real()))
    fail(ErrorKind::Inconsistency, "Petersson norm is not positive real; a convention upstream is off");
  return total.real();
}

Eigenbasis eigenbasis(const Space& space, const Space* twisted) {
  const SpaceParams& params = space.params;
  if (!params.psi.is_real()) fail(ErrorKind::InvalidArgument, "eigenbasis: the character must be real");
  Eigenbasis eb;
  const int d = space.d;
  eb.fricke_target_character = fricke_character_index(params);
  if (d == 0) return eb;
  const bool self_dual = eb.fricke_target_character == params.character_index;

  for (int p : space.hecke_primes) eb.hecke[p] = hecke_matrix(space, p);
  Space built;
  if (self_dual) {
    eb.fricke = fricke_matrix(space);
  } else {
    if (twisted == nullptr) {
      SpaceOptions opt;
      opt.M = space.M;
      opt.c_max = space.c_max;
      built = space_basis(make_space_params(params.k, params.N, eb.fricke_target_character), opt);
      twisted = &built;
    }
    if (twisted->params.character_index != eb.fricke_target_character)
      fail(ErrorKind::InvalidArgument, "eigenbasis: twisted space has the wrong character");
    eb.fricke = fricke_matrix(space, *twisted);
  }
  if (eb.fricke.residual > 1e-9)
    fail(ErrorKind::Inconsistency, "Fricke image is not in the target span (residual " + std::to_string(eb.fricke.residual) + ")");

  // Petersson-orthonormal coordinates y = L^T x
  const Eigen::MatrixXd G = space.gram.real();
  const Eigen::LLT<Eigen::MatrixXd> llt(G);
  if (llt.info() != Eigen::Success) fail(ErrorKind::IllConditioned, "Gram matrix is not positive definite");
  const Eigen::MatrixXd L = llt.matrixL();
  const Eigen::MatrixXd Lt = L.transpose();
  auto to_y = [&](const Eigen::MatrixXcd& T) -> Eigen::MatrixXd {
    const Eigen::MatrixXd Tr = T.real();
    return Lt * Tr * Lt.inverse();
  };

  std::vector<std::pair<int, Eigen::MatrixXd>> ops;
  for (const auto& [p, T] : eb.hecke) ops.emplace_back(p, to_y(T));
  const Eigen::MatrixXd Hy = self_dual ? to_y(eb.fricke.matrix) : Eigen::MatrixXd::Zero(d, d);

  // generic combination to split joint eigenspaces
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(d, d);
  const double weights[] = {1.0, 0.7548776662, 0.5698402910, 0.4301597090, 0.3247179572};
  for (std::size_t i = 0; i < ops.size(); ++i) {
    const double nrm = ops[i].second.norm();
    if (nrm > 0) S += weights[i % 5] * ops[i].second / nrm;
  }
  if (self_dual) S += 0.2718281828 * Hy / Hy.norm();
  S = 0.5 * (S + S.transpose()).eval();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const Eigen::MatrixXd Y = es.eigenvectors();

  for (int j = 0; j < d; ++j) {
    const Eigen::VectorXd y = Y.col(j);
    EigenformRecord rec;
    for (const auto& [p, Ty] : ops) rec.hecke_eigenvalues[p] = y.dot(Ty * y);
    const double h = y.dot(Hy * y);
    const Eigen::VectorXd x = Lt.triangularView<Eigen::Upper>().solve(y);
    QExpansion f = combine(space, x.cast<cplx>());
    for (auto& c : f.coeffs) c = c.real();

    // first coefficient that is not numerically zero relative to the n^{kappa/2} growth
    const double w = -params.kappa() / 2.0;
    double scale = 0.0;
    for (int n = 1; n <= f.M(); ++n) scale = std::max(scale, std::abs(f.a(n)) * std::pow(n, w));
    int lead = 1;
    while (lead < f.M() && std::abs(f.a(lead)) * std::pow(lead, w) < 1e-6 * scale) ++lead;
    const cplx norm_by = f.a(lead);
    for (auto& c : f.coeffs) c /= norm_by;
    for (auto& e : f.coeff_error) e /= std::abs(norm_by);
    f.tail_constant /= std::abs(norm_by);
    rec.expansion = f;
    rec.a1 = f.a(1);
    rec.poincare_coords = x.cast<cplx>() / norm_by;
    if (self_dual) {
      rec.lambda = fricke_k_eigenvalue(f, params);
      if (std::abs(h - rec.lambda) > 1e-6)
        fail(ErrorKind::Inconsistency, "Fricke sign from evaluation disagrees with the fitted Fricke matrix");
      rec.fricke_image = f;
      for (auto& c : rec.fricke_image.coeffs) c *= static_cast<double>(rec.lambda);
    } else {
      rec.lambda = 0;
      const Eigen::VectorXcd xt = eb.fricke.matrix * rec.poincare_coords;
      rec.fricke_image = combine(*twisted, xt);
      for (auto& c : rec.fricke_image.coeffs) c = c.real();
    }
    rec.petersson_norm = petersson_norm(space, f);
    eb.forms.push_back(std::move(rec));
  }

  // joint eigenvalue collisions that no tested operator separates
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) {
      if (i == j || eb.forms[i].lambda != eb.forms[j].lambda) continue;
      bool same = true;
      for (const auto& [p, ev] : eb.forms[i].hecke_eigenvalues) {
        const cplx other = eb.forms[j].hecke_eigenvalues.at(p);
        if (std::abs(ev - other) > 1e-6 * std::max(std::abs(ev), 1.0)) same = false;
      }
      if (same) eb.forms[i].unresolved_multiplicity = true;
    }

  std::stable_sort(eb.forms.begin(), eb.forms.end(), [](const EigenformRecord& a, const EigenformRecord& b) {
    if (a.lambda != b.lambda) return a.lambda > b.lambda;
    return a.hecke_eigenvalues.begin()->second.real() < b.hecke_eigenvalues.begin()->second.real();
  });
  return eb;
}

}  // namespace hiw
