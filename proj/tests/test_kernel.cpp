#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "hiw/error.hpp"
#include "hiw/kernel.hpp"
#include "hiw/special.hpp"
#include "support.hpp"

using namespace hiw;
using hiw::testing::shipped;

namespace {

constexpr double kPi = std::numbers::pi;

double rel(cplx a, cplx b) { return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300}); }

EigenformRecord rescaled(EigenformRecord f, cplx c) {
  for (auto& a : f.expansion.coeffs) a *= c;
  for (auto& a : f.fricke_image.coeffs) a *= c;
  f.a1 *= c;
  f.poincare_coords *= c;
  f.petersson_norm *= std::norm(c);
  return f;
}

}  // namespace

TEST(GammaK, ExampleAndDefinition) {
  EXPECT_LT(std::abs(gamma_k(1.0, 3) - cplx(0.0, 0.375 * std::sqrt(kPi))), 1e-14);
  for (cplx s : {cplx(2.3, 0.0), cplx(3.25, 1.5), cplx(-0.5, 2.0)}) {
    const cplx expect = 0.5 * std::exp(cplx(0.0, kPi / 2.0) * s) * gamma_complex(s).value * gamma_complex(6.5 - s).value;
    EXPECT_LT(rel(gamma_k(s, 6), expect), 1e-13);
  }
  EXPECT_THROW(gamma_k(0.0, 6), PoleError);
  EXPECT_THROW(gamma_k(6.5, 6), PoleError);
  EXPECT_THROW(gamma_k(-2.0, 6), PoleError);
}

TEST(GammaK, ConjugationMatchesReflection) {
  // conj(gamma_k(s)) e^{pi i conj(s)} = gamma_k(conj s)
  for (cplx s : {cplx(2.3, 0.7), cplx(3.25, -1.5)}) {
    const cplx lhs = std::conj(gamma_k(s, 6)) * std::exp(cplx(0.0, kPi) * std::conj(s));
    EXPECT_LT(rel(lhs, gamma_k(std::conj(s), 6)), 1e-13);
  }
}

TEST(Direct, MainTermAndDecomposition) {
  const SpaceParams p = make_space_params(6, 1);
  for (int n : {1, 2, 5}) {
    const cplx s(2.7, 0.4);
    const cplx main = std::pow(2.0 * kPi, s) * gamma_complex(p.kappa() - s).value * std::pow(double(n), s - 1.0);
    EXPECT_LT(rel(kernel_main_term(n, s, p), main), 1e-13);
    const auto v = kernel_coeff_direct(n, s, p);
    const auto c = direct_correction(n, s, p);
    EXPECT_LT(rel(v.value, main * (1.0 + c.correction)), 1e-12);
    EXPECT_NEAR(v.error, c.tail * std::abs(main), 1e-12 * std::abs(main));
    EXPECT_LE(c.max_abs_1f1_ratio, 1.0 + 1e-8);
    EXPECT_LE(std::abs(c.correction), c.abs_sum * (1.0 + 1e-12));
    EXPECT_EQ(v.route, "direct");
  }
}

TEST(Direct, DoublingCutoffsStaysInsideBound) {
  const SpaceParams p = make_space_params(6, 1);
  for (cplx s : {cplx(2.2, 0.0), cplx(3.25, 0.5), cplx(3.0, 1.5), cplx(4.1, -1.0)}) {
    KernelCutoffs a, b;
    a.c_max = 1000;
    a.a_max = 1000;
    b.c_max = 2000;
    b.a_max = 2000;
    const auto va = kernel_coeff_direct(1, s, p, a), vb = kernel_coeff_direct(1, s, p, b);
    EXPECT_LE(std::abs(va.value - vb.value), va.error) << s;
    EXPECT_LT(vb.error, va.error);
  }
}

TEST(Direct, VectorOverloadMatchesScalar) {
  const SpaceParams p = make_space_params(6, 2);
  const std::vector<cplx> ss{cplx(2.9, 0.0), cplx(3.25, 1.0), cplx(3.7, -0.5)};
  const auto many = kernel_coeff_direct(3, ss, p);
  for (std::size_t i = 0; i < ss.size(); ++i) EXPECT_LT(rel(many[i].value, kernel_coeff_direct(3, ss[i], p).value), 1e-13);
}

TEST(Routes, RegionGuards) {
  const auto& doc = shipped(6, 1);
  const auto& p = doc.space.params;
  for (double re : {1.0, 0.5, 6.0, 7.2}) {
    try {
      kernel_coeff_direct(1, cplx(re, 0.0), p);
      FAIL() << re;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Region);
    }
  }
  for (double re : {0.9, 2.6, 3.25}) {
    try {
      kernel_coeff_via_poincare(1, cplx(re, 0.0), doc);
      FAIL() << re;
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::Region);
    }
  }
  EXPECT_NO_THROW(kernel_coeff_spectral(1, cplx(0.5, 0.0), doc.eigen, p));
  EXPECT_NO_THROW(kernel_coeff_spectral(1, cplx(-3.0, 2.0), doc.eigen, p));
  EXPECT_THROW(kernel_coeff_direct(0, cplx(2.0, 0.0), p), Error);
  KernelCutoffs bad;
  bad.c_max = 3;
  EXPECT_THROW(kernel_coeff_direct(1, cplx(2.0, 0.0), p, bad), Error);
}

TEST(Routes, TripleAgreementInOverlap) {
  const auto& doc = shipped(6, 1);
  for (int n = 1; n <= 5; ++n) {
    const TripleCheck t = triple_check(n, cplx(2.2, 0.0), doc);
    EXPECT_EQ(t.compared, 3) << n;
    EXPECT_TRUE(t.pass) << n << " delta " << t.max_relative_delta;
    EXPECT_LT(t.max_relative_delta, 1e-5);
    const auto j = to_json(t);
    EXPECT_EQ(j.at("verdict"), "pass");
  }
  const TripleCheck off = triple_check(1, cplx(2.3, 0.6), doc);
  EXPECT_EQ(off.compared, 3);
  EXPECT_TRUE(off.pass);
}

TEST(Routes, DirectMatchesSpectralInsideStrip) {
  for (auto [k, N] : {std::pair{6, 1}, std::pair{6, 2}}) {
    const auto& doc = shipped(k, N);
    const auto& p = doc.space.params;
    for (cplx s : {cplx(p.kappa() / 2.0, 0.0), cplx(p.strip_lo + 0.1, 0.5), cplx(p.strip_hi - 0.1, 1.0)}) {
      const TripleCheck t = triple_check(1, s, doc);
      EXPECT_EQ(t.compared, 2) << s;
      EXPECT_LT(t.max_relative_delta, 1e-6) << k << " " << N << " " << s;
      for (const auto& r : t.routes)
        if (r.route == "poincare") EXPECT_FALSE(r.ran);
    }
  }
}

TEST(Routes, SingleRouteBelowOne) {
  const auto& doc = shipped(6, 1);
  const TripleCheck t = triple_check(1, cplx(0.5, 0.0), doc);
  EXPECT_EQ(t.compared, 1);
  EXPECT_EQ(to_json(t).at("verdict"), "single-route");
}

TEST(Poincare, TruncatedSumApproachesContinuation) {
  const auto& doc = shipped(6, 1);
  const cplx s(1.6, 0.0);
  const auto full = kernel_coeff_via_poincare(1, s, doc);
  const auto t50 = kernel_coeff_via_poincare_truncated(1, s, doc, 50);
  const auto t200 = kernel_coeff_via_poincare_truncated(1, s, doc, 200);
  EXPECT_LE(std::abs(t50.value - full.value), t50.error + full.error);
  EXPECT_LE(std::abs(t200.value - full.value), t200.error + full.error);
  EXPECT_LT(std::abs(t200.value - full.value), std::abs(t50.value - full.value));
}

TEST(Spectral, EmptySpaceIsZero) {
  const SpaceParams p = make_space_params(3, 1);
  const Eigenbasis empty;
  EXPECT_EQ(kernel_coeff_spectral(1, cplx(1.5, 0.0), empty, p).value, cplx(0.0));
  EXPECT_EQ(average_sum_D(cplx(1.75, 0.0), empty, p).value, cplx(0.0));
  const ScanReport rep = nonvanishing_scan(0.0, 16, empty, p);
  EXPECT_EQ(rep.verdict, "trivially zero (d=0)");
  EXPECT_EQ(rep.dimension, 0);
}

TEST(AverageSum, BookkeepingIdentity) {
  for (auto [k, N] : {std::pair{6, 1}, std::pair{10, 1}, std::pair{6, 3}}) {
    const auto& doc = shipped(k, N);
    const auto& p = doc.space.params;
    for (cplx s : {cplx(p.kappa() / 2.0, 0.0), cplx(p.kappa() / 2.0 + 0.3, 0.5)}) {
      const DValue D = average_sum_D(s, doc.eigen, p);
      const cplx via = kernel_coeff_spectral(1, s, doc.eigen, p).value / spectral_prefactor(s, p);
      EXPECT_LT(rel(D.value, via), 1e-12);
      cplx total = 0.0;
      for (const auto& t : D.terms) {
        total += t.contribution;
        if (t.lambda != 0) EXPECT_LT(rel(t.contribution, t.lstar * double(t.lambda) * t.a1 / t.norm), 1e-12);
      }
      EXPECT_LT(rel(total, D.value), 1e-12);
    }
  }
}

TEST(AverageSum, InvariantUnderRescalingAndPermutation) {
  for (auto [k, N] : {std::pair{6, 1}, std::pair{6, 2}}) {
    const auto& doc = shipped(k, N);
    const auto& p = doc.space.params;
    const cplx s(p.kappa() / 2.0 + 0.2, 0.7);
    const cplx base = average_sum_D(s, doc.eigen, p).value;
    Eigenbasis eb = doc.eigen;
    eb.forms[0] = rescaled(eb.forms[0], cplx(-3.5, 0.0));
    if (eb.forms.size() > 1) eb.forms[1] = rescaled(eb.forms[1], cplx(0.02, 0.0));
    EXPECT_LT(rel(average_sum_D(s, eb, p).value, base), 1e-12);
    std::reverse(eb.forms.begin(), eb.forms.end());
    EXPECT_LT(rel(average_sum_D(s, eb, p).value, base), 1e-12);
  }
}

TEST(AverageSum, TermsReflectUnderFunctionalEquation) {
  const auto& doc = shipped(8, 1);
  const auto& p = doc.space.params;
  for (double sigma : {p.strip_lo + 0.1, p.kappa() / 2.0 + 0.3}) {
    const cplx s(sigma, 0.5);
    const DValue a = average_sum_D(s, doc.eigen, p);
    const DValue b = average_sum_D(p.kappa() - s, doc.eigen, p);
    ASSERT_EQ(a.terms.size(), b.terms.size());
    for (std::size_t j = 0; j < a.terms.size(); ++j)
      EXPECT_LT(rel(a.terms[j].lstar, double(a.terms[j].lambda) * b.terms[j].lstar), 1e-8);
  }
}

TEST(Scan, GridStaysInsideOpenStrip) {
  const SpaceParams p = make_space_params(6, 1);
  for (int grid : {16, 17, 64}) {
    const auto g = strip_grid(p, grid);
    EXPECT_EQ(static_cast<int>(g.size()), grid % 2 == 0 ? grid + 1 : grid);
    EXPECT_TRUE(std::is_sorted(g.begin(), g.end()));
    for (double x : g) {
      EXPECT_GT(x, p.strip_lo);
      EXPECT_LT(x, p.strip_hi);
    }
    EXPECT_NE(std::find_if(g.begin(), g.end(), [&](double x) { return std::abs(x - p.kappa() / 2.0) < 1e-14; }), g.end());
  }
  EXPECT_THROW(strip_grid(p, 15), Error);
  EXPECT_THROW(strip_grid(p, 0), Error);
}

TEST(Scan, ReportAndCsv) {
  const auto& doc = shipped(6, 1);
  const auto& p = doc.space.params;
  const ScanReport rep = nonvanishing_scan(0.5, 16, doc.eigen, p);
  ASSERT_EQ(rep.sigma.size(), 17u);
  EXPECT_EQ(rep.D.size(), rep.sigma.size());
  EXPECT_EQ(rep.breakdown.size(), rep.sigma.size());
  double m = 1e300, e = 0.0;
  for (std::size_t i = 0; i < rep.D.size(); ++i) {
    m = std::min(m, std::abs(rep.D[i]));
    e = std::max(e, rep.error[i]);
    EXPECT_LT(rel(rep.D[i], average_sum_D(cplx(rep.sigma[i], 0.5), doc.eigen, p).value), 1e-12);
  }
  EXPECT_EQ(rep.min_abs_D, m);
  EXPECT_EQ(rep.max_error, e);
  EXPECT_EQ(rep.verdict, m > 10.0 * e ? "verified non-vanishing" : "inconclusive");

  std::ostringstream os;
  write_scan_csv(os, rep);
  std::istringstream in(os.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "sigma,r0,D_re,D_im,D_abs,error_bound");
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 17);
}

TEST(ProofDiagnostic, DecreasesWithWeight) {
  double previous = 1e300;
  for (int k : {6, 8, 10, 12}) {
    const auto d = proof_inequality_diagnostic(0.0, 0.0, make_space_params(k, 1));
    EXPECT_LT(d.ratio, previous) << k;
    EXPECT_LE(d.ratio, d.abs_bound * (1.0 + 1e-12));
    EXPECT_LT(std::abs(d.s - cplx(k / 2.0 + 0.25, 0.0)), 1e-15);
    previous = d.ratio;
  }
  EXPECT_THROW(proof_inequality_diagnostic(0.5, 0.0, make_space_params(6, 1)), Error);
  EXPECT_THROW(proof_inequality_diagnostic(-0.1, 0.0, make_space_params(6, 1)), Error);
}
