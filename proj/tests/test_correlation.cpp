#include "support.hpp"

using namespace zn;
using zn::test::Precise;

namespace {

class Correlation : public Precise {};

long double naive_poch(long double z, long double q) {
  long double p = 1;
  for (int m = 0; m < 2000; ++m) p *= 1 - z * std::pow(q, m);
  return p;
}

}  // namespace

TEST_F(Correlation, TwoStateFormulaRegroups) {
  // omega = -1: (-1)^{i+1} (x^2;x^2)^2 (-x^{2r};x^{2r})^2 / ((x^{2r};x^{2r})^2 (-x^2;x^2)^2)
  for (const char* rs : {"3", "4"})
    for (const char* xs : {"0.2", "0.3"}) {
      ModelParams p = params(2, rs, xs);
      long double x = std::stold(xs), r = std::stold(rs);
      long double x2 = x * x, x2r = std::pow(x, 2 * r);
      long double a = naive_poch(x2, x2), b = naive_poch(x2r, x2r);
      long double c = naive_poch(-x2r, x2r), d = naive_poch(-x2, x2);
      long double mag = a * a * c * c / (b * b * d * d);
      for (int i = 0; i < 2; ++i) {
        Complex f = polarization_formula(i, p);
        long double want = i == 0 ? -mag : mag;
        EXPECT_NEAR(zn::test::ld(real(f)), want, 1e-15L);
        EXPECT_LT(abs(imag(f)), Real("1e-38"));
      }
    }
}

TEST_F(Correlation, FormulaSmallXLimit) {
  for (int n : {2, 3, 5}) {
    ModelParams p = params(n, "7", "1e-4");
    for (int i = 0; i < n; ++i) {
      Complex w(1);
      for (int t = 0; t <= i; ++t) w *= p.omega;
      if (i + 1 == n) w = Complex(1);
      EXPECT_LT(abs(polarization_formula(i, p) - w), Real("1e-6"));
    }
  }
}

TEST_F(Correlation, FormulaSectorsDifferByOmega) {
  ModelParams p = params(3, "5", "0.2");
  Complex f0 = polarization_formula(0, p), f1 = polarization_formula(1, p);
  EXPECT_LT(rel_diff(f1, f0 * p.omega), Real("1e-38"));
}

TEST_F(Correlation, CnConstantMatchesDefinition) {
  ModelParams p = params(2, "4", "0.3");
  long double x = 0.3L, r = 4;
  int n = 2, l = 1;
  auto braces = [&](long double z) {
    long double out = 1;
    for (int a = 0; a < 200; ++a)
      for (int b = 0; b < 200; ++b) {
        long double t = z * std::pow(x, 2 * r * a + 2 * n * b);
        if (t < 1e-30L) break;
        out *= 1 - t;
      }
    return out;
  };
  long double z = std::pow(x, n);
  long double g = braces(std::pow(x, 2 * n + 2 * r - l - 1) * z) * braces(std::pow(x, l + 1) * z) /
                  (braces(std::pow(x, 2 * n - l + 1) * z) * braces(std::pow(x, 2 * r + l - 1) * z));
  long double den = std::pow(naive_poch(x * x, std::pow(x, 2 * r)), n) * naive_poch(std::pow(x, 2 * r), std::pow(x, 2 * r));
  long double want = std::pow(x, (r - 1) / r * (n - 1) / (2 * n)) * g / den;
  EXPECT_NEAR(zn::test::ld(real(c_n_const(p))) / want, 1.0L, 1e-15L);
}

TEST_F(Correlation, OpePrefactorFactorizesOverPairs) {
  // ratio of prefactors at two chains depends only on the changed pair factors
  ModelParams p = params(2, "4", "0.3");
  Complex v(Real("0.25"));
  std::vector<Complex> a{Complex(Real("0.7"), Real("0.2"))}, b{Complex(Real("0.6"), Real("-0.1"))};
  Complex q = Complex(p.xpow(2 * p.r));
  auto pair = [&](const Complex& lo, const Complex& hi) {
    Complex ratio = p.xpow(Complex(2 * (hi - lo)));
    return zpow(lo, -(p.r - 1) / p.r, p) * qpoch(p.xpow(2 * p.r - 1) * ratio, q, p.prec) /
           qpoch(p.xpow(Real(1)) * ratio, q, p.prec);
  };
  Complex end = v + Real(1);
  Complex want = pair(v, a[0]) * pair(a[0], end) / (pair(v, b[0]) * pair(b[0], end));
  EXPECT_LT(rel_diff(ope_prefactor(v, a, p) / ope_prefactor(v, b, p), want), Real("1e-36"));
  EXPECT_THROW(chain_points(v, {}, 2), Error);
}

TEST_F(Correlation, EllipticSumVanishes) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> u(0.05, 0.95), w(-0.3, 0.3), s(-3, 3);
  for (int n : {2, 3, 4}) {
    ModelParams p = params(n, "4.5", "0.3");
    std::vector<Complex> v;
    std::vector<Real> pi;
    for (int j = 0; j < n; ++j) v.push_back(Complex(Real(u(rng)), Real(w(rng))));
    for (int j = 0; j < n; ++j) pi.push_back(Real(j) * Real("1.13") + Real(s(rng)) / 10);
    EXPECT_LT(elliptic_sum_zero(v, pi, p), Real("1e-34")) << "n=" << n;
  }
}

TEST_F(Correlation, ContourValidation) {
  ModelParams p = params(2, "4", "0.3");
  EXPECT_THROW(make_contour(0, Real("0.5"), Real("0.1"), 7, p), Error);
  EXPECT_THROW(make_contour(0, Real("0.5"), Real("0.6"), 8, p), Error);
  ContourSpec c = make_contour(1, Real("0.5"), Real("0.1"), 8, p);
  EXPECT_EQ(c.radii.size(), 3u);
  EXPECT_LT(abs(c.radii[1] - p.x * Real("0.6")), Real("1e-40"));
}

TEST_F(Correlation, IntegrandPoleAtCoincidentPoints) {
  ModelParams p = params(2, "4", "0.3");
  std::vector<Real> l{Real("1.3"), Real(0)}, k{Real("2.3"), Real(0)};
  Complex v(Real("0.25"));
  EXPECT_THROW(integrand_g(l, k, 0, v, v, {Complex(Real("0.7"))}, p), Error);
}

// The chain contraction inside sector_integrals against a direct sum of integrand_g over all nodes.
TEST_F(Correlation, ChainContractionMatchesNodeSum) {
  for (int n : {2, 3}) {
    ModelParams p = params(n, n == 2 ? "4" : "5", "0.3");
    std::vector<Real> lab = generic_l_labels(n, p.r);
    Complex v(Real("0.25")), u(Real("0.26"));
    PipelineSettings s;
    s.radius = 0;
    s.M = n == 2 ? 16 : 8;
    s.eps_rel = Real("0.15");
    SectorIntegrals si = sector_integrals(0, lab, 0, v, p, s);
    ASSERT_EQ(si.terms.size(), 1u);
    std::vector<Real> lr = labels_to_coords(lab);
    std::vector<Real> k = labels_to_coords(sector_k_labels(lab, 0, std::vector<int>(n - 1, 0)));
    Real h = 2 * pi_real() / s.M;
    for (int nu = 0; nu < n; ++nu) {
      ContourSpec c = make_contour(nu, si.abs_z, si.eps_c, s.M, p);
      Complex total(0);
      std::vector<int> idx(n - 1, 0);
      for (;;) {
        std::vector<Complex> vs;
        Complex measure(1);
        for (int j = 1; j < n; ++j) {
          Real phi = h * (idx[j - 1] - s.M / 2);
          vs.push_back(v_of(c.radii[j], phi, p));
          measure *= c.radii[j] * Complex(cos(phi), sin(phi)) / Real(s.M);
        }
        total += integrand_g(lr, k, nu, v, u, vs, p) * measure;
        int j = 0;
        while (j < n - 1 && ++idx[j] == s.M) idx[j++] = 0;
        if (j == n - 1) break;
      }
      const auto& t = si.terms[0];
      Complex chain = bracket_omega(v - u + t.a0[nu], p) / bracket_r(v - u, p) * t.J[nu];
      EXPECT_LT(rel_diff(chain, total), Real("1e-34")) << "n=" << n << " nu=" << nu;
    }
  }
}

TEST_F(Correlation, WrongSideContourChangesIntegral) {
  ModelParams p = params(2, "4", "0.3");
  std::vector<Real> lab = generic_l_labels(2, p.r);
  PipelineSettings s;
  s.radius = 1;
  s.M = 64;
  SectorIntegrals good = sector_integrals(0, lab, 0, Complex(Real("0.25")), p, s);
  s.wrong_side = true;
  SectorIntegrals bad = sector_integrals(0, lab, 0, Complex(Real("0.25")), p, s);
  Real diff = 0;
  for (size_t t = 0; t < good.terms.size(); ++t) diff = rmax(diff, rel_diff(good.terms[t].J[1], bad.terms[t].J[1]));
  EXPECT_GT(diff, Real("1e-3"));
}

TEST_F(Correlation, GenericLabelsSumToLevel) {
  for (int n : {2, 3})
    for (const char* r : {"3", "4", "5", "4.5"}) {
      auto lab = generic_l_labels(n, Real(r));
      Real s = 0;
      for (auto& t : lab) s += t;
      EXPECT_LT(abs(s - (Real(r) - 1)), Real("1e-40"));
    }
}
