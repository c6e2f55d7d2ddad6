#include "support.hpp"

using namespace zn;
using zn::test::Precise;

namespace {

class QElliptic : public Precise {};

// sum_k (-1)^k q^{k(3k-1)/2}, k over all integers
Complex pentagonal(const Complex& q, int terms) {
  Complex s(1);
  for (int k = 1; k <= terms; ++k) {
    Complex sign = Complex(k % 2 ? -1 : 1);
    s += sign * (pow(q, k * (3 * k - 1) / 2) + pow(q, k * (3 * k + 1) / 2));
  }
  return s;
}

// sum_k (-z)^k q^{k(k-1)/2} / (q;q)_k
Complex euler_series(const Complex& z, const Complex& q, int terms) {
  Complex s(1), t(1), qk(1);
  for (int k = 1; k <= terms; ++k) {
    t *= -z * qk / (Complex(1) - qk * q);
    qk *= q;
    s += t;
  }
  return s;
}

}  // namespace

TEST_F(QElliptic, EulerFunctionMatchesPentagonalSeries) {
  for (const Complex& q : {Complex(Real("0.3")), Complex(Real("0.5"), Real("0.2")), Complex(Real("-0.7"))}) {
    Complex prod = qpoch(q, q, prec);
    EXPECT_LT(rel_diff(prod, pentagonal(q, 400)), Real("1e-38"));
  }
}

TEST_F(QElliptic, QPochhammerMatchesEulerSeries) {
  Complex q(Real("0.4"), Real("0.1"));
  for (const Complex& z : {Complex(Real("0.9")), Complex(Real("-1.7"), Real("0.4")), Complex(Real("0.2"), Real("3"))})
    EXPECT_LT(rel_diff(qpoch(z, q, prec), euler_series(z, q, 600)), Real("1e-38"));
}

TEST_F(QElliptic, DoublePochhammerFactorizes) {
  // (z; q1, q2) = prod_j (z q1^j; q2)
  Complex q1(Real("0.35")), q2(Real("0.5"), Real("0.1")), z(Real("0.7"), Real("-0.2"));
  Complex direct(1), t = z;
  for (int j = 0; j < 200; ++j) {
    direct *= qpoch(t, q2, prec);
    t *= q1;
  }
  EXPECT_LT(rel_diff(qpoch2(z, q1, q2, prec), direct), Real("1e-38"));
  EXPECT_LT(rel_diff(qpoch2(z, q1, q2, prec), qpoch2(z, q2, q1, prec)), Real("1e-38"));
}

TEST_F(QElliptic, PochhammerRejectsUnitNome) {
  EXPECT_THROW(qpoch(Complex(Real("0.5")), Complex(Real(1)), prec), Error);
  EXPECT_THROW(theta_q(Complex(0), Complex(Real("0.5")), prec), Error);
}

TEST_F(QElliptic, ThetaProductMatchesBilateralSeries) {
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int s = 0; s < 20; ++s) {
    Complex z(Real(1.5 * u(rng)), Real(1.5 * u(rng)));
    Complex q(Real(0.4 * u(rng)), Real(0.4 * u(rng)));
    EXPECT_LT(rel_diff(theta_q(z, q, prec), theta_q_series(z, q, prec)), Real("1e-38"));
  }
}

TEST_F(QElliptic, ThetaNullMatchesJacobiProduct) {
  // theta[0;0](0; tau) = prod (1 - q^{2m})(1 + q^{2m-1})^2, q = e^{i pi tau}
  Complex tau = imag_unit() * Real("0.8");
  Real q = exp(-pi_real() * Real("0.8"));
  Real prod = 1;
  for (int m = 1; m < 200; ++m) prod *= (1 - pow(q, 2 * m)) * pow(1 + pow(q, 2 * m - 1), 2);
  Complex th = riemann_theta_char(Real(0), Real(0), Complex(0), tau, prec);
  EXPECT_LT(rel_diff(th, Complex(prod)), Real("1e-38"));
}

TEST_F(QElliptic, ModelParamsRejectsOutOfRange) {
  EXPECT_THROW(ModelParams(1, Real(4), Real("0.3")), Error);
  EXPECT_THROW(ModelParams(2, Real(1), Real("0.3")), Error);
  EXPECT_THROW(ModelParams(2, Real(4), Real(1)), Error);
  EXPECT_THROW(ModelParams(2, Real(4), Real(0)), Error);
  EXPECT_TRUE(ModelParams(3, Real("1.5"), Real("0.3")).r_below_rank);
  EXPECT_FALSE(ModelParams(3, Real(4), Real("0.3")).r_below_rank);
}

TEST_F(QElliptic, BracketIsOddAndAntiperiodic) {
  ModelParams p = params(3, "4.5", "0.3");
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-2, 2);
  for (int s = 0; s < 20; ++s) {
    Complex v(Real(u(rng)), Real(0.3 * u(rng)));
    Complex b = bracket_r(v, p);
    EXPECT_LT(rel_diff(bracket_r(-v, p), Complex(-b)), Real("1e-36"));
    EXPECT_LT(rel_diff(bracket_r(v + p.r, p), Complex(-b)), Real("1e-36"));
  }
}

TEST_F(QElliptic, BracketZerosAndSign) {
  ModelParams p = params(2, "4", "0.3");
  EXPECT_LT(abs(bracket_r(Complex(0), p)), Real("1e-45"));
  EXPECT_LT(abs(bracket_r(Complex(Real(4)), p)), Real("1e-45"));
  for (const char* v : {"0.5", "1", "2.5", "3.9"}) EXPECT_GT(real(bracket_r(Complex(Real(v)), p)), 0);
}

TEST_F(QElliptic, BracketMatchesLowPrecisionOracle) {
  // direct long double evaluation of x^{v^2/r - v} (z;q)(q/z;q)(q;q), z = x^{2v}, q = x^{2r}
  ModelParams p = params(2, "3.5", "0.4");
  long double x = 0.4L, r = 3.5L;
  for (long double v : {0.3L, 1.1L, 2.75L}) {
    long double q = std::pow(x, 2 * r), z = std::pow(x, 2 * v), prod = 1;
    for (int m = 0; m < 400; ++m) prod *= (1 - z * std::pow(q, m)) * (1 - std::pow(q, m + 1) / z) * (1 - std::pow(q, m + 1));
    long double want = std::pow(x, v * v / r - v) * prod;
    long double got = zn::test::ld(real(bracket_r(Complex(Real(static_cast<double>(v))), p)));
    EXPECT_NEAR(got / want, 1.0L, 1e-14L);
  }
}

TEST_F(QElliptic, RlIsUnitaryAndNormalized) {
  ModelParams p = params(3, "4.5", "0.25");
  for (int l = 1; l <= 3; ++l) {
    EXPECT_LT(abs(r_l_func(Complex(0), l, p) - Complex(1)), Real("1e-38"));
    Complex v(Real("0.37"), Real("0.12"));
    EXPECT_LT(abs(r_l_func(v, l, p) * r_l_func(-v, l, p) - Complex(1)), Real("1e-36"));
  }
  EXPECT_THROW(g_l_func(Complex(Real("0.5")), 0, p), Error);
  EXPECT_THROW(g_l_func(Complex(Real("0.5")), 4, p), Error);
}

TEST_F(QElliptic, FAndGPolesThrow) {
  ModelParams p = params(2, "4", "0.3");
  EXPECT_THROW(f_func(Complex(Real("0.5")), Complex(Real("0.2")), p), Error);
  EXPECT_THROW(g_func(Complex(Real(-1)), p), Error);
  // f(v, w) at w = v + 1/2 vanishes
  EXPECT_LT(abs(f_func(Complex(Real("0.2")), Complex(Real("0.7")), p)), Real("1e-40"));
}

TEST_F(QElliptic, ModularBridgeHoldsOnGrid) {
  for (const char* rs : {"2", "5"})
    for (const char* xs : {"0.1", "0.5"}) {
      ModelParams q = params(2, rs, xs);
      Complex tau = imag_unit() * pi_real() / (q.eps * q.r);
      for (int t = 1; t <= 9; ++t) {
        Complex v(Real(t) / 10);
        Complex lhs = riemann_theta_char(Real(1) / 2, Real(-1) / 2, v / q.r, tau, q.prec);
        Complex rhs = sqrt(q.eps * q.r / pi_real()) * exp(-q.eps * q.r / 4) * bracket_r(v, q);
        EXPECT_LT(rel_diff(lhs, rhs), Real("1e-36")) << "r=" << rs << " x=" << xs << " t=" << t;
      }
    }
}
