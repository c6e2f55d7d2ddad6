#include "support.hpp"

using namespace zn;
using zn::test::Precise;

namespace {

class Weights : public Precise {};

}  // namespace

TEST_F(Weights, RbarAtZeroIsPermutation) {
  for (int n : {2, 3, 4}) {
    ModelParams p = params(n, "4.5", "0.3");
    EXPECT_LT(tensor_diff(rbar_charsum(Complex(0), p), permutation_tensor(n)), Real("1e-36"));
    // the elementwise form is 0/0 at v = 0
    EXPECT_THROW(rbar_elementwise(Complex(0), p), Error);
    EXPECT_LT(tensor_diff(rbar_elementwise(Complex(Real("1e-15")), p), permutation_tensor(n)), Real("1e-12"));
  }
}

TEST_F(Weights, TwoRbarFormulasAgree) {
  for (int n : {2, 3})
    for (const char* r : {"2.5", "4"}) {
      ModelParams p = params(n, r, "0.3");
      for (const Complex& v : {Complex(Real("0.13")), Complex(Real("0.37"), Real("0.1"))})
        EXPECT_LT(tensor_diff(rbar_charsum(v, p), rbar_elementwise(v, p)), Real("1e-34"));
    }
}

TEST_F(Weights, RbarSelectionRuleAndShiftInvariance) {
  const int n = 3;
  ModelParams p = params(n, "4.5", "0.3");
  WeightTensor R = rbar_charsum(Complex(Real("0.41"), Real("0.05")), p);
  Real s = R.max_abs();
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) {
          if (mod_n(i + k - j - l, n)) EXPECT_LT(abs(R.at(i, k, j, l)) / s, Real("1e-38"));
          EXPECT_LT(abs(R.at(i, k, j, l) - R.at((i + 1) % n, (k + 1) % n, (j + 1) % n, (l + 1) % n)) / s, Real("1e-36"));
        }
}

TEST_F(Weights, VertexYangBaxter) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.05, 0.95), w(-0.3, 0.3);
  for (int n : {2, 3}) {
    ModelParams p = params(n, "4", "0.3");
    for (int s = 0; s < 4; ++s) {
      Complex v1(Real(u(rng)), Real(w(rng))), v2(Real(u(rng)), Real(w(rng)));
      EXPECT_LT(ybe_vertex_residual(v1, v2, p), Real("1e-32"));
    }
  }
}

TEST_F(Weights, YangBaxterFailsForPerturbedMatrix) {
  ModelParams p = params(2, "4", "0.3");
  Complex v1(Real("0.3")), v2(Real("0.55"));
  WeightTensor R12 = r_full(v1 - v2, p), R13 = r_full(v1, p), R23 = r_full(v2, p);
  R13.at(0, 1, 1, 0) *= Complex(Real("1.001"));
  EXPECT_GT(ybe_residual_tensors(R12, R13, R23), Real("1e-6"));
}

TEST_F(Weights, FaceWeightDiagonalCaseIsR1) {
  ModelParams p = params(3, "4.5", "0.3");
  Complex v(Real("0.31"), Real("0.07"));
  WeightState a({1, 0, -1});
  FaceWeightFn w(v, p);
  for (int mu = 0; mu < 3; ++mu) {
    WeightState d = a.plus_epsbar(mu), c = d.plus_epsbar(mu);
    EXPECT_LT(abs(w(c, d, d, a) - r_l_func(v, 1, p)), Real("1e-38"));
  }
}

TEST_F(Weights, FaceWeightAtZeroIsDelta) {
  ModelParams p = params(2, "4.5", "0.3");
  WeightState a({2, 0});
  FaceWeightFn w0(Complex(0), p);
  for (int mu = 0; mu < 2; ++mu)
    for (int nu = 0; nu < 2; ++nu) {
      WeightState d = a.plus_epsbar(mu), c = d.plus_epsbar(nu);
      for (int mb = 0; mb < 2; ++mb) {
        WeightState b = a.plus_epsbar(mb);
        if (step_index(b, c) < 0) continue;
        EXPECT_LT(abs(w0(c, d, b, a) - Complex(b == d ? 1 : 0)), Real("1e-38"));
      }
    }
}

TEST_F(Weights, FaceWeightMatchesDirectFormula) {
  // mu != nu, b = a + epsbar_nu: -r_1 [v][a_{mu nu} + 1] / ([1-v][a_{mu nu}])
  ModelParams p = params(2, "4.5", "0.3");
  Complex v(Real("0.4"));
  WeightState a({1, 0});
  WeightState d = a.plus_epsbar(0), c = d.plus_epsbar(1), b = a.plus_epsbar(1);
  Real am = Real(a.amn(0, 1));
  Complex want = -r_l_func(v, 1, p) * bracket_r(v, p) * bracket_r(Complex(am + 1), p) /
                 (bracket_r(Complex(1) - v, p) * bracket_r(Complex(am), p));
  EXPECT_LT(rel_diff(face_w(c, d, b, a, v, p), want), Real("1e-38"));
  // non-admissible corner
  EXPECT_EQ(face_w(c, d, a.plus_epsbar(0, 2), a, v, p), Complex(0));
}

TEST_F(Weights, FaceWeightThrowsAtResonantState) {
  ModelParams p = params(2, "4", "0.3");
  WeightState a({3, 0});  // a_01 = 4 = r
  WeightState d = a.plus_epsbar(0), c = d.plus_epsbar(1), b = a.plus_epsbar(1);
  EXPECT_THROW(face_w(c, d, b, a, Complex(Real("0.3")), p), Error);
}

TEST_F(Weights, FaceStarTriangle) {
  ModelParams p = params(2, "4.5", "0.3");
  std::mt19937_64 rng(4);
  for (int s = 0; s < 4; ++s) {
    WeightState a = random_generic_state(rng, 2, 4.5, 6, 2);
    EXPECT_LT(ybe_face_residual(a, Complex(Real("0.23"), Real("0.1")), Complex(Real("0.61")), p), Real("1e-32"));
  }
}

TEST_F(Weights, FaceStarTriangleCountsResonantHexagons) {
  ModelParams p = params(2, "4", "0.3");
  int skipped = 0;
  Real res = ybe_face_residual(WeightState({2, 0}), Complex(Real("0.23")), Complex(Real("0.61")), p, &skipped);
  EXPECT_GT(skipped, 0);
  EXPECT_LT(res, Real("1e-32"));
}
