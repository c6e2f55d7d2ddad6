#include "support.hpp"

using namespace zn;
using zn::test::Precise;

namespace {

class Ctm : public Precise {};

// Partitions of N with every multiplicity below n, by dynamic programming over parts.
Series bounded_partitions(int n, int order) {
  Series c(order + 1, 0);
  c[0] = 1;
  for (int part = 1; part <= order; ++part) {
    Series next(order + 1, 0);
    for (int N = 0; N <= order; ++N)
      for (int m = 0; m < n && N + m * part <= order; ++m) next[N + m * part] += c[N];
    c = next;
  }
  return c;
}

}  // namespace

TEST(CtmEnergy, VertexEnergyTable) {
  EXPECT_EQ(h_v(0, 0, 2), 1);
  EXPECT_EQ(h_v(1, 0, 2), 0);
  EXPECT_EQ(h_v(0, 1, 2), 0);
  EXPECT_EQ(h_v(1, 1, 2), 1);
  EXPECT_EQ(h_v(2, 0, 3), 1);
  EXPECT_EQ(h_v(0, 2, 3), 0);
  EXPECT_EQ(h_v(1, 1, 3), 2);
  EXPECT_THROW(h_v(3, 0, 3), Error);
  // the ground-state step mu_{j+1} = mu_j - 1 costs nothing
  for (int n : {2, 3, 5})
    for (int mu = 0; mu < n; ++mu) EXPECT_EQ(h_v(mu, mod_n(mu - 1, n), n), 0);
}

TEST(CtmEnergy, FaceEnergyIsScaledVertexEnergy) {
  WeightState a({0, 0, 0});
  WeightState b = a.plus_epsbar(1), c = b.plus_epsbar(1);
  EXPECT_EQ(h_f(c, b, a), Rational(2, 3));
  EXPECT_THROW(h_f(a, b, a), Error);
}

TEST(CtmEnergy, GroundPathsHaveZeroEnergy) {
  VertexPath v{3, 1, {1, 0, 2, 1}};
  EXPECT_EQ(ctm_energy(v), Rational(0));
  VertexPath w{2, 0, {0}};
  // mu_1 = 0, mu_2 = 0 + 1 - 2 mod 2 = 1: h_v(0, 1) = 0; flip gives 1
  EXPECT_EQ(ctm_energy(w), Rational(0));
  VertexPath x{2, 0, {1, 1}};
  EXPECT_EQ(ctm_energy(x), Rational(1 * 1 + 2 * 0));
}

TEST(CtmEnergy, FacePathMustEndInGroundState) {
  WeightState xi({0, 0});
  FacePath good{{}, xi, 0};
  good.states = {good.ground(0), good.ground(1), good.ground(2)};
  EXPECT_EQ(ctm_energy(good), Rational(0));
  FacePath bad = good;
  bad.states.back() = bad.states.back().plus_epsbar(0, 2);
  EXPECT_THROW(ctm_energy(bad), Error);
}

TEST(Characters, KnownPartitionCounts) {
  // distinct parts: 1 1 1 2 2 3 4 5 6 8 10
  Series d = chi_vertex_product(2, 10);
  EXPECT_EQ(d, (Series{1, 1, 1, 2, 2, 3, 4, 5, 6, 8, 10}));
  EXPECT_EQ(chi_vertex_bruteforce(2, 3)[3], 2);
  // parts used at most twice: 1 1 2 2 4 5 7 9 13 16 22
  EXPECT_EQ(chi_vertex_product(3, 10), (Series{1, 1, 2, 2, 4, 5, 7, 9, 13, 16, 22}));
}

TEST(Characters, ProductMatchesBoundedPartitions) {
  for (int n : {2, 3, 4}) {
    Series want = bounded_partitions(n, 40);
    EXPECT_EQ(chi_vertex_product(n, 40), want);
    EXPECT_EQ(chi_vertex_bruteforce(n, 40), want);
  }
}

TEST(Characters, VertexPathsMatchProductEverySector) {
  for (int n : {2, 3})
    for (int i = 0; i < n; ++i) EXPECT_EQ(chi_vertex_paths(n, i, 20), chi_vertex_product(n, 20)) << "n=" << n << " i=" << i;
}

TEST(Characters, FaceProductSeries) {
  // 1/(q^2;q^2): partitions of N/2
  EXPECT_EQ(face_series_product(2, 8), (Series{1, 0, 1, 0, 2, 0, 3, 0, 5}));
  // 1/(q^3;q^3)^2 through q^6: 1, 2 at q^3, 5 at q^6
  EXPECT_EQ(face_series_product(3, 6), (Series{1, 0, 0, 2, 0, 0, 5}));
}

TEST(Characters, FacePathSumsMatchProduct) {
  WeightState xi({1, 0});
  for (int i = 0; i < 2; ++i) {
    FacePath ground{{}, xi, i};
    WeightState a = ground.ground(0);
    a.m[0] += 1;
    a.m[1] -= 1;
    FaceCharacter fc = chi_face_bruteforce(a, xi, i, 8);
    EXPECT_EQ(fc.coefficients, face_series_product(2, 8)) << "i=" << i;
  }
}

TEST_F(Ctm, BetaRootIdentities) {
  ModelParams p = params(3, "4.5", "0.3");
  BetaRoots b = beta_roots(p);
  EXPECT_LT(abs(b.beta1 * b.beta2 + 1), Real("1e-40"));
  EXPECT_LT(abs(b.beta1 + b.beta2 - b.beta0), Real("1e-40"));
  EXPECT_LT(b.beta1, b.beta2);
}

TEST_F(Ctm, LabelsAndCoordinates) {
  WeightState a({2, 0, -1});
  std::vector<Real> lab = state_labels(a, Real(9));
  Real s = 0;
  for (auto& t : lab) s += t;
  EXPECT_EQ(s, Real(9));
  std::vector<Real> c = labels_to_coords(lab), k = state_coords(a);
  for (int mu = 0; mu < 3; ++mu)
    for (int nu = 0; nu < 3; ++nu) EXPECT_EQ(c[mu] - c[nu], k[mu] - k[nu]);
}

TEST_F(Ctm, LatticeOffsetsAreOrderedByShell) {
  auto offs = lattice_offsets(2, 3);
  EXPECT_EQ(offs.size(), 49u);
  EXPECT_EQ(offs.front().shell, 0);
  for (size_t t = 1; t < offs.size(); ++t) EXPECT_LE(offs[t - 1].shell, offs[t].shell);
  EXPECT_EQ(lattice_offsets(1, 4).size(), 9u);
}

TEST_F(Ctm, ChiVertexValueMatchesSeries) {
  ModelParams p = params(3, "4.5", "0.2");
  Series s = chi_vertex_product(3, 60);
  Real q = p.xpow(Real(2)), sum = 0, qn = 1;
  for (long long c : s) {
    sum += Real(c) * qn;
    qn *= q;
  }
  EXPECT_LT(rel_diff(chi_vertex_value(p), Complex(sum)), Real("1e-38"));
}

TEST_F(Ctm, SumFormulaHolds) {
  ModelParams p = params(2, "4", "0.3");
  for (int i = 0; i < 2; ++i) EXPECT_LT(sum_formula_residual(WeightState({1, 0}), i, p, 10).residual, Real("1e-15"));
  ModelParams q = params(3, "5", "0.2");
  EXPECT_LT(sum_formula_residual(WeightState({3, 1, 0}), 0, q, 8).residual, Real("1e-15"));
}
