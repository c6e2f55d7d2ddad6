#include "support.hpp"

using namespace zn;

TEST(Lattice, EpsbarPairing) {
  for (int n : {2, 3, 5})
    for (int mu = 0; mu < n; ++mu)
      for (int nu = 0; nu < n; ++nu)
        EXPECT_EQ(inner(epsbar(mu, n), epsbar(nu, n)), Rational(mu == nu ? 1 : 0) - Rational(1, n));
}

TEST(Lattice, FundamentalWeightNorms) {
  EXPECT_EQ(inner(fundamental_weight(1, 3), fundamental_weight(1, 3)), Rational(2, 3));
  EXPECT_EQ(inner(fundamental_weight(1, 2), fundamental_weight(1, 2)), Rational(1, 2));
  // <omega_i, omega_j> = i (n - j) / n for i <= j
  for (int n : {3, 4, 6})
    for (int i = 1; i < n; ++i)
      for (int j = i; j < n; ++j)
        EXPECT_EQ(inner(fundamental_weight(i, n), fundamental_weight(j, n)), Rational(i * (n - j), n));
  EXPECT_EQ(inner(fundamental_weight(0, 4), fundamental_weight(2, 4)), Rational(0));
}

TEST(Lattice, SimpleRootsGiveCartanMatrix) {
  const int n = 5;
  for (int i = 1; i < n; ++i)
    for (int j = 1; j < n; ++j) {
      Rational want = i == j ? 2 : (std::abs(i - j) == 1 ? -1 : 0);
      EXPECT_EQ(inner(simple_root(i, n), simple_root(j, n)), want);
      EXPECT_EQ(inner(simple_root(i, n), fundamental_weight(j, n)), Rational(i == j ? 1 : 0));
    }
}

TEST(Lattice, StateDifferencesAndAbar) {
  WeightState a({2, -1, 0});
  // a + rho = (4, 0, 0)
  EXPECT_EQ(a.shifted(0), 4);
  EXPECT_EQ(a.shifted(1), 0);
  EXPECT_EQ(a.amn(0, 1), 4);
  EXPECT_EQ(a.amn(1, 2), 0);
  Rational s = a.abar(0) + a.abar(1) + a.abar(2);
  EXPECT_EQ(s, Rational(0));
  EXPECT_EQ(a.abar(0), Rational(8, 3));
}

TEST(Lattice, StatesEqualModuloAllOnes) {
  EXPECT_TRUE(WeightState({1, 2, 3}) == WeightState({0, 1, 2}));
  EXPECT_FALSE(WeightState({1, 2, 3}) == WeightState({0, 1, 3}));
  WeightState a({0, 0, 0});
  EXPECT_EQ(step_index(a, a.plus_epsbar(2)), 2);
  EXPECT_EQ(step_index(a, a.plus_epsbar(1, 2)), -1);
  EXPECT_TRUE(admissible(a, a.plus_epsbar(0)));
  // all three steps together return to a
  EXPECT_TRUE(a.plus_epsbar(0).plus_epsbar(1).plus_epsbar(2) == a);
}

TEST(Lattice, DynkinLabelsRoundTrip) {
  std::mt19937_64 rng(5);
  std::uniform_int_distribution<long long> d(-4, 4);
  for (int n : {2, 3, 4})
    for (int s = 0; s < 20; ++s) {
      std::vector<long long> m(n);
      for (auto& v : m) v = d(rng);
      WeightState a(m);
      DynkinLabels lab = dynkin_labels(a, 9);
      EXPECT_EQ(lab.level(), 9);
      EXPECT_TRUE(from_labels(lab) == a);
    }
}

TEST(Lattice, SigmaRotationHasOrderN) {
  for (int n : {2, 3, 5}) {
    WeightState a(std::vector<long long>(n, 0));
    a.m[0] = 2;
    WeightState b = a;
    for (int t = 0; t < n; ++t) b = sigma_rotate(b, 1, 7);
    EXPECT_TRUE(b == a);
    EXPECT_EQ(dynkin_labels(sigma_rotate(a, 1, 7), 7).level(), 7);
  }
  std::vector<int> k{1, 2, 3};
  EXPECT_EQ(rotate_labels(k, 1), (std::vector<int>{3, 1, 2}));
}

TEST(Lattice, GenericStatesAvoidResonance) {
  EXPECT_NEAR(distance_to_rz(9.0, 4.0), 1.0, 1e-15);
  EXPECT_NEAR(distance_to_rz(-7.5, 2.5), 0.0, 1e-15);
  EXPECT_FALSE(generic_state(WeightState({3, 0}), 4.0));  // a_01 = 4
  EXPECT_TRUE(generic_state(WeightState({1, 0}), 4.0));
  EXPECT_FALSE(generic_state(WeightState({1, 0}), 4.0, 0.25, 2));
  std::mt19937_64 rng(1);
  for (int s = 0; s < 20; ++s) EXPECT_TRUE(generic_state(random_generic_state(rng, 3, 4.5, 6, 2), 4.5, 0.25, 2));
  // n = 2 at integer r = 4 cannot stay generic two steps out
  EXPECT_THROW(random_generic_state(rng, 2, 4.0, 6, 2), Error);
}

TEST(Lattice, RealPairingAgreesWithRational) {
  Weight u = fundamental_weight(2, 4) + Rational(3) * simple_root(1, 4);
  Weight w = rho_weight(4);
  std::vector<Real> ur, wr;
  for (auto& c : u.c) ur.push_back(to_real(c));
  for (auto& c : w.c) wr.push_back(to_real(c));
  EXPECT_LT(abs(inner_real(ur, wr) - to_real(inner(u, w))), Real("1e-40"));
}
