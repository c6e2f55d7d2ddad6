#pragma once

#include "qelliptic.hpp"

#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace zn {

// a = sum_mu m_mu epsbar_mu, coordinates taken modulo the all-ones vector.
struct WeightState {
  std::vector<long long> m;

  WeightState() = default;
  explicit WeightState(std::vector<long long> coords) : m(std::move(coords)) {}
  static WeightState zero(int n) { return WeightState(std::vector<long long>(n, 0)); }

  int n() const { return static_cast<int>(m.size()); }

  // coordinates of a + rho: c_nu = m_nu + n-1-nu
  long long shifted(int nu) const { return m[nu] + n() - 1 - nu; }

  // a_{mu nu}
  long long amn(int mu, int nu) const { return shifted(mu) - shifted(nu); }

  Rational abar(int mu) const {
    long long s = 0;
    for (int nu = 0; nu < n(); ++nu) s += shifted(nu);
    return Rational(shifted(mu)) - Rational(s, n());
  }

  WeightState plus_epsbar(int mu, long long times = 1) const {
    WeightState b = *this;
    b.m[mu] += times;
    return b;
  }

  bool operator==(const WeightState& o) const {
    if (n() != o.n()) return false;
    for (int i = 1; i < n(); ++i)
      if (m[i] - m[0] != o.m[i] - o.m[0]) return false;
    return true;
  }

  std::string str() const {
    std::ostringstream os;
    os << "(";
    for (int i = 0; i < n(); ++i) os << (i ? "," : "") << m[i];
    os << ")";
    return os.str();
  }
};

// Coefficients (k^0, ..., k^{n-1}) of a + rho on the affine fundamental weights.
struct DynkinLabels {
  std::vector<long long> k;
  long long level() const {
    long long s = 0;
    for (auto v : k) s += v;
    return s;
  }
};

inline DynkinLabels dynkin_labels(const WeightState& a, long long level) {
  const int n = a.n();
  DynkinLabels d;
  d.k.assign(n, 0);
  long long s = 0;
  for (int mu = 1; mu < n; ++mu) {
    d.k[mu] = a.amn(mu - 1, mu);
    s += d.k[mu];
  }
  d.k[0] = level - s;
  return d;
}

inline WeightState from_labels(const DynkinLabels& d) {
  const int n = static_cast<int>(d.k.size());
  // c_nu = sum_{mu > nu} k^mu, then undo the rho shift.
  std::vector<long long> m(n, 0);
  for (int nu = 0; nu < n; ++nu) {
    long long c = 0;
    for (int mu = nu + 1; mu < n; ++mu) c += d.k[mu];
    m[nu] = c - (n - 1 - nu);
  }
  return WeightState(m);
}

// sigma^steps: k^mu -> k^{mu - steps mod n}
template <class T>
std::vector<T> rotate_labels(const std::vector<T>& k, int steps) {
  const int n = static_cast<int>(k.size());
  std::vector<T> out(n);
  for (int mu = 0; mu < n; ++mu) out[mu] = k[(((mu - steps) % n) + n) % n];
  return out;
}

inline DynkinLabels sigma_rotate(const DynkinLabels& d, int steps) { return DynkinLabels{rotate_labels(d.k, steps)}; }

inline WeightState sigma_rotate(const WeightState& a, int steps, long long level) {
  return from_labels(sigma_rotate(dynkin_labels(a, level), steps));
}

inline bool admissible(const WeightState& a, const WeightState& b) {
  const int n = a.n();
  for (int mu = 0; mu < n; ++mu)
    if (a.plus_epsbar(mu) == b) return true;
  return false;
}

// The mu with b = a + epsbar_mu, or -1.
inline int step_index(const WeightState& a, const WeightState& b) {
  for (int mu = 0; mu < a.n(); ++mu)
    if (a.plus_epsbar(mu) == b) return mu;
  return -1;
}

inline int mod_n(long long v, int n) { return static_cast<int>(((v % n) + n) % n); }

// A weight written in epsbar coordinates (mod all-ones), rational entries.
struct Weight {
  std::vector<Rational> c;
};

inline Weight epsbar(int mu, int n) {
  Weight w{std::vector<Rational>(n, Rational(0))};
  w.c[mu] = 1;
  return w;
}

// omega_mu = epsbar_0 + ... + epsbar_{mu-1}; omega_0 = 0
inline Weight fundamental_weight(int mu, int n) {
  mu = ((mu % n) + n) % n;
  Weight w{std::vector<Rational>(n, Rational(0))};
  for (int nu = 0; nu < mu; ++nu) w.c[nu] = 1;
  return w;
}

// alpha_mu = epsbar_{mu-1} - epsbar_mu, 1 <= mu <= n-1
inline Weight simple_root(int mu, int n) {
  Weight w{std::vector<Rational>(n, Rational(0))};
  w.c[mu - 1] = 1;
  w.c[mu] = -1;
  return w;
}

inline Weight rho_weight(int n) {
  Weight w{std::vector<Rational>(n, Rational(0))};
  for (int nu = 0; nu < n; ++nu) w.c[nu] = n - 1 - nu;
  return w;
}

inline Weight shifted_weight(const WeightState& a) {
  Weight w{std::vector<Rational>(a.n(), Rational(0))};
  for (int nu = 0; nu < a.n(); ++nu) w.c[nu] = a.shifted(nu);
  return w;
}

inline Weight operator+(const Weight& u, const Weight& w) {
  Weight s = u;
  for (size_t i = 0; i < s.c.size(); ++i) s.c[i] += w.c[i];
  return s;
}

inline Weight operator*(const Rational& t, const Weight& u) {
  Weight s = u;
  for (auto& v : s.c) v *= t;
  return s;
}

// <epsbar_mu, epsbar_nu> = delta - 1/n, extended bilinearly.
inline Rational inner(const Weight& u, const Weight& w) {
  const int n = static_cast<int>(u.c.size());
  Rational dot(0), su(0), sw(0);
  for (int i = 0; i < n; ++i) {
    dot += u.c[i] * w.c[i];
    su += u.c[i];
    sw += w.c[i];
  }
  return dot - su * sw / Rational(n);
}

// Same pairing for real coordinate vectors.
inline Real inner_real(const std::vector<Real>& u, const std::vector<Real>& w) {
  const int n = static_cast<int>(u.size());
  Real dot = 0, su = 0, sw = 0;
  for (int i = 0; i < n; ++i) {
    dot += u[i] * w[i];
    su += u[i];
    sw += w[i];
  }
  return dot - su * sw / n;
}

// pi_{mu nu} on F_{l,k}: <eps_mu - eps_nu, r l - (r-1) k>; l = xi + rho, k = a + rho
inline Real pi_scalar(const WeightState& xi, const WeightState& a, int mu, int nu, const ModelParams& p) {
  auto comp = [&](int i) { return p.r * Real(xi.shifted(i)) - (p.r - 1) * Real(a.shifted(i)); };
  return comp(mu) - comp(nu);
}

// Distance of t from r*Z.
inline double distance_to_rz(double t, double r) {
  double q = t / r;
  return std::abs(t - r * std::round(q));
}

// Every a_{mu nu} + d, |d| <= reach, stays at least margin away from r*Z.
inline bool generic_state(const WeightState& a, double r, double margin = 0.25, int reach = 0) {
  for (int mu = 0; mu < a.n(); ++mu)
    for (int nu = mu + 1; nu < a.n(); ++nu)
      for (int d = -reach; d <= reach; ++d)
        if (distance_to_rz(static_cast<double>(a.amn(mu, nu) + d), r) < margin) return false;
  return true;
}

// Random state with coordinates in [-range, range], generic with respect to r
// on all states reachable in `reach` steps.
inline WeightState random_generic_state(std::mt19937_64& rng, int n, double r, int range = 6, int reach = 0,
                                        double margin = 0.25) {
  std::uniform_int_distribution<long long> dist(-range, range);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<long long> m(n);
    for (auto& v : m) v = dist(rng);
    WeightState a(m);
    if (generic_state(a, r, margin, reach)) return a;
  }
  throw Error(ErrorKind::Domain, "no generic state found");
}

}  // namespace zn
