#pragma once

#include "numeric.hpp"

#include <boost/rational.hpp>

#include <vector>

namespace zn {

using Rational = boost::rational<long long>;

inline Real to_real(const Rational& q) { return Real(q.numerator()) / Real(q.denominator()); }

// Global model parameters (n, r, x) and the working precision.
struct ModelParams {
  int n = 2;
  Real r;
  Real x;
  Real eps;       // -ln x
  Real log_x;     // ln x
  Complex omega;  // e^{2 pi i / n}
  Precision prec;
  bool r_below_rank = false;  // r <= n-1

  ModelParams() = default;
  ModelParams(int n_, const Real& r_, const Real& x_, const Precision& pr = {})
      : n(n_), r(r_), x(x_), prec(pr) {
    if (n < 2) throw Error(ErrorKind::Domain, "n must be >= 2");
    if (!(x > 0 && x < 1)) throw Error(ErrorKind::Domain, "x must lie in (0,1)");
    if (!(r > 1)) throw Error(ErrorKind::Domain, "r must exceed 1");
    log_x = log(x);
    eps = -log_x;
    omega = expi2pi(Real(1) / n);
    r_below_rank = r <= n - 1;
  }

  Real xpow(const Real& e) const { return exp(e * log_x); }
  Complex xpow(const Complex& e) const { return exp(e * log_x); }
};

// (z; q_1, ..., q_m)_inf
inline Complex pochhammer_multi(const Complex& z, const std::vector<Complex>& qs, const Precision& pr) {
  if (qs.empty()) return Complex(1) - z;
  for (const auto& q : qs)
    if (abs(q) >= 1) throw Error(ErrorKind::NonConvergent, "pochhammer nome with |q| >= 1");
  const Complex& q = qs.back();
  Real aq = abs(q);
  Real tol = pr.tail() * (1 - aq);
  Complex prod(1), t = z;
  if (qs.size() == 1) {
    while (abs(t) >= tol) {
      prod *= Complex(1) - t;
      t *= q;
    }
    return prod;
  }
  std::vector<Complex> rest(qs.begin(), qs.end() - 1);
  // Inner products with |t| below tol contribute a factor within tol of 1.
  while (abs(t) >= tol) {
    prod *= pochhammer_multi(t, rest, pr);
    t *= q;
  }
  return prod;
}

inline Complex qpoch(const Complex& z, const Complex& q, const Precision& pr) {
  return pochhammer_multi(z, {q}, pr);
}

inline Complex qpoch2(const Complex& z, const Complex& q1, const Complex& q2, const Precision& pr) {
  return pochhammer_multi(z, {q1, q2}, pr);
}

// Theta_q(z) = (z;q)(q/z;q)(q;q)
inline Complex theta_q(const Complex& z, const Complex& q, const Precision& pr) {
  if (abs(q) >= 1) throw Error(ErrorKind::NonConvergent, "theta nome with |q| >= 1");
  if (z == Complex(0)) throw Error(ErrorKind::Domain, "theta_q at z = 0");
  return qpoch(z, q, pr) * qpoch(q / z, q, pr) * qpoch(q, q, pr);
}

// Bilateral series sum_m q^{m(m-1)/2} (-z)^m, used as a cross-check of the product.
inline Complex theta_q_series(const Complex& z, const Complex& q, const Precision& pr) {
  if (abs(q) >= 1) throw Error(ErrorKind::NonConvergent, "theta nome with |q| >= 1");
  if (z == Complex(0)) throw Error(ErrorKind::Domain, "theta_q at z = 0");
  Complex sum(1);
  Real running = 1;
  Real tol = pr.tail();
  // m > 0: term_m = term_{m-1} * (-z) q^{m-1}
  Complex t(1), qm(1);
  for (int m = 1;; ++m) {
    t *= -z * qm;
    qm *= q;
    sum += t;
    Real at = abs(t);
    if (at > running) running = at;
    if (at < tol * running && abs(qm) < Real(1) / 2 && abs(z * qm) < 1) break;
    if (m > 100000) throw Error(ErrorKind::NonConvergent, "theta series");
  }
  // m < 0: term_{-m} = term_{-(m-1)} * (-1/z) q^{m}
  t = Complex(1);
  qm = q;
  for (int m = 1;; ++m) {
    t *= -qm / z;
    qm *= q;
    sum += t;
    Real at = abs(t);
    if (at > running) running = at;
    if (at < tol * running && abs(qm) < Real(1) / 2 && abs(qm / z) < 1) break;
    if (m > 100000) throw Error(ErrorKind::NonConvergent, "theta series");
  }
  return sum;
}

struct ThetaCharacteristic {
  Rational a;
  Rational b;
};

// theta[a;b](v;tau) = sum_m exp(pi i (m+a)((m+a) tau + 2(v+b)))
inline Complex riemann_theta_char(const Real& a, const Real& b, const Complex& v, const Complex& tau,
                                  const Precision& pr) {
  if (!(imag(tau) > 0)) throw Error(ErrorKind::Domain, "theta needs Im tau > 0");
  Real pi = pi_real();
  Complex ipi = imag_unit() * pi;
  auto term = [&](long long m) {
    Real ma = Real(m) + a;
    return exp(ipi * ma * (ma * tau + 2 * (v + b)));
  };
  // Gaussian centre of |term|.
  Real centre = -imag(v) / imag(tau) - a;
  long long m0 = static_cast<long long>(llround(static_cast<double>(centre)));
  Complex sum = term(m0);
  Real running = abs(sum);
  Real tol = pr.tail();
  for (long long d = 1;; ++d) {
    Complex tp = term(m0 + d), tm = term(m0 - d);
    sum += tp + tm;
    Real at = rmax(abs(tp), abs(tm));
    if (at > running) running = at;
    if (at < tol * running && d > 2) break;
    if (d > 1000000) throw Error(ErrorKind::NonConvergent, "theta characteristic series");
  }
  return sum;
}

inline Complex riemann_theta_char(const ThetaCharacteristic& ch, const Complex& v, const Complex& tau,
                                  const Precision& pr) {
  return riemann_theta_char(to_real(ch.a), to_real(ch.b), v, tau, pr);
}

// x^{v^2/s - v} Theta_{x^{2s}}(c x^{2v}); [v] is s = r, c = 1.
inline Complex bracket_general(const Complex& v, const Real& s, const Complex& c, const ModelParams& p) {
  Complex pre = p.xpow(Complex(v * v / s - v));
  return pre * theta_q(c * p.xpow(Complex(2 * v)), Complex(p.xpow(2 * s)), p.prec);
}

inline Complex bracket_r(const Complex& v, const ModelParams& p) { return bracket_general(v, p.r, Complex(1), p); }

inline Complex bracket_rm1(const Complex& v, const ModelParams& p) {
  return bracket_general(v, p.r - 1, Complex(1), p);
}

inline Complex bracket_omega(const Complex& v, const ModelParams& p) { return bracket_general(v, p.r, p.omega, p); }

// [v] with an arbitrary multiplier c inside Theta.
inline Complex bracket_twisted(const Complex& v, const Complex& c, const ModelParams& p) {
  return bracket_general(v, p.r, c, p);
}

// {z} = (z; x^{2r}, x^{2n})
inline Complex braces(const Complex& z, const ModelParams& p) {
  return pochhammer_multi(z, {Complex(p.xpow(2 * p.r)), Complex(p.xpow(Real(2 * p.n)))}, p.prec);
}

inline Complex g_l_func(const Complex& z, int l, const ModelParams& p) {
  if (l < 1 || l > p.n) throw Error(ErrorKind::Domain, "g_l needs 1 <= l <= n");
  const int n = p.n;
  const Real& r = p.r;
  Complex num = braces(p.xpow(2 * n + 2 * r - l - 1) * z, p) * braces(p.xpow(Real(l + 1)) * z, p);
  Complex den = braces(p.xpow(Real(2 * n - l + 1)) * z, p) * braces(p.xpow(2 * r + l - 1) * z, p);
  return num / den;
}

// r_l(v) = z^{(r-1)/r (n-l)/n} g_l(1/z)/g_l(z), z = x^{2v}
inline Complex r_l_func(const Complex& v, int l, const ModelParams& p) {
  Complex z = p.xpow(Complex(2 * v));
  Real alpha = (p.r - 1) / p.r * Real(p.n - l) / p.n;
  Complex zpow = p.xpow(Complex(2 * alpha * v));
  return zpow * g_l_func(Complex(1) / z, l, p) / g_l_func(z, l, p);
}

inline void check_pole(const Complex& den, const ModelParams& p, const char* what) {
  if (abs(den) < p.prec.pole()) throw Error(ErrorKind::Pole, what);
}

// f(v,w) = [v+1/2-w]/[v-1/2]
inline Complex f_func(const Complex& v, const Complex& w, const ModelParams& p) {
  Complex den = bracket_r(v - Real(0.5), p);
  check_pole(den, p, "f(v,w): [v-1/2] vanishes");
  return bracket_r(v + Real(0.5) - w, p) / den;
}

// g(v) = [v-1]/[v+1]
inline Complex g_func(const Complex& v, const ModelParams& p) {
  Complex den = bracket_r(v + 1, p);
  check_pole(den, p, "g(v): [v+1] vanishes");
  return bracket_r(v - 1, p) / den;
}

}  // namespace zn
