#pragma once

#include "linalg.hpp"
#include "weights.hpp"

#include <vector>

namespace zn {

struct IntertwinerVec {
  std::vector<Complex> components;  // coefficient of eps_nu
  WeightState a;                    // upper state
  int mu = 0;                       // lower state is a - epsbar_mu
  Complex v;
};

// t(v)^a_{a - epsbar_mu}, component nu: theta[0; 1/2 + nu/n](v/(nr) + abar_mu/r; pi i/(n eps r))
inline IntertwinerVec intertwiner(const Complex& v, const WeightState& a, int mu, const ModelParams& p) {
  const int n = p.n;
  Complex tau = imag_unit() * pi_real() / (n * p.eps * p.r);
  Complex arg = v / (n * p.r) + to_real(a.abar(mu)) / p.r;
  IntertwinerVec t{std::vector<Complex>(n), a, mu, v};
  for (int nu = 0; nu < n; ++nu) t.components[nu] = riemann_theta_char(Real(0), Real(1) / 2 + Real(nu) / n, arg, tau, p.prec);
  return t;
}

// M(nu, mu) = component nu of t(v)^a_{a - epsbar_mu}
inline CMatrix intertwiner_matrix(const Complex& v, const WeightState& a, const ModelParams& p) {
  CMatrix M(p.n);
  for (int mu = 0; mu < p.n; ++mu) {
    auto t = intertwiner(v, a, mu, p);
    for (int nu = 0; nu < p.n; ++nu) M(nu, mu) = t.components[nu];
  }
  return M;
}

// Row nu, column mu: t*_mu(v)^{a - epsbar_nu}_a.
inline CMatrix dual_intertwiners(const Complex& v, const WeightState& a, const ModelParams& p) {
  Real max_cond = pow(Real(10), p.prec.digits / 2);
  return inverse(intertwiner_matrix(v, a, p), max_cond);
}

// Rtt = Wtt for d = a + epsbar_mu, c = d + epsbar_nu. Relative max-norm residual.
inline Real check_vf(const Complex& v1, const Complex& v2, const WeightState& a, const WeightState& c,
                     const WeightState& d, const WeightTensor& R, const ModelParams& p) {
  const int n = p.n;
  int mu = step_index(a, d), nu = step_index(d, c);
  if (mu < 0 || nu < 0) throw Error(ErrorKind::NotAdmissible, "check_vf path a -> d -> c");
  auto t1 = intertwiner(v1, d, mu, p).components;
  auto t2 = intertwiner(v2, c, nu, p).components;
  std::vector<Complex> lhs(n * n, Complex(0)), rhs(n * n, Complex(0));
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int l = 0; l < n; ++l) lhs[i * n + k] += R.at(i, k, j, l) * t1[j] * t2[l];
  for (int mb = 0; mb < n; ++mb) {
    WeightState b = a.plus_epsbar(mb);
    int nb = step_index(b, c);
    if (nb < 0) continue;
    Complex w = face_w(c, d, b, a, v1 - v2, p);
    auto s1 = intertwiner(v1, c, nb, p).components;
    auto s2 = intertwiner(v2, b, mb, p).components;
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) rhs[i * n + k] += s1[i] * s2[k] * w;
  }
  Real diff = 0, scale = 0;
  for (int i = 0; i < n * n; ++i) {
    diff = rmax(diff, abs(lhs[i] - rhs[i]));
    scale = rmax(scale, rmax(abs(lhs[i]), abs(rhs[i])));
  }
  return scale > 0 ? Real(diff / scale) : diff;
}

// Worst residual over all two-step paths from a.
inline Real check_vf(const Complex& v1, const Complex& v2, const WeightState& a, const ModelParams& p) {
  WeightTensor R = r_full(v1 - v2, p);
  Real worst = 0;
  for (int mu = 0; mu < p.n; ++mu) {
    WeightState d = a.plus_epsbar(mu);
    for (int nu = 0; nu < p.n; ++nu) worst = rmax(worst, check_vf(v1, v2, a, d.plus_epsbar(nu), d, R, p));
  }
  return worst;
}

// Dual relation: t*(v1)^b_c (x) t*(v2)^a_b R(v1-v2) = sum_d W[c d; b a] t*(v1)^a_d (x) t*(v2)^d_c.
// With `skipped` set, paths through a state with singular dual vectors are counted there.
inline Real check_dual_vf(const Complex& v1, const Complex& v2, const WeightState& a, const ModelParams& p,
                          int* skipped = nullptr) {
  const int n = p.n;
  WeightTensor R = r_full(v1 - v2, p);
  Complex w12 = v1 - v2;
  // t*(v)^{up - epsbar_nu}_{up}: row nu of the dual matrix at the upper state.
  auto dual_row = [&](const Complex& v, const WeightState& low, const WeightState& up) {
    int nu = step_index(low, up);
    if (nu < 0) throw Error(ErrorKind::NotAdmissible, "dual intertwiner states");
    CMatrix D = dual_intertwiners(v, up, p);
    std::vector<Complex> row(n);
    for (int m = 0; m < n; ++m) row[m] = D(nu, m);
    return row;
  };
  Real worst = 0;
  for (int mb = 0; mb < n; ++mb) {
    WeightState b = a.plus_epsbar(mb);
    for (int nb = 0; nb < n; ++nb) {
      WeightState c = b.plus_epsbar(nb);
      if (skipped) {
        bool resonant = !generic_state(c, static_cast<double>(p.r), 1e-9) || !generic_state(b, static_cast<double>(p.r), 1e-9);
        for (int md = 0; md < n && !resonant; ++md)
          if (step_index(a.plus_epsbar(md), c) >= 0 && !generic_state(a.plus_epsbar(md), static_cast<double>(p.r), 1e-9))
            resonant = true;
        if (resonant) {
          ++*skipped;
          continue;
        }
      }
      auto s1 = dual_row(v1, b, c);
      auto s2 = dual_row(v2, a, b);
      std::vector<Complex> lhs(n * n, Complex(0)), rhs(n * n, Complex(0));
      for (int i = 0; i < n; ++i)
        for (int k = 0; k < n; ++k)
          for (int j = 0; j < n; ++j)
            for (int l = 0; l < n; ++l) lhs[j * n + l] += s1[i] * s2[k] * R.at(i, k, j, l);
      for (int md = 0; md < n; ++md) {
        WeightState d = a.plus_epsbar(md);
        if (step_index(d, c) < 0) continue;
        Complex w = face_w(c, d, b, a, w12, p);
        auto t1 = dual_row(v1, a, d);
        auto t2 = dual_row(v2, d, c);
        for (int j = 0; j < n; ++j)
          for (int l = 0; l < n; ++l) rhs[j * n + l] += w * t1[j] * t2[l];
      }
      Real diff = 0, scale = 0;
      for (int i = 0; i < n * n; ++i) {
        diff = rmax(diff, abs(lhs[i] - rhs[i]));
        scale = rmax(scale, rmax(abs(lhs[i]), abs(rhs[i])));
      }
      worst = rmax(worst, scale > 0 ? Real(diff / scale) : diff);
    }
  }
  return worst;
}

// Second orthogonality relation residual: max |M M^{-1} - 1| and |M^{-1} M - 1|.
inline Real dual_orthogonality_residual(const Complex& v, const WeightState& a, const ModelParams& p) {
  CMatrix M = intertwiner_matrix(v, a, p);
  CMatrix D = dual_intertwiners(v, a, p);
  CMatrix A = D * M, B = M * D;
  Real worst = 0;
  for (int i = 0; i < p.n; ++i)
    for (int j = 0; j < p.n; ++j) {
      Complex e = Complex(i == j ? 1 : 0);
      worst = rmax(worst, rmax(abs(A(i, j) - e), abs(B(i, j) - e)));
    }
  return worst;
}

// (-1)^n: multiplier inside the leading theta of the tail-weight closed forms.
inline Complex parity_twist(int n) { return Complex(n % 2 == 0 ? 1 : -1); }

enum class TailForm { Printed, ParityCorrected };

// L[a0' a1'; a0 a1 | u] = sum_mu t*_mu(-u)^{a1}_{a0} t^mu(-u)^{a0'}_{a1'}
inline Complex l_weight_sum(const WeightState& a0p, const WeightState& a1p, const WeightState& a0,
                            const WeightState& a1, const Complex& u, const ModelParams& p) {
  int nu_low = step_index(a1, a0);
  int nu_up = step_index(a1p, a0p);
  if (nu_low < 0 || nu_up < 0) throw Error(ErrorKind::NotAdmissible, "tail weight rows");
  CMatrix D = dual_intertwiners(-u, a0, p);
  auto t = intertwiner(-u, a0p, nu_up, p).components;
  Complex s(0);
  for (int m = 0; m < p.n; ++m) s += D(nu_low, m) * t[m];
  return s;
}

// L[a' a'-epsbar_nu; a a-epsbar_mu | u] closed form.
inline Complex l_weight_closed(const WeightState& ap, int nu, const WeightState& a, int mu, const Complex& u,
                               const ModelParams& p, TailForm form = TailForm::ParityCorrected) {
  Complex c = form == TailForm::ParityCorrected ? parity_twist(p.n) : Complex(1);
  Real abar_p_nu = to_real(ap.abar(nu));
  Complex den = bracket_twisted(u, c, p);
  check_pole(den, p, "tail weight: [u] vanishes");
  Complex val = bracket_twisted(u + to_real(a.abar(mu)) - abar_p_nu, c, p) / den;
  for (int j = 0; j < p.n; ++j) {
    if (j == mu) continue;
    Complex bj = bracket_r(Complex(Real(a.amn(mu, j))), p);
    check_pole(bj, p, "tail weight: [a_{mu j}] vanishes");
    val *= bracket_r(Complex(abar_p_nu - to_real(a.abar(j))), p) / bj;
  }
  return val;
}

// max over (mu, nu) of |sum form - closed form|, relative to the largest closed-form entry.
inline Real l_weight_residual(const WeightState& ap, const WeightState& a, const Complex& u, const ModelParams& p,
                              TailForm form = TailForm::ParityCorrected) {
  Real diff = 0, scale = 0;
  for (int mu = 0; mu < p.n; ++mu)
    for (int nu = 0; nu < p.n; ++nu) {
      Complex s = l_weight_sum(ap, ap.plus_epsbar(nu, -1), a, a.plus_epsbar(mu, -1), u, p);
      Complex c = l_weight_closed(ap, nu, a, mu, u, p, form);
      diff = rmax(diff, abs(s - c));
      scale = rmax(scale, abs(c));
    }
  return scale > 0 ? Real(diff / scale) : diff;
}

// prod_j L[a'_j a'_{j+1}; a_j a_{j+1} | u] over two finite paths that end on the same state.
inline Complex tail_product(const std::vector<WeightState>& upper, const std::vector<WeightState>& lower,
                            const Complex& u, const ModelParams& p) {
  if (upper.size() != lower.size() || upper.empty()) throw Error(ErrorKind::Domain, "tail paths must have equal length");
  if (!(upper.back() == lower.back())) throw Error(ErrorKind::Domain, "tail paths must agree at the end");
  Complex prod(1);
  for (size_t j = 0; j + 1 < upper.size(); ++j) {
    prod *= l_weight_sum(upper[j], upper[j + 1], lower[j], lower[j + 1], u, p);
  }
  return prod;
}

struct OmegaSum {
  Complex lhs;
  Complex rhs;          // closed form used for the residual
  Complex rhs_printed;  // untwisted leading ratio
  Real residual;
};

// sum_j omega^j t*_j(v-u)^{a - epsbar_nu}_a t^j(v-u)^a_{a - epsbar_mu} against the bracket product.
inline OmegaSum omega_weighted_sum(const WeightState& a, int mu, int nu, const Complex& vu, const ModelParams& p) {
  const int n = p.n;
  CMatrix D = dual_intertwiners(vu, a, p);
  auto t = intertwiner(vu, a, mu, p).components;
  OmegaSum out;
  out.lhs = Complex(0);
  Complex w(1);
  for (int j = 0; j < n; ++j) {
    out.lhs += w * D(nu, j) * t[j];
    w *= p.omega;
  }
  Complex tail(1);
  for (int j = 0; j < n; ++j) {
    if (j == nu) continue;
    Complex den = bracket_r(Complex(Real(a.amn(nu, j))), p);
    check_pole(den, p, "omega sum: [a_{nu j}] vanishes");
    tail *= bracket_omega(Complex(Real(a.amn(mu, j))), p) / den;
  }
  Complex s = parity_twist(n);
  Complex am = Complex(Real(a.amn(mu, nu)));
  Complex den_t = bracket_twisted(vu, s, p), den_p = bracket_r(vu, p);
  check_pole(den_t, p, "omega sum: [v-u] vanishes");
  out.rhs = bracket_twisted(vu + am, s * p.omega, p) / den_t * tail;
  out.rhs_printed = bracket_omega(vu + am, p) / den_p * tail;
  out.residual = rel_diff(out.lhs, out.rhs);
  return out;
}

}  // namespace zn
