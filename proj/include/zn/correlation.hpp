#pragma once

#include "ctm.hpp"

#include <optional>
#include <vector>

namespace zn {

// (z; x^{2n}, x^{2r})
inline Complex dpoch(const Complex& z, const ModelParams& p) {
  return pochhammer_multi(z, {Complex(p.xpow(2 * p.r)), Complex(p.xpow(Real(2 * p.n)))}, p.prec);
}

// (x^a; x^b) with real exponents
inline Complex poch_xx(const Real& a, const Real& b, const ModelParams& p) { return qpoch_x(a, b, p); }

// z^alpha with z = x^{2v}
inline Complex zpow(const Complex& v, const Real& alpha, const ModelParams& p) { return p.xpow(Complex(2 * alpha * v)); }

// c_n = x^{(r-1)/r (n-1)/(2n)} g_{n-1}(x^n) / ((x^2;x^{2r})^n (x^{2r};x^{2r})^{2n-3})
inline Complex c_n_const(const ModelParams& p) {
  const int n = p.n;
  Complex num = p.xpow((p.r - 1) / p.r * Real(n - 1) / (2 * n)) * g_l_func(Complex(p.xpow(Real(n))), n - 1, p);
  Complex a = poch_xx(Real(2), 2 * p.r, p), b = poch_xx(2 * p.r, 2 * p.r, p);
  Complex den(1);
  for (int j = 0; j < n; ++j) den *= a;
  for (int j = 0; j < 2 * n - 3; ++j) den *= b;
  return num / den;
}

// v_0 = v, v_1..v_{n-1} as given, v_n = v + n/2.
inline std::vector<Complex> chain_points(const Complex& v, const std::vector<Complex>& vs, int n) {
  if (static_cast<int>(vs.size()) != n - 1) throw Error(ErrorKind::Domain, "expected n-1 integration variables");
  std::vector<Complex> w;
  w.push_back(v);
  for (auto& t : vs) w.push_back(t);
  w.push_back(v + Real(n) / 2);
  return w;
}

// Scalar prefactor of the normal-ordered product of U_{omega_1}(v) U_{-alpha_1}(v_1) ... U_{omega_{n-1}}(v+n/2).
inline Complex ope_prefactor(const Complex& v, const std::vector<Complex>& vs, const ModelParams& p) {
  const int n = p.n;
  auto w = chain_points(v, vs, n);
  Complex q = Complex(p.xpow(2 * p.r));
  Complex out = p.xpow(-Real(n - 1) / 2 * (p.r - 1) / p.r);
  Complex a = poch_xx(Real(2), 2 * p.r, p), b = poch_xx(2 * p.r, 2 * p.r, p);
  for (int j = 0; j < n; ++j) out *= a;
  for (int j = 0; j < 2 * n - 3; ++j) out *= b;
  out *= zpow(v, -(p.r - 1) / (n * p.r), p);
  for (int j = 0; j < n; ++j) {
    Complex ratio = p.xpow(Complex(2 * (w[j + 1] - w[j])));
    Complex den = qpoch(p.xpow(Real(1)) * ratio, q, p.prec);
    check_pole(den, p, "ope prefactor");
    out *= zpow(w[j], -(p.r - 1) / p.r, p) * qpoch(p.xpow(2 * p.r - 1) * ratio, q, p.prec) / den;
  }
  return out;
}

// Constant (z-independent) part of the trace kernel, shared by all k.
inline Complex trace_kernel_constant(const ModelParams& p) {
  const int n = p.n;
  Complex c = poch_xx(Real(2 * n), Real(2 * n), p);
  Complex b = poch_xx(2 * p.r, 2 * p.r, p);
  for (int j = 0; j < 2 * n - 3; ++j) c *= b;
  Complex num = dpoch(Complex(p.xpow(Real(2))), p), den = dpoch(Complex(p.xpow(2 * p.r + 2 * n - 2)), p);
  for (int j = 0; j < n; ++j) c *= num / den;
  return c;
}

// One factor of the double-product ratio, as a function of dv = v_{j+1} - v_j.
inline Complex trace_kernel_pair(const Complex& dv, const ModelParams& p) {
  const int n = p.n;
  Complex ratio = p.xpow(Complex(2 * dv));  // z_{j+1}/z_j
  Complex inv = Complex(1) / ratio;
  Complex den = dpoch(p.xpow(Real(1)) * ratio, p) * dpoch(p.xpow(Real(2 * n + 1)) * inv, p);
  check_pole(den, p, "trace kernel double product");
  return dpoch(p.xpow(2 * p.r - 1) * ratio, p) * dpoch(p.xpow(2 * p.r + 2 * n - 1) * inv, p) / den;
}

// Coefficient c_j of (v_{j+1} - v_j - 1/2) in the exponent: (r-1)/r a_{0j} - xi_{0j}, j = 1..n-1.
inline Real kernel_exponent_coeff(const std::vector<Real>& k, const std::vector<Real>& l, int j, const ModelParams& p) {
  return (p.r - 1) / p.r * (k[0] - k[j]) - (l[0] - l[j]);
}

// A_{l,k}(v; v_1, ..., v_{n-1}); k, l are coordinates of a + rho and xi + rho.
inline Complex trace_kernel_A(const std::vector<Real>& l, const std::vector<Real>& k, const Complex& v,
                              const std::vector<Complex>& vs, const ModelParams& p) {
  const int n = p.n;
  auto w = chain_points(v, vs, n);
  Complex out = Complex(p.xpow(gaussian_exponent(k, l, p)));
  Complex e(0);
  for (int j = 1; j < n; ++j) e += 2 * kernel_exponent_coeff(k, l, j, p) * (w[j + 1] - w[j] - Real(0.5));
  out *= p.xpow(e);
  out *= trace_kernel_constant(p);
  for (int j = 0; j < n; ++j) out *= trace_kernel_pair(w[j + 1] - w[j], p);
  return out;
}

// Residual of sum_nu prod_{j != nu} f(v_{j+1} - v_j, 1 - pi_{nu j}) / [pi_{nu j}], relative to the largest term.
inline Real elliptic_sum_zero(const std::vector<Complex>& v, const std::vector<Real>& pi_values, const ModelParams& p) {
  const int n = p.n;
  if (static_cast<int>(v.size()) != n || static_cast<int>(pi_values.size()) != n)
    throw Error(ErrorKind::Domain, "elliptic_sum_zero expects n points and n pi values");
  std::vector<Complex> w = v;
  w.push_back(v[0] + Real(n) / 2);
  Complex total(0);
  Real scale = 0;
  for (int nu = 0; nu < n; ++nu) {
    Complex term(1);
    for (int j = 0; j < n; ++j) {
      if (j == nu) continue;
      Real pnj = pi_values[nu] - pi_values[j];
      Complex den = bracket_r(Complex(pnj), p);
      check_pole(den, p, "elliptic sum: [pi_{nu j}] vanishes");
      term *= f_func(w[j + 1] - w[j], Complex(1 - pnj), p) / den;
    }
    total += term;
    scale = rmax(scale, abs(term));
  }
  return scale > 0 ? Real(abs(total) / scale) : abs(total);
}

// Labels of k = l + omega_{i+1} + sum_j m_j alpha_j (level r when l has level r-1).
inline std::vector<Real> sector_k_labels(const std::vector<Real>& l_labels, int i, const std::vector<int>& m) {
  std::vector<Real> k = l_labels;
  k[mod_n(i + 1, static_cast<int>(k.size()))] += 1;
  return add_roots_labels(k, m);
}

inline std::vector<Real> rotate_real_labels(const std::vector<Real>& lab, int steps) { return rotate_labels(lab, steps); }

// B_{l,k}(v,u) from coordinates.
inline Complex B_factor(const std::vector<Real>& l, const std::vector<Real>& k, const Complex& v, const Complex& u,
                        const ModelParams& p) {
  const int n = p.n;
  Complex out = Complex(p.xpow(gaussian_exponent(k, l, p)));
  out *= p.xpow(Complex(2 * (k[0] - k[n - 1]) * (v - u)));
  for (int j = 1; j < n; ++j) out *= bracket_omega(Complex(k[0] - k[j]), p);
  for (int j = 1; j < n; ++j)
    for (int jj = j + 1; jj < n; ++jj) out *= bracket_r(Complex(k[j] - k[jj]), p);
  return out;
}

struct BSum {
  Complex total;
  Real scale;  // sum of |B|
  Real tail_ratio;
};

// sum_mu sum_k B_{sigma^{-mu} l, sigma^{-mu} k}(v, u)
inline BSum B_sum(int i, const std::vector<Real>& l_labels, const Complex& v, const Complex& u, const ModelParams& p,
                  int radius) {
  const int n = p.n;
  BSum out{Complex(0), Real(0), Real(0)};
  Real outer = 0;
  for (int mu = 0; mu < n; ++mu) {
    std::vector<Real> lr = labels_to_coords(rotate_real_labels(l_labels, -mu));
    auto offs = lattice_offsets(n - 1, radius);
    auto vals = parallel_map<Complex>(offs.size(), [&](size_t t) {
      std::vector<Real> kr = labels_to_coords(rotate_real_labels(sector_k_labels(l_labels, i, offs[t].m), -mu));
      return B_factor(lr, kr, v, u, p);
    });
    for (size_t t = 0; t < offs.size(); ++t) {
      out.total += vals[t];
      out.scale += abs(vals[t]);
      if (offs[t].shell == radius) outer += abs(vals[t]);
    }
  }
  out.tail_ratio = out.scale > 0 ? Real(outer / out.scale) : outer;
  return out;
}

inline Complex S_sum(int i, const std::vector<Real>& l_labels, const Complex& v, const Complex& u, const ModelParams& p,
                     int radius) {
  Complex den = bracket_r(v - u, p);
  check_pole(den, p, "S sum at u = v");
  return bracket_omega(Complex(0), p) / den * B_sum(i, l_labels, v, u, p, radius).total;
}

// Right-hand side of the S-limit.
inline Complex S_limit_closed(int i, const std::vector<Real>& l_labels, const ModelParams& p) {
  const int n = p.n;
  const Complex& w = p.omega;
  Complex x2 = p.xpow(Real(2)), x2r = p.xpow(2 * p.r);
  Complex wi(1);
  for (int t = 0; t < mod_n(i + 1, n); ++t) wi *= w;
  Complex q2r = poch_xx(2 * p.r, 2 * p.r, p);
  Complex out = wi * b_l_coords(labels_to_coords(l_labels), p);
  out *= qpoch(w * x2r, x2r, p.prec) * qpoch(x2r / w, x2r, p.prec) / (q2r * q2r);
  Complex q2n = poch_xx(Real(2 * n), Real(2 * n), p);
  Complex num = poch_xx(Real(2), Real(2), p);
  for (int t = 0; t < n; ++t) num *= q2n;
  return out * num / (qpoch(w, x2, p.prec) * qpoch(x2 / w, x2, p.prec));
}

// Central difference of f at t with step h, then one Richardson step with h/2.
template <class F>
Complex richardson_derivative(const F& f, const Complex& t, const Real& h) {
  auto cd = [&](const Real& s) { return (f(t + s) - f(t - s)) / (2 * s); };
  Complex d1 = cd(h), d2 = cd(h / 2);
  return (4 * d2 - d1) / 3;
}

struct SLimitProbe {
  Complex sum_at_v;      // sum_mu sum_k B at u = v
  Real term_scale;       // sum of |B|
  Real cancellation;     // |sum_at_v| / term_scale
  Complex derivative;    // d/du sum B at u = v
  Complex lhs;           // [0]_omega (d/du sum B) / (d/du [v-u]) at u = v
  Complex rhs;
  Real tail_ratio;
  bool finite = false;   // the u -> v limit exists only if sum_at_v vanishes
};

inline SLimitProbe S_limit_probe(int i, const std::vector<Real>& l_labels, const Complex& v, const ModelParams& p,
                                 int radius) {
  SLimitProbe out;
  BSum b0 = B_sum(i, l_labels, v, v, p, radius);
  out.sum_at_v = b0.total;
  out.term_scale = b0.scale;
  out.cancellation = b0.scale > 0 ? Real(abs(b0.total) / b0.scale) : abs(b0.total);
  out.tail_ratio = b0.tail_ratio;
  out.finite = out.cancellation < p.prec.pole();
  Real h = pow(Real(10), -(p.prec.digits / 4));
  out.derivative = richardson_derivative([&](const Complex& u) { return B_sum(i, l_labels, v, u, p, radius).total; }, v, h);
  Complex dden = richardson_derivative([&](const Complex& u) { return bracket_r(v - u, p); }, v, h);
  out.lhs = bracket_omega(Complex(0), p) * out.derivative / dden;
  out.rhs = S_limit_closed(i, l_labels, p);
  return out;
}

inline Complex S_limit(int i, const std::vector<Real>& l_labels, const Complex& v, const ModelParams& p, int radius) {
  SLimitProbe pr = S_limit_probe(i, l_labels, v, p, radius);
  if (!pr.finite)
    throw Error(ErrorKind::CancellationFailure,
                "sum of B at u = v is " + to_string(pr.sum_at_v, 10) + " (relative " + to_string(pr.cancellation, 4) + ")");
  return pr.lhs;
}

inline Complex polarization_formula(int i, const ModelParams& p) {
  const Complex& w = p.omega;
  Complex x2 = p.xpow(Real(2)), x2r = p.xpow(2 * p.r);
  Complex wi(1);
  for (int t = 0; t < mod_n(i + 1, p.n); ++t) wi *= w;
  Complex a = poch_xx(Real(2), Real(2), p), b = poch_xx(2 * p.r, 2 * p.r, p);
  Complex num = qpoch(w * x2r, x2r, p.prec) * qpoch(x2r / w, x2r, p.prec);
  Complex den = qpoch(w * x2, x2, p.prec) * qpoch(x2 / w, x2, p.prec);
  return wi * a * a / (b * b) * num / den;
}

// |z_j| on C_nu in units of |z|, j = 0..n.
struct ContourSpec {
  int nu = 0;
  std::vector<Real> radii;
  Real eps_c;  // absolute offset
  int M = 256;
};

inline ContourSpec make_contour(int nu, const Real& abs_z, const Real& eps_c, int M, const ModelParams& p) {
  const int n = p.n;
  if (M < 2 || M % 2) throw Error(ErrorKind::Domain, "quadrature points must be even");
  ContourSpec c;
  c.nu = nu;
  c.eps_c = eps_c;
  c.M = M;
  c.radii.assign(n + 1, Real(0));
  c.radii[0] = abs_z;
  c.radii[n] = p.xpow(Real(n)) * abs_z;
  for (int j = 1; j < n; ++j) {
    Real base = j <= nu ? abs_z + j * eps_c : abs_z - (n - j) * eps_c;
    if (!(base > 0)) throw Error(ErrorKind::Domain, "contour radius must stay positive");
    c.radii[j] = p.xpow(Real(j)) * base;
  }
  return c;
}

// v with x^{2v} = rho e^{i phi}
inline Complex v_of(const Real& rho, const Real& phi, const ModelParams& p) {
  return Complex(log(rho), phi) / (2 * p.log_x);
}

// Prefactors of the nu-th term that do not depend on the integration variables.
inline Complex g_constant(const std::vector<Real>& k, int nu, const ModelParams& p) {
  Complex c(1);
  for (int j = 0; j < p.n; ++j) {
    if (j == nu) continue;
    Complex den = bracket_r(Complex(k[nu] - k[j]), p);
    check_pole(den, p, "integrand: [a_{nu j}] vanishes");
    c *= bracket_omega(Complex(k[0] - k[j]), p) / den;
  }
  return c;
}

// Integrand of the nu-th term with the [v-u+a_{0 nu}]_omega / [v-u] prefactor.
inline Complex integrand_g(const std::vector<Real>& l, const std::vector<Real>& k, int nu, const Complex& v,
                           const Complex& u, const std::vector<Complex>& vs, const ModelParams& p) {
  const int n = p.n;
  auto w = chain_points(v, vs, n);
  Complex den = bracket_r(v - u, p);
  check_pole(den, p, "integrand at u = v");
  Complex out = bracket_omega(v - u + (k[0] - k[nu]), p) / den * g_constant(k, nu, p);
  for (int j = 0; j < n; ++j) {
    if (j == nu) continue;
    out *= f_func(w[j + 1] - w[j], Complex(1 - (k[nu] - k[j])), p);
  }
  return out * trace_kernel_A(l, k, v, vs, p);
}

struct PipelineSettings {
  int radius = 6;
  int M = 256;
  Real delta0 = Real(1) / 100;
  Real eps_rel = Real(1) / 5;  // eps_c / |z|
  bool wrong_side = false;      // diagnostic: swap the contour side of z_1 for every nu
};

struct HResult {
  Complex value;
  Real tail_ratio;
  Real quad_error;     // exp(-M d) with d the smallest log-distance from a pole circle
  Real seam_mismatch;  // worst relative integrand mismatch between phi = -pi and phi = pi
};

namespace detail {

// log-distance from the pair ratio |z_{j+1}/z_j| to the nearest pole circle of the integrand.
inline Real pair_pole_distance(const Real& ratio_abs, const ModelParams& p) {
  Real lr = log(ratio_abs) / p.log_x;  // ratio = x^{lr}
  Real best = -1;
  auto consider = [&](const Real& pole_exp) {
    Real d = abs(lr - pole_exp) * p.eps;
    if (best < 0 || d < best) best = d;
  };
  // f poles: ratio = x^{1 + 2 r m}; kernel poles: x^{-1-2na-2rb}, x^{2n+1+2na+2rb}
  for (int m = -2; m <= 2; ++m) consider(1 + 2 * p.r * m);
  for (int a = 0; a < 3; ++a)
    for (int b = 0; b < 3; ++b) {
      consider(-1 - 2 * p.n * a - 2 * p.r * b);
      consider(2 * p.n + 1 + 2 * p.n * a + 2 * p.r * b);
    }
  return best;
}

// Values of pair function F(phi_{j+1} - phi_j) on the grid of differences d*h, d = -(M-1)..(M-1).
template <class F>
std::vector<Complex> pair_table(const Real& rho_lo, const Real& rho_hi, int M, const ModelParams& p, const F& fn) {
  Real h = 2 * pi_real() / M;
  std::vector<Complex> t(2 * M - 1);
  for (int d = -(M - 1); d <= M - 1; ++d) {
    Complex dv = v_of(rho_hi / rho_lo, h * d, p);
    t[d + M - 1] = fn(dv);
  }
  return t;
}

}  // namespace detail

// Contour integrals of one boundary sector. Only the [v-u+a_{0 nu}]_omega / [v-u] prefactor depends on u,
// so the integrals are computed once and reused for every delta.
struct SectorIntegrals {
  struct Term {
    Complex gab;                // prod_{0<j<jj} [a_{j jj}]
    std::vector<Real> a0;       // a_{0 nu}
    std::vector<Complex> J;     // everything else in the nu-th term, integrated
    int shell = 0;
  };
  std::vector<Term> terms;
  Complex b_l;
  Real quad_error;
  Real abs_z;
  Real eps_c;
  int radius = 0;
};

// k labels are l + omega_{i+1} + roots, then both are rotated by `steps`.
inline SectorIntegrals sector_integrals(int i, const std::vector<Real>& l_labels, int steps, const Complex& v,
                                        const ModelParams& p, const PipelineSettings& s) {
  const int n = p.n;
  const int M = s.M;
  if (imag(v) != 0) throw Error(ErrorKind::Domain, "pipeline expects real v");
  SectorIntegrals out;
  out.abs_z = p.xpow(2 * real(v));
  out.eps_c = s.eps_rel * out.abs_z;
  out.radius = s.radius;
  std::vector<Real> lr = labels_to_coords(rotate_real_labels(l_labels, steps));
  out.b_l = b_l_coords(lr, p);
  Complex kconst = trace_kernel_constant(p);
  Real h = 2 * pi_real() / M;
  Real machine = pow(Real(2), -static_cast<int>(Real::default_precision() * 3.32));

  std::vector<ContourSpec> contours;
  for (int nu = 0; nu < n; ++nu) {
    int side = nu;
    if (s.wrong_side) side = nu == 0 ? 1 : 0;
    contours.push_back(make_contour(side, out.abs_z, out.eps_c, M, p));
  }

  Real dmin = -1;
  std::vector<std::vector<std::vector<Complex>>> kern(n);
  for (int nu = 0; nu < n; ++nu) {
    const auto& c = contours[nu];
    kern[nu].resize(n);
    for (int j = 0; j < n; ++j) {
      Real d = detail::pair_pole_distance(c.radii[j + 1] / c.radii[j], p);
      if (d < 10 * machine) throw Error(ErrorKind::PoleOnContour, "pole on contour C_" + std::to_string(nu));
      if (dmin < 0 || d < dmin) dmin = d;
      kern[nu][j] =
          detail::pair_table(c.radii[j], c.radii[j + 1], M, p, [&](const Complex& dv) { return trace_kernel_pair(dv, p); });
    }
  }
  out.quad_error = exp(-M * dmin);

  auto offs = lattice_offsets(n - 1, s.radius);
  auto phi_index = [&](int m) { return m - M / 2; };  // phi = h (m - M/2)
  out.terms = parallel_map<SectorIntegrals::Term>(offs.size(), [&](size_t t) {
    std::vector<Real> k = labels_to_coords(rotate_real_labels(sector_k_labels(l_labels, i, offs[t].m), steps));
    SectorIntegrals::Term term;
    term.shell = offs[t].shell;
    term.gab = Complex(1);
    for (int j = 1; j < n; ++j)
      for (int jj = j + 1; jj < n; ++jj) term.gab *= bracket_r(Complex(k[j] - k[jj]), p);
    Complex gauss = Complex(p.xpow(gaussian_exponent(k, lr, p)));
    for (int nu = 0; nu < n; ++nu) {
      const auto& c = contours[nu];
      term.a0.push_back(k[0] - k[nu]);
      // pair tables: kernel ratio * f * exponential
      std::vector<std::vector<Complex>> pairs(n);
      for (int j = 0; j < n; ++j) {
        Real cj = j >= 1 ? kernel_exponent_coeff(k, lr, j, p) : Real(0);
        auto tab = detail::pair_table(c.radii[j], c.radii[j + 1], M, p, [&](const Complex& dv) {
          Complex val = p.xpow(Complex(2 * cj * (dv - Real(0.5))));
          if (j != nu) val *= f_func(dv, Complex(1 - (k[nu] - k[j])), p);
          return val;
        });
        for (size_t q = 0; q < tab.size(); ++q) tab[q] *= kern[nu][j][q];
        pairs[j] = std::move(tab);
      }
      // z_0 and z_n are real; each dz_j / (2 pi i) contributes z_j / M.
      std::vector<Complex> wv(M);
      for (int m = 0; m < M; ++m) {
        int d = phi_index(m);
        wv[m] = pairs[0][d + M - 1] * c.radii[1] * Complex(cos(h * d), sin(h * d)) / Real(M);
      }
      for (int j = 1; j < n - 1; ++j) {
        std::vector<Complex> nw(M, Complex(0));
        for (int m2 = 0; m2 < M; ++m2) {
          Complex acc(0);
          for (int m1 = 0; m1 < M; ++m1) acc += wv[m1] * pairs[j][phi_index(m2) - phi_index(m1) + M - 1];
          int d = phi_index(m2);
          nw[m2] = acc * c.radii[j + 1] * Complex(cos(h * d), sin(h * d)) / Real(M);
        }
        wv = std::move(nw);
      }
      Complex integral(0);
      for (int m = 0; m < M; ++m) integral += wv[m] * pairs[n - 1][-phi_index(m) + M - 1];
      term.J.push_back(g_constant(k, nu, p) * gauss * kconst * integral);
    }
    return term;
  });
  return out;
}

// H^{(i)}_l at u from precomputed sector integrals.
inline HResult H_from_integrals(const SectorIntegrals& si, const Complex& v, const Complex& u, const ModelParams& p) {
  Real delta = abs(u - v);
  if (!(si.eps_c > 2 * delta * si.abs_z * p.eps)) throw Error(ErrorKind::Domain, "contour offset too small for u - v");
  Complex den = bracket_r(v - u, p);
  check_pole(den, p, "H at u = v");
  HResult res{Complex(0), Real(0), si.quad_error, Real(0)};
  Real outer = 0, scale = 0;
  for (const auto& t : si.terms) {
    Complex sum_nu(0);
    for (size_t nu = 0; nu < t.J.size(); ++nu) sum_nu += bracket_omega(v - u + t.a0[nu], p) / den * t.J[nu];
    Complex val = t.gab * sum_nu;
    res.value += val;
    scale += abs(val);
    if (t.shell == si.radius) outer += abs(val);
  }
  res.value /= si.b_l;
  res.tail_ratio = scale > 0 ? Real(outer / scale) : outer;
  return res;
}

inline HResult H_l(int i, const std::vector<Real>& l_labels, int steps, const Complex& v, const Complex& u,
                   const ModelParams& p, const PipelineSettings& s) {
  return H_from_integrals(sector_integrals(i, l_labels, steps, v, p, s), v, u, p);
}

// Integrand at phi_j = -pi against phi_j = +pi, the other angles fixed; worst relative mismatch over j.
inline Real seam_mismatch(const std::vector<Real>& l, const std::vector<Real>& k, int nu, const Complex& v,
                          const Complex& u, const ContourSpec& c, const ModelParams& p) {
  const int n = p.n;
  Real pi = pi_real();
  Real worst = 0;
  for (int j = 1; j < n; ++j) {
    std::vector<Complex> lo(n - 1), hi(n - 1);
    for (int t = 1; t < n; ++t) {
      Real phi = t == j ? -pi : Real(37) / 100 * t;
      lo[t - 1] = v_of(c.radii[t], phi, p);
      hi[t - 1] = v_of(c.radii[t], t == j ? pi : phi, p);
    }
    // include the dz_j / (2 pi i) measure z_j
    Complex zj_lo = c.radii[j] * Complex(-1), zj_hi = zj_lo;
    Complex a = integrand_g(l, k, nu, v, u, lo, p) * zj_lo;
    Complex b = integrand_g(l, k, nu, v, u, hi, p) * zj_hi;
    worst = rmax(worst, rel_diff(a, b));
  }
  return worst;
}

// Checks single-valuedness on every C_nu at the central lattice point of the sector.
inline Real sector_seam_check(int i, const std::vector<Real>& l_labels, int steps, const Complex& v, const Complex& u,
                              const ModelParams& p, const PipelineSettings& s) {
  const int n = p.n;
  Real abs_z = p.xpow(2 * real(v));
  std::vector<Real> lr = labels_to_coords(rotate_real_labels(l_labels, steps));
  std::vector<Real> k =
      labels_to_coords(rotate_real_labels(sector_k_labels(l_labels, i, std::vector<int>(n - 1, 0)), steps));
  Real worst = 0;
  for (int nu = 0; nu < n; ++nu) {
    ContourSpec c = make_contour(nu, abs_z, s.eps_rel * abs_z, s.M, p);
    worst = rmax(worst, seam_mismatch(lr, k, nu, v, u, c, p));
  }
  if (worst > pow(Real(10), -(p.prec.digits - 6)))
    throw Error(ErrorKind::EndpointMismatch, "integrand differs across the seam by " + to_string(worst, 4));
  return worst;
}

struct PolarizationResult {
  Complex value;               // extrapolated u -> v
  Complex formula;
  Complex chi_i;
  std::vector<Complex> per_mu;  // H for each sector at the smallest delta
  std::vector<Real> deltas;
  std::vector<Complex> raw;    // (1/chi) sum_mu H at each delta
  std::vector<Complex> extrapolated;  // Richardson values from consecutive pairs
  Real error_estimate;
  Real delta_scaling;          // |delta_k raw_k| / |delta_0 raw_0| for the last delta; ~1 when raw ~ 1/delta
  bool stable = false;
  bool divergent = false;      // raw grows like 1/delta
  Real tail_ratio;
  Real quad_error;
  Real seam;
  int radius = 0;
  int M = 0;
};

// (1/chi^{(i)}) sum_mu H^{(i)}_{sigma^{-mu}(l)} at u = v + delta for delta0, delta0/2, delta0/4.
inline PolarizationResult polarization_pipeline(int i, const std::vector<Real>& l_labels, const Complex& v,
                                                const ModelParams& p, const PipelineSettings& s) {
  const int n = p.n;
  PolarizationResult out;
  out.formula = polarization_formula(i, p);
  out.chi_i = chi_vertex_value(p);
  out.radius = s.radius;
  out.M = s.M;
  out.tail_ratio = 0;
  out.quad_error = 0;
  out.seam = 0;
  std::vector<SectorIntegrals> sectors;
  for (int mu = 0; mu < n; ++mu) {
    out.seam = rmax(out.seam, sector_seam_check(i, l_labels, -mu, v, v + s.delta0, p, s));
    sectors.push_back(sector_integrals(i, l_labels, -mu, v, p, s));
  }
  for (int level = 0; level < 3; ++level) {
    Real delta = s.delta0 / (1 << level);
    Complex u = v + delta;
    Complex total(0);
    std::vector<Complex> per_mu;
    for (int mu = 0; mu < n; ++mu) {
      HResult h = H_from_integrals(sectors[mu], v, u, p);
      per_mu.push_back(h.value);
      total += h.value;
      out.tail_ratio = rmax(out.tail_ratio, h.tail_ratio);
      out.quad_error = rmax(out.quad_error, h.quad_error);
    }
    out.deltas.push_back(delta);
    out.raw.push_back(total / out.chi_i);
    out.per_mu = per_mu;
  }
  // first-order Richardson in delta
  for (size_t t = 0; t + 1 < out.raw.size(); ++t) out.extrapolated.push_back(2 * out.raw[t + 1] - out.raw[t]);
  out.value = out.extrapolated.back();
  out.error_estimate = abs(out.extrapolated.back() - out.raw.back());
  Real change = abs(out.extrapolated[1] - out.extrapolated[0]);
  out.stable = change < 3 * out.error_estimate;
  out.delta_scaling = abs(out.raw.back() * out.deltas.back()) / abs(out.raw.front() * out.deltas.front());
  out.divergent = out.delta_scaling > Real(1) / 2;
  return out;
}

}  // namespace zn
