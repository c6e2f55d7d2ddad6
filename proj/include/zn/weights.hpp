#pragma once

#include "lattice.hpp"

#include <map>
#include <vector>

namespace zn {

// n^2 x n^2 tensor, entry (i,k;j,l) = <e_i (x) e_k| T |e_j (x) e_l>.
struct WeightTensor {
  int n = 0;
  std::vector<Complex> e;

  WeightTensor() = default;
  explicit WeightTensor(int n_) : n(n_), e(static_cast<size_t>(n_) * n_ * n_ * n_, Complex(0)) {}

  Complex& at(int i, int k, int j, int l) { return e[((static_cast<size_t>(i) * n + k) * n + j) * n + l]; }
  const Complex& at(int i, int k, int j, int l) const {
    return e[((static_cast<size_t>(i) * n + k) * n + j) * n + l];
  }

  Real max_abs() const {
    Real m = 0;
    for (const auto& v : e) m = rmax(m, abs(v));
    return m;
  }
};

inline WeightTensor operator*(const Complex& s, WeightTensor t) {
  for (auto& v : t.e) v *= s;
  return t;
}


inline WeightTensor permutation_tensor(int n) {
  WeightTensor P(n);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k) P.at(i, k, k, i) = Complex(1);
  return P;
}

// (1/n) sum_alpha theta-ratio I_alpha (x) I_alpha^{-1}, I_alpha = g^{a1} h^{a2}
inline WeightTensor rbar_charsum(const Complex& v, const ModelParams& p) {
  const int n = p.n;
  Complex tau = imag_unit() * pi_real() / (p.eps * p.r);
  Complex shift = Complex(Real(1) / (n * p.r));
  WeightTensor R(n);
  for (int a1 = 0; a1 < n; ++a1) {
    for (int a2 = 0; a2 < n; ++a2) {
      Real ca = Real(1) / 2 - Real(a1) / n;
      Real cb = Real(1) / 2 + Real(a2) / n;
      Complex den = riemann_theta_char(ca, cb, shift, tau, p.prec);
      if (abs(den) < p.prec.pole()) throw Error(ErrorKind::Pole, "character-sum denominator vanishes");
      Complex W = riemann_theta_char(ca, cb, shift - v / p.r, tau, p.prec) / den / Real(n);
      // I[i][j] = omega^{a1 i} delta_{i, j-a2};  I^{-1}[k][l] = omega^{-a1 l} delta_{k, l+a2}
      for (int j = 0; j < n; ++j) {
        int i = mod_n(j - a2, n);
        Complex Aij = expi2pi(Real(mod_n(a1 * i, n)) / n);
        for (int l = 0; l < n; ++l) {
          int k = mod_n(l + a2, n);
          Complex Akl = expi2pi(Real(mod_n(-a1 * l, n)) / n);
          R.at(i, k, j, l) += W * Aij * Akl;
        }
      }
    }
  }
  return R;
}

namespace detail {
// theta[1/2; 1/2 + b/n](u; pi i/(n eps r))
inline Complex theta_half(int b, const Complex& u, const ModelParams& p) {
  Complex tau = imag_unit() * pi_real() / (p.n * p.eps * p.r);
  return riemann_theta_char(Real(1) / 2, Real(1) / 2 + Real(b) / p.n, u, tau, p.prec);
}

inline Complex h_factor(const Complex& v, const ModelParams& p) {
  const int n = p.n;
  Complex num(1), den(1);
  for (int j = 0; j < n; ++j) num *= theta_half(j, v / (n * p.r), p);
  for (int j = 1; j < n; ++j) den *= theta_half(j, Complex(0), p);
  return num / den;
}
}  // namespace detail

inline Complex rbar_element(int i, int k, int j, int l, const Complex& v, const ModelParams& p, const Complex& h) {
  const int n = p.n;
  if (mod_n(i + k - j - l, n) != 0) return Complex(0);
  Complex nr = Complex(n * p.r);
  Complex den = detail::theta_half(j - k, v / nr, p) * detail::theta_half(j - i, Complex(1) / nr, p);
  if (abs(den) < p.prec.pole()) throw Error(ErrorKind::Pole, "elementwise R denominator vanishes");
  return h * detail::theta_half(k - i, (Complex(1) - v) / nr, p) / den;
}

inline Complex rbar_element(int i, int k, int j, int l, const Complex& v, const ModelParams& p) {
  return rbar_element(i, k, j, l, v, p, detail::h_factor(v, p));
}

inline WeightTensor rbar_elementwise(const Complex& v, const ModelParams& p) {
  const int n = p.n;
  WeightTensor R(n);
  Complex h = detail::h_factor(v, p);
  for (int i = 0; i < n; ++i)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        int l = mod_n(i + k - j, n);
        R.at(i, k, j, l) = rbar_element(i, k, j, l, v, p, h);
      }
  return R;
}

// [1]/[1-v] r_1(v)
inline Complex r_prefactor(const Complex& v, const ModelParams& p) {
  Complex den = bracket_r(Complex(1) - v, p);
  check_pole(den, p, "[1-v] vanishes");
  return bracket_r(Complex(1), p) / den * r_l_func(v, 1, p);
}

inline WeightTensor r_full(const Complex& v, const ModelParams& p) { return r_prefactor(v, p) * rbar_elementwise(v, p); }

// W[c d; b a | v] at fixed v: a south-east, b south-west, c north-west, d north-east.
// Brackets that depend only on v are evaluated once; [a_{mu nu}] values are memoized.
class FaceWeightFn {
 public:
  FaceWeightFn(const Complex& v, const ModelParams& p) : p_(p) {
    r1_ = r_l_func(v, 1, p);
    b1v_ = bracket_r(Complex(1) - v, p);
    check_pole(b1v_, p, "face weight: [1-v] vanishes");
    bv_ = bracket_r(v, p);
    b1_ = bracket_r(Complex(1), p);
    v_ = v;
  }

  Complex operator()(const WeightState& c, const WeightState& d, const WeightState& b, const WeightState& a) const {
    int mu = step_index(a, d), nu = step_index(d, c), mb = step_index(a, b), nb = step_index(b, c);
    if (mu < 0 || nu < 0 || mb < 0 || nb < 0) return Complex(0);
    if (mu == nu) return mb == mu ? r1_ : Complex(0);
    long long am = a.amn(mu, nu);
    const Complex& bam = bracket_int(am);
    if (abs(bam) < p_.prec.pole()) throw Error(ErrorKind::Pole, "face weight at resonant state [a_{mu nu}] = 0");
    if (mb == nu) return -r1_ * bv_ * bracket_int(am + 1) / (b1v_ * bam);
    if (mb == mu) return r1_ * b1_ * bracket_r(v_ + Real(am), p_) / (b1v_ * bam);
    return Complex(0);
  }

 private:
  const Complex& bracket_int(long long m) const {
    auto it = ints_.find(m);
    if (it == ints_.end()) it = ints_.emplace(m, bracket_r(Complex(Real(m)), p_)).first;
    return it->second;
  }

  const ModelParams& p_;
  Complex v_, r1_, b1v_, bv_, b1_;
  mutable std::map<long long, Complex> ints_;
};

inline Complex face_w(const WeightState& c, const WeightState& d, const WeightState& b, const WeightState& a,
                      const Complex& v, const ModelParams& p) {
  return FaceWeightFn(v, p)(c, d, b, a);
}

namespace detail {
// Row-sparse operator on (C^n)^{(x)3}: rows[row] = list of (col, value).
struct Sparse3 {
  int dim;
  std::vector<std::vector<std::pair<int, Complex>>> rows;
};

// Embed R acting on factors (s,t) of a triple tensor product.
inline Sparse3 embed(const WeightTensor& R, int s, int t) {
  const int n = R.n;
  Sparse3 S{n * n * n, {}};
  S.rows.resize(S.dim);
  int idx[3], jdx[3];
  for (int row = 0; row < S.dim; ++row) {
    idx[0] = row / (n * n);
    idx[1] = (row / n) % n;
    idx[2] = row % n;
    for (int j = 0; j < n; ++j)
      for (int l = 0; l < n; ++l) {
        const Complex& val = R.at(idx[s], idx[t], j, l);
        if (val == Complex(0)) continue;
        jdx[0] = idx[0];
        jdx[1] = idx[1];
        jdx[2] = idx[2];
        jdx[s] = j;
        jdx[t] = l;
        S.rows[row].push_back({(jdx[0] * n + jdx[1]) * n + jdx[2], val});
      }
  }
  return S;
}

// Dense result of S * M (M dense dim x dim, row-major).
inline std::vector<Complex> mul(const Sparse3& S, const std::vector<Complex>& M) {
  const int d = S.dim;
  std::vector<Complex> out(static_cast<size_t>(d) * d, Complex(0));
  for (int row = 0; row < d; ++row)
    for (const auto& [col, val] : S.rows[row])
      for (int c = 0; c < d; ++c) out[static_cast<size_t>(row) * d + c] += val * M[static_cast<size_t>(col) * d + c];
  return out;
}

inline std::vector<Complex> dense(const Sparse3& S) {
  const int d = S.dim;
  std::vector<Complex> out(static_cast<size_t>(d) * d, Complex(0));
  for (int row = 0; row < d; ++row)
    for (const auto& [col, val] : S.rows[row]) out[static_cast<size_t>(row) * d + col] = val;
  return out;
}
}  // namespace detail

// max |R12 R13 R23 - R23 R13 R12| / max entry, with R12 = R(v1-v2), R13 = R(v1-v3), R23 = R(v2-v3)
inline Real ybe_residual_tensors(const WeightTensor& R12, const WeightTensor& R13, const WeightTensor& R23) {
  auto A12 = detail::embed(R12, 0, 1), A13 = detail::embed(R13, 0, 2), A23 = detail::embed(R23, 1, 2);
  auto lhs = detail::mul(A12, detail::mul(A13, detail::dense(A23)));
  auto rhs = detail::mul(A23, detail::mul(A13, detail::dense(A12)));
  Real diff = 0, scale = 0;
  for (size_t i = 0; i < lhs.size(); ++i) {
    diff = rmax(diff, abs(lhs[i] - rhs[i]));
    scale = rmax(scale, rmax(abs(lhs[i]), abs(rhs[i])));
  }
  return scale > 0 ? Real(diff / scale) : diff;
}

inline Real ybe_vertex_residual(const Complex& v1, const Complex& v2, const Complex& v3, const ModelParams& p) {
  return ybe_residual_tensors(r_full(v1 - v2, p), r_full(v1 - v3, p), r_full(v2 - v3, p));
}

// Two-spectral-parameter form: v3 = 0.
inline Real ybe_vertex_residual(const Complex& v1, const Complex& v2, const ModelParams& p) {
  return ybe_vertex_residual(v1, v2, Complex(0), p);
}

inline std::vector<WeightState> neighbours(const WeightState& a) {
  std::vector<WeightState> out;
  for (int mu = 0; mu < a.n(); ++mu) out.push_back(a.plus_epsbar(mu));
  return out;
}

inline bool contains(const std::vector<WeightState>& v, const WeightState& s) {
  for (const auto& t : v)
    if (t == s) return true;
  return false;
}

// Star-triangle relation around the hexagon a -> (b, f) -> (c, e) -> d:
// sum_g W[d e; c g|v1] W[c g; b a|v2] W[e f; g a|v1-v2]
//   = sum_g W[g f; b a|v1] W[d e; g f|v2] W[d g; c b|v1-v2]
inline Real ybe_face_residual_at(const WeightState& a, const WeightState& b, const WeightState& c,
                                 const WeightState& d, const WeightState& e, const WeightState& f,
                                 const FaceWeightFn& w1, const FaceWeightFn& w2, const FaceWeightFn& w12,
                                 Real* scale_out = nullptr) {
  Complex lhs(0), rhs(0);
  for (const auto& g : neighbours(a)) lhs += w1(d, e, c, g) * w2(c, g, b, a) * w12(e, f, g, a);
  for (const auto& g : neighbours(b)) rhs += w1(g, f, b, a) * w2(d, e, g, f) * w12(d, g, c, b);
  if (scale_out) *scale_out = rmax(abs(lhs), abs(rhs));
  return abs(lhs - rhs);
}

inline Real ybe_face_residual_at(const WeightState& a, const WeightState& b, const WeightState& c,
                                 const WeightState& d, const WeightState& e, const WeightState& f,
                                 const Complex& v1, const Complex& v2, const ModelParams& p, Real* scale_out = nullptr) {
  FaceWeightFn w1(v1, p), w2(v2, p), w12(v1 - v2, p);
  return ybe_face_residual_at(a, b, c, d, e, f, w1, w2, w12, scale_out);
}

// Max over every hexagon with south corner a; relative to the largest side. With `skipped` set,
// hexagons that touch a resonant state are counted there instead of raising PoleError.
inline Real ybe_face_residual(const WeightState& a, const Complex& v1, const Complex& v2, const ModelParams& p,
                              int* skipped = nullptr) {
  FaceWeightFn w1(v1, p), w2(v2, p), w12(v1 - v2, p);
  Real worst = 0, scale = 0;
  for (const auto& b : neighbours(a))
    for (const auto& c : neighbours(b))
      for (const auto& f : neighbours(a))
        for (const auto& e : neighbours(f)) {
          auto ce = neighbours(c);
          auto ee = neighbours(e);
          for (const auto& d : ce) {
            if (!contains(ee, d)) continue;
            Real s, res;
            try {
              res = ybe_face_residual_at(a, b, c, d, e, f, w1, w2, w12, &s);
            } catch (const Error& err) {
              if (!skipped || err.kind() != ErrorKind::Pole) throw;
              ++*skipped;
              continue;
            }
            worst = rmax(worst, res);
            scale = rmax(scale, s);
          }
        }
  return scale > 0 ? Real(worst / scale) : worst;
}

// Exponent of |R^{mu nu}_{mu' nu'}(v)| in zeta = x^{2v/n}, from two small-x samples.
inline Real lowtemp_probe(int mu, int nu, int mup, int nup, const Real& v, int n, const Real& r, const Real& x1,
                          const Real& x2, const Precision& pr) {
  auto sample = [&](const Real& x) {
    ModelParams p(n, r, x, pr);
    Complex val = r_prefactor(Complex(v), p) * rbar_element(mu, nu, mup, nup, Complex(v), p);
    Real logzeta = 2 * v / n * p.log_x;
    return std::pair<Real, Real>(log(Real(abs(val))), logzeta);
  };
  auto s1 = sample(x1);
  auto s2 = sample(x2);
  if (!isfinite(s1.first) || !isfinite(s2.first)) throw Error(ErrorKind::DegenerateFit, "vanishing R entry");
  return (s1.first - s2.first) / (s1.second - s2.second);
}

}  // namespace zn
