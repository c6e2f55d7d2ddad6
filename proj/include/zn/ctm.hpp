#pragma once

#include "lattice.hpp"
#include "parallel.hpp"

#include <functional>
#include <map>
#include <vector>

namespace zn {

// H_v(mu, nu)
inline int h_v(int mu, int nu, int n) {
  if (mu < 0 || nu < 0 || mu >= n || nu >= n) throw Error(ErrorKind::Domain, "h_v index out of range");
  return nu < mu ? mu - nu - 1 : n - 1 + mu - nu;
}

// H_f(c, b, a) with b = a + epsbar_mu, c = b + epsbar_nu: H_v(nu, mu)/n.
inline Rational h_f(const WeightState& c, const WeightState& b, const WeightState& a) {
  int mu = step_index(a, b), nu = step_index(b, c);
  if (mu < 0 || nu < 0) throw Error(ErrorKind::NotAdmissible, "h_f triple " + c.str() + " " + b.str() + " " + a.str());
  return Rational(h_v(nu, mu, a.n()), a.n());
}

// Stored prefix (mu_1, ..., mu_L); beyond it mu_j = i+1-j (mod n).
struct VertexPath {
  int n = 2;
  int sector = 0;
  std::vector<int> mus;

  int at(long long j) const {
    if (j >= 1 && j <= static_cast<long long>(mus.size())) return mus[j - 1];
    return mod_n(sector + 1 - j, n);
  }
};

// Stored prefix a_0, ..., a_L; beyond it a_j = xi + omega_{i+1-j}.
struct FacePath {
  std::vector<WeightState> states;
  WeightState xi;
  int sector = 0;

  WeightState ground(long long j) const {
    const int n = xi.n();
    int m = mod_n(sector + 1 - j, n);
    WeightState g = xi;
    for (int nu = 0; nu < m; ++nu) g = g.plus_epsbar(nu);
    return g;
  }
  WeightState at(long long j) const {
    if (j >= 0 && j < static_cast<long long>(states.size())) return states[j];
    return ground(j);
  }
};

inline Rational ctm_energy(const VertexPath& p) {
  for (int m : p.mus)
    if (m < 0 || m >= p.n) throw Error(ErrorKind::Domain, "vertex path entry out of range");
  long long e = 0;
  for (long long j = 1; j <= static_cast<long long>(p.mus.size()); ++j) e += j * h_v(p.at(j), p.at(j + 1), p.n);
  return Rational(e);
}

inline Rational ctm_energy(const FacePath& p) {
  if (p.states.empty()) throw Error(ErrorKind::Domain, "empty face path");
  const long long L = static_cast<long long>(p.states.size());
  if (!(p.states.back() == p.ground(L - 1))) throw Error(ErrorKind::DivergentEnergy, "face path tail is not the ground state");
  Rational e(0);
  for (long long j = 1; j < L; ++j) e += Rational(j) * h_f(p.at(j - 1), p.at(j), p.at(j + 1));
  return e;
}

// Integer power series in q = x^2, truncated at q^order.
using Series = std::vector<long long>;

inline Series series_mul(const Series& a, const Series& b, int order) {
  Series c(order + 1, 0);
  for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i)
    if (a[i])
      for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j) c[i + j] += a[i] * b[j];
  return c;
}

// 1/(1 - q^k)
inline Series series_geometric(int k, int order) {
  Series s(order + 1, 0);
  for (int i = 0; i <= order; i += k) s[i] = 1;
  return s;
}

inline Series series_one_minus(int k, int order) {
  Series s(order + 1, 0);
  s[0] = 1;
  if (k <= order) s[k] -= 1;
  return s;
}

// (q^n; q^n) / (q; q)
inline Series chi_vertex_product(int n, int order) {
  Series s(order + 1, 0);
  s[0] = 1;
  for (int j = 1; j <= order; ++j) {
    s = series_mul(s, series_geometric(j, order), order);
    if (n * j <= order) s = series_mul(s, series_one_minus(n * j, order), order);
  }
  return s;
}

// Partitions of N where each part occurs at most n-1 times.
inline Series chi_vertex_bruteforce(int n, int order) {
  Series count(order + 1, 0);
  std::function<void(int, int)> walk = [&](int remaining_max_part, int total) {
    count[total] += 1;
    for (int part = remaining_max_part; part >= 1; --part)
      for (int mult = 1; mult <= n - 1 && total + mult * part <= order; ++mult) {
        // parts strictly decreasing across levels, multiplicity chosen per level
        walk(part - 1, total + mult * part);
      }
  };
  walk(order, 0);
  return count;
}

// 1/(q^n; q^n)^{n-1}
inline Series face_series_product(int n, int order) {
  Series s(order + 1, 0);
  s[0] = 1;
  for (int e = 0; e < n - 1; ++e)
    for (int j = 1; n * j <= order; ++j) s = series_mul(s, series_geometric(n * j, order), order);
  return s;
}

struct EnumerationStats {
  long long visited = 0;
  long long paths = 0;
};

// Vertex paths mu_1, mu_2, ... in sector i with sum_j j H_v(mu_j, mu_{j+1}) <= order.
inline Series chi_vertex_paths(int n, int sector, int order, EnumerationStats* stats = nullptr,
                               long long max_visits = 10000000) {
  Series count(order + 1, 0);
  EnumerationStats st;
  auto tail = [&](long long j) { return mod_n(sector + 1 - j, n); };
  // prefix ends at position j with mu_j = last; the pair (j, j+1) has weight j.
  std::function<void(long long, int, long long)> dfs = [&](long long j, int last, long long e) {
    if (++st.visited > max_visits) throw Error(ErrorKind::Explosion, "vertex path enumeration");
    long long close = e + j * h_v(last, tail(j + 1), n);
    if (last != tail(j) && close <= order) {
      count[close] += 1;
      ++st.paths;
    }
    if (e + (j + 1) > order) return;
    for (int m = 0; m < n; ++m) {
      long long ne = e + j * h_v(last, m, n);
      if (ne + (j + 1) <= order) dfs(j + 1, m, ne);
    }
  };
  count[0] += 1;  // ground state
  ++st.paths;
  for (int m = 0; m < n; ++m) dfs(1, m, 0);
  if (stats) *stats = st;
  return count;
}

// Face paths from a_0 = a with tail a_j = xi + omega_{i+1-j}. Entry N counts paths with
// sum_j j H_v(mu_{j-1}, mu_j) = N + e_min, where a_j = a_{j+1} + epsbar_{mu_j}.
struct FaceCharacter {
  Series coefficients;
  long long e_min = 0;
  EnumerationStats stats;
};

inline FaceCharacter chi_face_bruteforce(const WeightState& a, const WeightState& xi, int sector, int order,
                                         long long max_visits = 10000000) {
  const int n = a.n();
  FacePath ground{{}, xi, sector};
  auto tail_mu = [&](long long j) { return mod_n(sector - j, n); };
  // Minimal closing depth is bounded by the energy: the seam pair costs at least its index.
  std::map<long long, long long> raw;
  EnumerationStats st;
  long long bound = order;
  std::function<void(long long, const WeightState&, int, long long)> dfs = [&](long long j, const WeightState& aj,
                                                                              int prev, long long e) {
    if (++st.visited > max_visits) throw Error(ErrorKind::Explosion, "face path enumeration exceeded budget");
    // close here: a_j matches the ground state and mu_j, mu_{j+1}, ... follow the tail
    if (aj == ground.ground(j) && (j == 0 || prev != tail_mu(j - 1))) {
      long long close = j == 0 ? e : e + j * h_v(prev, tail_mu(j), n);
      if (close <= bound) {
        raw[close] += 1;
        ++st.paths;
      }
    }
    if (j >= 1 && e + (j + 1) > bound) return;
    for (int m = 0; m < n; ++m) {
      long long ne = j == 0 ? e : e + j * h_v(prev, m, n);
      if (ne > bound) continue;
      dfs(j + 1, aj.plus_epsbar(m, -1), m, ne);
    }
  };
  // Grow the energy window until a path is found, then cover e_min + order.
  for (;;) {
    raw.clear();
    st = {};
    dfs(0, a, -1, 0);
    if (!raw.empty()) {
      long long emin = raw.begin()->first;
      if (bound >= emin + order) break;
      bound = emin + order;
      continue;
    }
    bound = 2 * bound + 1;
    if (bound > 100000) throw Error(ErrorKind::Explosion, "no face path found");
  }
  FaceCharacter fc;
  fc.e_min = raw.begin()->first;
  fc.coefficients.assign(order + 1, 0);
  for (auto& [e, c] : raw)
    if (e - fc.e_min <= order) fc.coefficients[e - fc.e_min] = c;
  fc.stats = st;
  return fc;
}

struct BetaRoots {
  Real beta1;
  Real beta2;
  Real beta0;
};

inline BetaRoots beta_roots(const ModelParams& p) {
  BetaRoots b;
  b.beta0 = 1 / sqrt(p.r * (p.r - 1));
  b.beta1 = -sqrt((p.r - 1) / p.r);
  b.beta2 = sqrt(p.r / (p.r - 1));
  return b;
}

// Dynkin labels (k^0, ..., k^{n-1}) to epsbar coordinates of the finite part.
inline std::vector<Real> labels_to_coords(const std::vector<Real>& lab) {
  const int n = static_cast<int>(lab.size());
  std::vector<Real> c(n, Real(0));
  for (int nu = 0; nu < n; ++nu)
    for (int mu = nu + 1; mu < n; ++mu) c[nu] += lab[mu];
  return c;
}

inline std::vector<Real> state_labels(const WeightState& a, const Real& level) {
  const int n = a.n();
  std::vector<Real> lab(n, Real(0));
  Real s = 0;
  for (int mu = 1; mu < n; ++mu) {
    lab[mu] = Real(a.amn(mu - 1, mu));
    s += lab[mu];
  }
  lab[0] = level - s;
  return lab;
}

inline std::vector<Real> state_coords(const WeightState& a) {
  std::vector<Real> c(a.n());
  for (int nu = 0; nu < a.n(); ++nu) c[nu] = Real(a.shifted(nu));
  return c;
}

// G_a = prod_{mu<nu} [a_{mu nu}] from the coordinates of a + rho.
inline Complex g_a_coords(const std::vector<Real>& k, const ModelParams& p) {
  Complex g(1);
  for (size_t mu = 0; mu < k.size(); ++mu)
    for (size_t nu = mu + 1; nu < k.size(); ++nu) g *= bracket_r(Complex(k[mu] - k[nu]), p);
  return g;
}

inline Complex g_a(const WeightState& a, const ModelParams& p) { return g_a_coords(state_coords(a), p); }

// G'_xi = prod_{mu<nu} [xi_{mu nu}]'
inline Complex g_xi_prime_coords(const std::vector<Real>& l, const ModelParams& p) {
  Complex g(1);
  for (size_t mu = 0; mu < l.size(); ++mu)
    for (size_t nu = mu + 1; nu < l.size(); ++nu) g *= bracket_rm1(Complex(l[mu] - l[nu]), p);
  return g;
}

inline Complex g_xi_prime(const WeightState& xi, const ModelParams& p) { return g_xi_prime_coords(state_coords(xi), p); }

inline Complex qpoch_x(const Real& e_z, const Real& e_q, const ModelParams& p) {
  return qpoch(Complex(p.xpow(e_z)), Complex(p.xpow(e_q)), p.prec);
}

// ((x^{2r};x^{2r}) / (x^{2r-2};x^{2r-2}))^{(n-1)(n-2)/2}
inline Complex b_ratio(const ModelParams& p) {
  Complex ratio = qpoch_x(2 * p.r, 2 * p.r, p) / qpoch_x(2 * p.r - 2, 2 * p.r - 2, p);
  Complex out(1);
  for (int e = 0; e < (p.n - 1) * (p.n - 2) / 2; ++e) out *= ratio;
  return out;
}

inline Complex b_l_coords(const std::vector<Real>& l, const ModelParams& p) {
  return b_ratio(p) * g_xi_prime_coords(l, p);
}

inline Complex b_l(const WeightState& xi, const ModelParams& p) { return b_l_coords(state_coords(xi), p); }

// (x^{2n};x^{2n}) / (x^2;x^2)
inline Complex chi_vertex_value(const ModelParams& p) {
  return qpoch_x(Real(2 * p.n), Real(2 * p.n), p) / qpoch_x(Real(2), Real(2), p);
}

// n |beta_1 k + beta_2 l|^2
inline Real gaussian_exponent(const std::vector<Real>& k, const std::vector<Real>& l, const ModelParams& p) {
  BetaRoots b = beta_roots(p);
  std::vector<Real> w(k.size());
  for (size_t i = 0; i < k.size(); ++i) w[i] = b.beta1 * k[i] + b.beta2 * l[i];
  return p.n * inner_real(w, w);
}

// All m in [-R, R]^{dim}, ordered by shell max|m_j| then lexicographically.
struct LatticeOffset {
  std::vector<int> m;
  int shell = 0;
};

inline std::vector<LatticeOffset> lattice_offsets(int dim, int radius) {
  std::vector<LatticeOffset> out;
  std::vector<int> m(dim, -radius);
  if (dim == 0) return {LatticeOffset{{}, 0}};
  for (;;) {
    int shell = 0;
    for (int v : m) shell = std::max(shell, std::abs(v));
    out.push_back({m, shell});
    int d = 0;
    while (d < dim && m[d] == radius) m[d++] = -radius;
    if (d == dim) break;
    ++m[d];
  }
  std::stable_sort(out.begin(), out.end(), [](const LatticeOffset& a, const LatticeOffset& b) { return a.shell < b.shell; });
  return out;
}

// k = base + sum_j m_j alpha_j in epsbar coordinates.
inline std::vector<Real> add_roots(std::vector<Real> base, const std::vector<int>& m) {
  for (size_t j = 1; j < base.size(); ++j) {
    base[j - 1] += m[j - 1];
    base[j] -= m[j - 1];
  }
  return base;
}

// Same in Dynkin labels: alpha_j = 2 Lambda_j - Lambda_{j-1} - Lambda_{j+1} (affine, indices mod n).
inline std::vector<Real> add_roots_labels(std::vector<Real> lab, const std::vector<int>& m) {
  const int n = static_cast<int>(lab.size());
  for (int j = 1; j < n; ++j) {
    int t = m[j - 1];
    if (n == 2) {
      lab[1] += 2 * t;
      lab[0] -= 2 * t;
      continue;
    }
    lab[j] += 2 * t;
    lab[(j - 1) % n] -= t;
    lab[(j + 1) % n] -= t;
  }
  return lab;
}

struct ShellSum {
  Complex total;
  Real outer_shell;  // |sum over the outermost shell|
  Real tail_ratio;   // outer_shell / |total|
  int radius = 0;
  size_t terms = 0;
};

// sum over k in the truncated lattice, accumulated shell by shell in a fixed order.
inline ShellSum shell_sum(int dim, int radius, const std::function<Complex(const std::vector<int>&)>& term) {
  auto offs = lattice_offsets(dim, radius);
  auto vals = parallel_map<Complex>(offs.size(), [&](size_t i) { return term(offs[i].m); });
  ShellSum s;
  s.total = Complex(0);
  Complex outer(0);
  for (size_t i = 0; i < offs.size(); ++i) {
    s.total += vals[i];
    if (offs[i].shell == radius) outer += vals[i];
  }
  s.outer_shell = abs(outer);
  s.tail_ratio = abs(s.total) > 0 ? Real(s.outer_shell / abs(s.total)) : s.outer_shell;
  s.radius = radius;
  s.terms = offs.size();
  return s;
}

struct SumFormulaResult {
  Complex lhs;
  Complex rhs;
  Real residual;
  Real tail_estimate;
  int radius = 0;
};

// sum_{k = l + omega_i mod Q} chi_{l,k} against chi^{(i)} b_l.
inline SumFormulaResult sum_formula_residual(const WeightState& xi, int sector, const ModelParams& p, int radius) {
  const int n = p.n;
  std::vector<Real> l = state_coords(xi);
  std::vector<Real> base = l;
  for (int nu = 0; nu < mod_n(sector, n); ++nu) base[nu] += 1;
  Complex norm = qpoch_x(Real(2 * n), Real(2 * n), p);
  Complex denom(1);
  for (int e = 0; e < n - 1; ++e) denom *= norm;
  ShellSum s = shell_sum(n - 1, radius, [&](const std::vector<int>& m) {
    std::vector<Real> k = add_roots(base, m);
    return Complex(p.xpow(gaussian_exponent(k, l, p))) * g_a_coords(k, p);
  });
  SumFormulaResult out;
  out.lhs = s.total / denom;
  out.rhs = chi_vertex_value(p) * b_l_coords(l, p);
  out.residual = rel_diff(out.lhs, out.rhs);
  out.tail_estimate = s.tail_ratio;
  out.radius = radius;
  if (out.tail_estimate > p.prec.pole())
    throw Error(ErrorKind::TailTooLarge, "outermost shell contributes " + to_string(out.tail_estimate, 4));
  return out;
}

}  // namespace zn
