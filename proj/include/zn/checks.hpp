#pragma once

#include "correlation.hpp"
#include "parallel.hpp"
#include "vertexface.hpp"

#include <chrono>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace zn {

struct CheckConfig {
  int n = 2;
  std::string r = "4";
  std::string x = "0.3";
  int digits = 40;
  int guard = 10;
  unsigned long long seed = 7;
  int samples = 50;
  int sector = 0;
  int radius = 8;           // lattice sums
  int pipeline_radius = 6;  // lattice sums inside the contour pipeline
  int M = 256;              // quadrature points per circle (n = 3 uses at most 96)
  std::string delta0 = "0.01";
  std::string eps_rel = "0.2";
  std::string v = "0.25";  // spectral point of the correlation checks
  std::string l_labels;    // comma-separated labels of xi + rho; empty picks generic ones
  int threads = 1;
  bool correlation_limits = true;  // residue limit, S-limit and pipeline (n <= 3)
};

inline ModelParams make_params(const CheckConfig& c) {
  return ModelParams(c.n, Real(c.r.c_str()), Real(c.x.c_str()), Precision{c.digits, c.guard});
}

struct CheckResult {
  std::string group;
  std::string name;
  std::string anchor;  // the identity being tested, in words
  Real residual = 0;
  Real tolerance = 0;
  bool passed = false;
  bool informational = false;  // reported, never counted as a failure
  bool error = false;          // a typed numeric error aborted the check
  double seconds = 0;
  std::vector<Real> values;  // per-draw residuals
  std::string detail;
};

inline Real tol_digits(const ModelParams& p, int loss) { return pow(Real(10), -(p.prec.digits - loss)); }

inline Real max_of(const std::vector<Real>& v) {
  Real m = 0;
  for (const auto& t : v) m = rmax(m, t);
  return m;
}

// Runs body, fills timing, pass flag and the error text of a typed failure.
inline CheckResult run_check(const std::string& group, const std::string& name, const std::string& anchor,
                             const Real& tolerance, const std::function<void(CheckResult&)>& body) {
  CheckResult r;
  r.group = group;
  r.name = name;
  r.anchor = anchor;
  r.tolerance = tolerance;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(r);
    if (!r.values.empty() && r.residual == 0) r.residual = max_of(r.values);
    r.passed = r.residual < r.tolerance;
  } catch (const Error& e) {
    r.error = true;
    r.passed = false;
    r.detail = e.what();
  }
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Seeded draws. Every check owns a stream derived from the run seed and its name.
class Draws {
 public:
  Draws(unsigned long long seed, const std::string& name) : rng_(seed ^ std::hash<std::string>{}(name)) {}
  double uniform(double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng_); }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng_); }
  // spectral parameter in the principal strip with a small imaginary part
  Complex spectral() { return Complex(Real(uniform(0.05, 0.95)), Real(uniform(-0.3, 0.3))); }
  // Generic on every state within `reach` steps when that is possible at this r, else with a smaller reach.
  WeightState state(int n, const Real& r, int reach) {
    for (int k = reach; k > 0; --k) {
      try {
        return random_generic_state(rng_, n, static_cast<double>(r), 6, k);
      } catch (const Error&) {
      }
    }
    return random_generic_state(rng_, n, static_cast<double>(r), 6, 0);
  }
  std::mt19937_64& rng() { return rng_; }

 private:
  std::mt19937_64 rng_;
};

inline Real tensor_diff(const WeightTensor& a, const WeightTensor& b) {
  Real d = 0, s = rmax(a.max_abs(), b.max_abs());
  for (size_t t = 0; t < a.e.size(); ++t) d = rmax(d, abs(a.e[t] - b.e[t]));
  return s > 0 ? Real(d / s) : d;
}

// Non-integer labels of xi + rho summing to r - 1, kept away from resonances a_{nu j} in rZ
// for every integer shift up to 40 and from (r-1)Z for the label differences.
inline std::vector<Real> generic_l_labels(int n, const Real& r) {
  std::vector<Real> best;
  double best_d = -1;
  for (int trial = 0; trial < 64; ++trial) {
    double s = 0.137 + 0.0173 * trial;
    std::vector<double> w(n);
    double tot = 0;
    for (int mu = 0; mu < n; ++mu) {
      w[mu] = 1 + s * mu + 0.031 * mu * mu;
      tot += w[mu];
    }
    double rd = static_cast<double>(r);
    std::vector<Real> lab(n);
    double dmin = 1e9;
    Real rest = r - 1;
    for (int mu = 0; mu + 1 < n; ++mu) {
      lab[mu] = Real(w[mu] * (rd - 1) / tot);
      rest -= lab[mu];
    }
    lab[n - 1] = rest;
    std::vector<Real> c = labels_to_coords(lab);
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b) {
        double diff = static_cast<double>(c[a] - c[b]);
        for (int t = -40; t <= 40; ++t) dmin = std::min(dmin, distance_to_rz(diff + t, rd));
        dmin = std::min(dmin, distance_to_rz(diff, rd - 1));
      }
    if (dmin > best_d) {
      best_d = dmin;
      best = lab;
    }
    if (dmin > 0.2) break;
  }
  return best;
}

inline std::vector<Real> parse_labels(const std::string& key, const std::string& s) {
  std::vector<Real> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    size_t a = item.find_first_not_of(" \t"), b = item.find_last_not_of(" \t");
    item = a == std::string::npos ? "" : item.substr(a, b - a + 1);
    try {
      size_t pos = 0;
      std::stod(item, &pos);
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw Error(ErrorKind::Domain, "`" + key + "` has a malformed label '" + item + "'");
    }
    out.push_back(Real(item.c_str()));
  }
  return out;
}

// ---------------------------------------------------------------- special functions

inline std::vector<CheckResult> check_special_functions(const CheckConfig& cfg) {
  const std::string g = "special-functions";
  ModelParams p = make_params(cfg);
  std::vector<CheckResult> out;

  out.push_back(run_check(g, "theta-product-vs-series", "Theta_q triple product = bilateral series",
                          tol_digits(p, 2), [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            std::vector<std::pair<Complex, Complex>> in;
                            for (int s = 0; s < cfg.samples; ++s) {
                              Real rho(d.uniform(0.3, 2.0)), phi(d.uniform(-3.1, 3.1));
                              Real aq(d.uniform(0.05, 0.8)), psi(d.uniform(-3.1, 3.1));
                              in.push_back({Complex(rho * cos(phi), rho * sin(phi)), Complex(aq * cos(psi), aq * sin(psi))});
                            }
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              return rel_diff(theta_q(in[t].first, in[t].second, p.prec),
                                              theta_q_series(in[t].first, in[t].second, p.prec));
                            });
                          }));

  out.push_back(run_check(g, "bracket-odd-and-quasiperiodic", "[-v] = -[v] and [v+r] = -[v]", tol_digits(p, 4),
                          [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            std::vector<Complex> vs;
                            for (int s = 0; s < cfg.samples; ++s) vs.push_back(d.spectral() * Real(3));
                            res.values = parallel_map<Real>(vs.size(), [&](size_t t) {
                              Complex b = bracket_r(vs[t], p);
                              return rmax(rel_diff(bracket_r(-vs[t], p), Complex(-b)),
                                          rel_diff(bracket_r(vs[t] + p.r, p), Complex(-b)));
                            });
                          }));

  out.push_back(run_check(g, "theta-characteristic-shift", "theta[a;b](v+1) = e^{2 pi i a} theta[a;b](v)",
                          tol_digits(p, 4), [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            Complex tau = imag_unit() * pi_real() / (p.n * p.eps * p.r);
                            for (int s = 0; s < cfg.samples; ++s) {
                              Real a = Real(d.integer(0, 2 * p.n)) / (2 * p.n), b = Real(d.integer(0, 2 * p.n)) / (2 * p.n);
                              Complex v = d.spectral();
                              Complex lhs = riemann_theta_char(a, b, v + Real(1), tau, p.prec);
                              Complex rhs = expi2pi(a) * riemann_theta_char(a, b, v, tau, p.prec);
                              res.values.push_back(rel_diff(lhs, rhs));
                            }
                          }));

  out.push_back(run_check(g, "modular-bridge", "theta[1/2;-1/2](v/r; pi i/(eps r)) = sqrt(eps r/pi) e^{-eps r/4} [v]",
                          tol_digits(p, 4), [&](CheckResult& res) {
                            for (const char* rs : {"2", "5"})
                              for (const char* xs : {"0.1", "0.5"}) {
                                ModelParams q(p.n, Real(rs), Real(xs), p.prec);
                                Complex tau = imag_unit() * pi_real() / (q.eps * q.r);
                                for (int t = 1; t <= 9; ++t) {
                                  Complex v = Complex(Real(t) / 10);
                                  Complex lhs = riemann_theta_char(Real(1) / 2, Real(-1) / 2, v / q.r, tau, q.prec);
                                  Complex rhs = sqrt(q.eps * q.r / pi_real()) * exp(-q.eps * q.r / 4) * bracket_r(v, q);
                                  res.values.push_back(rel_diff(lhs, rhs));
                                }
                              }
                          }));

  out.push_back(run_check(g, "precision-escalation", "recomputing at digits+20 moves [v] and r_1(v) by < 10^-(digits-2)",
                          tol_digits(p, 2), [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            int samples = std::min(cfg.samples, 10);
                            for (int s = 0; s < samples; ++s) {
                              double re = d.uniform(0.05, 0.95), im = d.uniform(-0.3, 0.3);
                              Complex lo_b = bracket_r(Complex(Real(re), Real(im)), p);
                              Complex lo_r = r_l_func(Complex(Real(re), Real(im)), 1, p);
                              Complex hi_b, hi_r;
                              {
                                Precision hp{p.prec.digits + 20, p.prec.guard};
                                PrecisionScope scope(hp);
                                ModelParams q(p.n, Real(cfg.r.c_str()), Real(cfg.x.c_str()), hp);
                                hi_b = bracket_r(Complex(Real(re), Real(im)), q);
                                hi_r = r_l_func(Complex(Real(re), Real(im)), 1, q);
                              }
                              res.values.push_back(rmax(rel_diff(lo_b, hi_b), rel_diff(lo_r, hi_r)));
                            }
                          }));
  return out;
}

// ---------------------------------------------------------------- R-matrix and face weights

inline std::vector<CheckResult> check_ybe(const CheckConfig& cfg) {
  const std::string g = "ybe";
  ModelParams p = make_params(cfg);
  std::vector<CheckResult> out;

  out.push_back(run_check(g, "rbar-two-formulas", "character-sum R-bar = elementwise R-bar", tol_digits(p, 6),
                          [&](CheckResult& res) {
                            std::vector<Complex> vs = {Complex(Real("0.13")), Complex(Real("0.37"), Real("0.1")),
                                                       Complex(Real("0.71"))};
                            for (const auto& v : vs) res.values.push_back(tensor_diff(rbar_charsum(v, p), rbar_elementwise(v, p)));
                          }));

  out.push_back(run_check(g, "rbar-symmetry", "Z/nZ selection rule, shift invariance and R-bar(0) = P", tol_digits(p, 4),
                          [&](CheckResult& res) {
                            const int n = p.n;
                            WeightTensor R = rbar_charsum(Complex(Real("0.3")), p);
                            Real sel = 0, shift = 0, s = R.max_abs();
                            for (int i = 0; i < n; ++i)
                              for (int k = 0; k < n; ++k)
                                for (int j = 0; j < n; ++j)
                                  for (int l = 0; l < n; ++l) {
                                    if (mod_n(i + k - j - l, n) != 0) sel = rmax(sel, abs(R.at(i, k, j, l)));
                                    shift = rmax(shift, abs(R.at(i, k, j, l) -
                                                            R.at(mod_n(i + 1, n), mod_n(k + 1, n), mod_n(j + 1, n), mod_n(l + 1, n))));
                                  }
                            res.values = {sel / s, shift / s, tensor_diff(rbar_charsum(Complex(0), p), permutation_tensor(n))};
                          }));

  out.push_back(run_check(g, "vertex-ybe", "R12 R13 R23 = R23 R13 R12", tol_digits(p, 8), [&](CheckResult& res) {
    Draws d(cfg.seed, res.name);
    std::vector<std::pair<Complex, Complex>> in;
    for (int s = 0; s < cfg.samples; ++s) in.push_back({d.spectral(), d.spectral()});
    res.values = parallel_map<Real>(in.size(), [&](size_t t) { return ybe_vertex_residual(in[t].first, in[t].second, p); });
  }));

  out.push_back(run_check(g, "face-ybe", "star-triangle relation for the face weights", tol_digits(p, 8),
                          [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            std::vector<std::tuple<WeightState, Complex, Complex>> in;
                            for (int s = 0; s < cfg.samples; ++s) {
                              WeightState a = d.state(p.n, p.r, 2);
                              Complex v1 = d.spectral(), v2 = d.spectral();
                              in.emplace_back(a, v1, v2);
                            }
                            std::vector<int> skipped(in.size(), 0);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [a, v1, v2] = in[t];
                              return ybe_face_residual(a, v1, v2, p, &skipped[t]);
                            });
                            int total = 0;
                            for (int k : skipped) total += k;
                            res.detail = std::to_string(total) + " resonant hexagons skipped";
                          }));

  out.push_back(run_check(g, "face-initial-condition", "W(0) is the Kronecker delta on paths", tol_digits(p, 4),
                          [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            FaceWeightFn w0(Complex(0), p);
                            int samples = std::min(cfg.samples, 10);
                            for (int s = 0; s < samples; ++s) {
                              WeightState a = d.state(p.n, p.r, 2);
                              Real worst = 0;
                              for (int mu = 0; mu < p.n; ++mu)
                                for (int nu = 0; nu < p.n; ++nu)
                                  for (int mb = 0; mb < p.n; ++mb) {
                                    WeightState dd = a.plus_epsbar(mu), c = dd.plus_epsbar(nu), b = a.plus_epsbar(mb);
                                    if (step_index(b, c) < 0) continue;
                                    Complex want = b == dd ? Complex(1) : Complex(0);
                                    worst = rmax(worst, abs(w0(c, dd, b, a) - want));
                                  }
                              res.values.push_back(worst);
                            }
                          }));
  return out;
}

// ---------------------------------------------------------------- vertex-face correspondence

inline std::vector<CheckResult> check_vertex_face(const CheckConfig& cfg) {
  const std::string g = "vertex-face";
  ModelParams p = make_params(cfg);
  std::vector<CheckResult> out;
  auto draws = [&](const std::string& name) {
    Draws d(cfg.seed, name);
    std::vector<std::tuple<WeightState, Complex, Complex>> in;
    for (int s = 0; s < cfg.samples; ++s) {
      WeightState a = d.state(p.n, p.r, 2);
      Complex v1 = d.spectral(), v2 = d.spectral();
      in.emplace_back(a, v1, v2);
    }
    return in;
  };

  out.push_back(run_check(g, "rtt-wtt", "R(v1-v2) t(v1) t(v2) = sum_b W t(v1) t(v2)", tol_digits(p, 8),
                          [&](CheckResult& res) {
                            auto in = draws(res.name);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [a, v1, v2] = in[t];
                              return check_vf(v1, v2, a, p);
                            });
                          }));
  out.push_back(run_check(g, "dual-rtt-wtt", "t*(v1) t*(v2) R(v1-v2) = sum_d W t*(v1) t*(v2)", tol_digits(p, 8),
                          [&](CheckResult& res) {
                            auto in = draws(res.name);
                            std::vector<int> skipped(in.size(), 0);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [a, v1, v2] = in[t];
                              return check_dual_vf(v1, v2, a, p, &skipped[t]);
                            });
                            int total = 0;
                            for (int k : skipped) total += k;
                            res.detail = std::to_string(total) + " of " + std::to_string(in.size() * p.n * p.n) +
                                         " paths skipped (resonant state)";
                          }));
  out.push_back(run_check(g, "dual-orthogonality", "both biorthogonality relations of t and t*", tol_digits(p, 6),
                          [&](CheckResult& res) {
                            auto in = draws(res.name);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [a, v1, v2] = in[t];
                              return dual_orthogonality_residual(v1, a, p);
                            });
                          }));
  return out;
}

// ---------------------------------------------------------------- tail weights

inline std::vector<CheckResult> check_tail(const CheckConfig& cfg) {
  const std::string g = "tail";
  ModelParams p = make_params(cfg);
  std::vector<CheckResult> out;
  auto draws = [&](const std::string& name) {
    Draws d(cfg.seed, name);
    std::vector<std::tuple<WeightState, WeightState, Complex>> in;
    for (int s = 0; s < cfg.samples; ++s) {
      WeightState a = d.state(p.n, p.r, 0), ap = d.state(p.n, p.r, 0);
      in.emplace_back(ap, a, d.spectral());
    }
    return in;
  };

  out.push_back(run_check(g, "l-weight-closed-form", "L weight: sum over t* t = closed bracket product (parity twist for odd n)",
                          tol_digits(p, 6), [&](CheckResult& res) {
                            auto in = draws(res.name);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [ap, a, u] = in[t];
                              return l_weight_residual(ap, a, u, p, TailForm::ParityCorrected);
                            });
                          }));
  {
    CheckResult printed = run_check(g, "l-weight-untwisted-form", "L weight against the untwisted leading ratio",
                                    tol_digits(p, 6), [&](CheckResult& res) {
                                      auto in = draws(res.name);
                                      res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                                        auto& [ap, a, u] = in[t];
                                        return l_weight_residual(ap, a, u, p, TailForm::Printed);
                                      });
                                    });
    printed.informational = true;
    printed.detail = p.n % 2 ? "odd n: the untwisted ratio is expected to disagree" : "even n: identical to the twisted form";
    out.push_back(printed);
  }
  out.push_back(run_check(g, "l-weight-delta", "L[a a'; a a'' | u] = delta(a', a'')", tol_digits(p, 6),
                          [&](CheckResult& res) {
                            auto in = draws(res.name);
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              auto& [ap, a, u] = in[t];
                              Real worst = 0;
                              for (int mu = 0; mu < p.n; ++mu)
                                for (int nu = 0; nu < p.n; ++nu) {
                                  Complex s = l_weight_sum(a, a.plus_epsbar(nu, -1), a, a.plus_epsbar(mu, -1), u, p);
                                  worst = rmax(worst, abs(s - Complex(mu == nu ? 1 : 0)));
                                }
                              return worst;
                            });
                          }));
  out.push_back(run_check(g, "lambda-diagonal", "Lambda(u)^a_a = 1 as a finite product along one path", tol_digits(p, 6),
                          [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            int samples = std::min(cfg.samples, 10);
                            for (int s = 0; s < samples; ++s) {
                              std::vector<WeightState> path{d.state(p.n, p.r, 0)};
                              while (path.size() < 7) {
                                WeightState next = path.back().plus_epsbar(d.integer(0, p.n - 1), -1);
                                if (generic_state(next, static_cast<double>(p.r))) path.push_back(next);
                              }
                              Complex u = d.spectral();
                              res.values.push_back(abs(tail_product(path, path, u, p) - Complex(1)));
                            }
                          }));
  return out;
}

// ---------------------------------------------------------------- characters

// a = xi + omega_{i+1} + random root combination, so a has a path into the sector-i ground state.
inline WeightState random_sector_state(Draws& d, const WeightState& xi, int sector, int spread) {
  const int n = xi.n();
  FacePath ground{{}, xi, sector};
  WeightState a = ground.ground(0);
  for (int mu = 1; mu < n; ++mu) {
    int c = d.integer(-spread, spread);
    a.m[mu - 1] += c;
    a.m[mu] -= c;
  }
  return a;
}

inline int face_order(int n) { return n == 2 ? 10 : n == 3 ? 6 : 4; }

inline std::vector<CheckResult> check_characters(const CheckConfig& cfg) {
  const std::string g = "characters";
  ModelParams p = make_params(cfg);
  const int n = p.n;
  std::vector<CheckResult> out;

  out.push_back(run_check(g, "vertex-character", "(q^n;q^n)/(q;q) = bounded-multiplicity partitions = weighted paths, N <= 40",
                          Real(1) / 2, [&](CheckResult& res) {
                            const int order = 40;
                            Series prod = chi_vertex_product(n, order), brute = chi_vertex_bruteforce(n, order);
                            Series paths = chi_vertex_paths(n, cfg.sector, order);
                            long long worst = 0;
                            for (int N = 0; N <= order; ++N)
                              worst = std::max({worst, std::llabs(prod[N] - brute[N]), std::llabs(prod[N] - paths[N])});
                            res.residual = Real(worst);
                            res.values = {Real(worst)};
                            res.detail = "coefficients through q^40; max integer mismatch";
                          }));

  out.push_back(run_check(g, "face-character", "face path sums = 1/(q^n;q^n)^{n-1} after ground-state normalization",
                          Real(1) / 2, [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            const int order = face_order(n);
                            Series want = face_series_product(n, order);
                            int samples = std::min(cfg.samples, 6);
                            long long worst = 0;
                            for (int s = 0; s < samples; ++s) {
                              WeightState xi = d.state(n, p.r - 1, 0);
                              int sector = d.integer(0, n - 1);
                              WeightState a = random_sector_state(d, xi, sector, 2);
                              FaceCharacter fc = chi_face_bruteforce(a, xi, sector, order);
                              long long mis = 0;
                              for (int N = 0; N <= order; ++N) mis = std::max(mis, std::llabs(fc.coefficients[N] - want[N]));
                              res.values.push_back(Real(mis));
                              worst = std::max(worst, mis);
                            }
                            res.residual = Real(worst);
                            res.detail = "q^" + std::to_string(order) + " (x^" + std::to_string(2 * order) + "), " +
                                         std::to_string(samples) + " random (a, xi, i)";
                          }));

  out.push_back(run_check(g, "beta-roots", "beta1 beta2 = -1, beta1 + beta2 = beta0, beta1 < beta2", tol_digits(p, 2),
                          [&](CheckResult& res) {
                            BetaRoots b = beta_roots(p);
                            res.values = {abs(b.beta1 * b.beta2 + 1), abs(b.beta1 + b.beta2 - b.beta0),
                                          b.beta1 < b.beta2 ? Real(0) : Real(1)};
                          }));

  out.push_back(run_check(g, "sum-formula", "lattice sum of face characters = chi^(i) x ratio power x G'_xi", Real("1e-15"),
                          [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            WeightState xi = d.state(n, p.r - 1, 0);
                            SumFormulaResult sf = sum_formula_residual(xi, cfg.sector, p, cfg.radius);
                            res.values = {sf.residual};
                            res.detail = "xi " + xi.str() + ", radius " + std::to_string(sf.radius) + ", tail " +
                                         to_string(sf.tail_estimate, 3);
                          }));
  return out;
}

// ---------------------------------------------------------------- correlation

inline std::vector<CheckResult> check_correlation(const CheckConfig& cfg) {
  const std::string g = "correlation";
  ModelParams p = make_params(cfg);
  const int n = p.n;
  std::vector<CheckResult> out;

  out.push_back(run_check(g, "elliptic-sum-zero", "sum_nu prod_{j != nu} f(v_{j+1}-v_j, 1-pi_{nu j})/[pi_{nu j}] = 0",
                          tol_digits(p, 6), [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            std::vector<std::pair<std::vector<Complex>, std::vector<Real>>> in;
                            for (int s = 0; s < cfg.samples; ++s) {
                              std::vector<Complex> v;
                              std::vector<Real> pi;
                              for (int j = 0; j < n; ++j) v.push_back(d.spectral());
                              for (;;) {
                                pi.clear();
                                for (int j = 0; j < n; ++j) pi.push_back(Real(d.uniform(-3, 3)));
                                bool ok = true;
                                for (int a = 0; a < n; ++a)
                                  for (int b = a + 1; b < n; ++b)
                                    if (distance_to_rz(static_cast<double>(pi[a] - pi[b]), static_cast<double>(p.r)) < 0.25)
                                      ok = false;
                                if (ok) break;
                              }
                              in.push_back({v, pi});
                            }
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              return elliptic_sum_zero(in[t].first, in[t].second, p);
                            });
                          }));

  out.push_back(run_check(g, "omega-weighted-sum", "sum_j omega^j t*_j t^j = bracket-ratio product (parity twist for odd n)",
                          tol_digits(p, 6), [&](CheckResult& res) {
                            Draws d(cfg.seed, res.name);
                            std::vector<std::pair<WeightState, Complex>> in;
                            for (int s = 0; s < cfg.samples; ++s) {
                              WeightState a = d.state(n, p.r, 0);
                              in.push_back({a, d.spectral()});
                            }
                            res.values = parallel_map<Real>(in.size(), [&](size_t t) {
                              Real worst = 0;
                              for (int mu = 0; mu < n; ++mu)
                                for (int nu = 0; nu < n; ++nu)
                                  worst = rmax(worst, omega_weighted_sum(in[t].first, mu, nu, in[t].second, p).residual);
                              return worst;
                            });
                          }));

  out.push_back(run_check(g, "formula-small-x", "polarization formula -> omega^{i+1} at x = 1e-4", Real("1e-6"),
                          [&](CheckResult& res) {
                            ModelParams q(n, p.r, Real("1e-4"), p.prec);
                            Complex wi(1);
                            for (int t = 0; t < mod_n(cfg.sector + 1, n); ++t) wi *= q.omega;
                            res.values = {abs(polarization_formula(cfg.sector, q) - wi)};
                          }));

  {
    CheckResult bound = run_check(g, "formula-magnitude", "|polarization formula| <= 1", Real("1e-6"), [&](CheckResult& res) {
      Real mag = abs(polarization_formula(cfg.sector, p));
      res.values = {rmax(Real(0), mag - 1)};
      res.detail = "|formula| = " + to_string(mag, 20);
    });
    bound.informational = true;
    out.push_back(bound);
  }

  if (n > 3 || !cfg.correlation_limits) return out;
  std::vector<Real> lab = cfg.l_labels.empty() ? generic_l_labels(n, p.r) : parse_labels("correlation.l", cfg.l_labels);
  std::string lab_text;
  for (auto& t : lab) lab_text += (lab_text.empty() ? "" : ",") + to_string(t, 6);
  Complex v0 = Complex(Real(cfg.v.c_str()));

  out.push_back(run_check(g, "h-residue-limit",
                          "lim [v-u] H = (-1)^{n-1} [0]_omega prod_j x^j z sum_k B / ((x^{2n};x^{2n})^{n-1} b_l)",
                          Real(n == 2 ? "1e-10" : "1e-4"), [&](CheckResult& res) {
                            PipelineSettings s;
                            s.radius = cfg.pipeline_radius;
                            s.M = n == 2 ? cfg.M : std::min(cfg.M, 96);
                            s.eps_rel = Real(cfg.eps_rel.c_str());
                            if (n == 3) s.eps_rel = rmin(s.eps_rel, Real("0.15"));
                            SectorIntegrals si = sector_integrals(cfg.sector, lab, 0, v0, p, s);
                            Complex lim(0);
                            for (const auto& t : si.terms) {
                              Complex sum_nu(0);
                              for (size_t nu = 0; nu < t.J.size(); ++nu) sum_nu += bracket_omega(Complex(t.a0[nu]), p) * t.J[nu];
                              lim += t.gab * sum_nu;
                            }
                            lim /= si.b_l;
                            // closed side over the same k lattice
                            std::vector<Real> lr = labels_to_coords(lab);
                            Complex bsum(0);
                            for (const auto& off : lattice_offsets(n - 1, s.radius))
                              bsum += B_factor(lr, labels_to_coords(sector_k_labels(lab, cfg.sector, off.m)), v0, v0, p);
                            Complex q2n = poch_xx(Real(2 * n), Real(2 * n), p), norm(1);
                            for (int t = 0; t < n - 1; ++t) norm *= q2n;
                            Complex printed = bsum / (norm * si.b_l);
                            Complex conv = bracket_omega(Complex(0), p) * Real(n % 2 ? 1 : -1);
                            for (int j = 1; j < n; ++j) conv *= p.xpow(Real(j)) * si.abs_z;
                            res.values = {rel_diff(lim, conv * printed)};
                            res.detail = "l labels (" + lab_text + "), M " + std::to_string(s.M) + ", radius " +
                                         std::to_string(s.radius) + "; ratio to the bare B-sum form " +
                                         to_string(lim / printed, 12) + ", quadrature estimate " + to_string(si.quad_error, 3);
                          }));

  out.push_back(run_check(g, "s-limit", "[0]_omega/[v-u] sum B -> omega^{i+1} b_l x product ratios as u -> v",
                          Real(n == 2 ? "1e-10" : "1e-8"), [&](CheckResult& res) {
                            SLimitProbe pr = S_limit_probe(cfg.sector, lab, v0, p, cfg.radius);
                            res.values = {rel_diff(pr.lhs, pr.rhs)};
                            res.detail = "sum B at u = v " + to_string(pr.sum_at_v, 10) + " (relative " +
                                         to_string(pr.cancellation, 4) + "); the limit is finite only if this vanishes. lhs " +
                                         to_string(pr.lhs, 12) + ", rhs " + to_string(pr.rhs, 12);
                          }));

  out.push_back(run_check(g, "polarization-pipeline", "contour and lattice pipeline = closed polarization formula",
                          Real(n == 2 ? "1e-6" : "1e-4"), [&](CheckResult& res) {
                            PipelineSettings s;
                            s.radius = cfg.pipeline_radius;
                            s.M = n == 2 ? cfg.M : std::min(cfg.M, 96);
                            s.delta0 = Real(cfg.delta0.c_str());
                            s.eps_rel = Real(cfg.eps_rel.c_str());
                            if (n == 3) s.eps_rel = rmin(s.eps_rel, Real("0.15"));
                            PolarizationResult pr = polarization_pipeline(cfg.sector, lab, v0, p, s);
                            res.values = {rel_diff(pr.value, pr.formula)};
                            res.detail = "pipeline " + to_string(pr.value, 12) + ", formula " + to_string(pr.formula, 12) +
                                         ", delta scaling " + to_string(pr.delta_scaling, 6) +
                                         (pr.divergent ? " (raw values grow like 1/delta)" : "") + ", seam " +
                                         to_string(pr.seam, 3) + ", quadrature " + to_string(pr.quad_error, 3);
                          }));
  return out;
}

inline const std::vector<std::string>& check_groups() {
  static const std::vector<std::string> g = {"special-functions", "ybe", "vertex-face", "tail", "characters", "correlation"};
  return g;
}

inline std::vector<CheckResult> run_group(const std::string& group, const CheckConfig& cfg) {
  Precision pr{cfg.digits, cfg.guard};
  PrecisionScope scope(pr);
  set_thread_cap(cfg.threads);
  if (group == "special-functions") return check_special_functions(cfg);
  if (group == "ybe") return check_ybe(cfg);
  if (group == "vertex-face") return check_vertex_face(cfg);
  if (group == "tail") return check_tail(cfg);
  if (group == "characters") return check_characters(cfg);
  if (group == "correlation") return check_correlation(cfg);
  if (group == "all") {
    std::vector<CheckResult> all;
    for (const auto& name : check_groups()) {
      auto part = run_group(name, cfg);
      all.insert(all.end(), part.begin(), part.end());
    }
    return all;
  }
  throw Error(ErrorKind::Domain, "unknown check group " + group);
}

}  // namespace zn
