#pragma once

#include "numeric.hpp"

#include <vector>

namespace zn {

// Dense complex square matrix, row-major.
struct CMatrix {
  int n = 0;
  std::vector<Complex> a;

  CMatrix() = default;
  explicit CMatrix(int n_) : n(n_), a(static_cast<size_t>(n_) * n_, Complex(0)) {}
  static CMatrix identity(int n) {
    CMatrix m(n);
    for (int i = 0; i < n; ++i) m(i, i) = Complex(1);
    return m;
  }

  Complex& operator()(int i, int j) { return a[static_cast<size_t>(i) * n + j]; }
  const Complex& operator()(int i, int j) const { return a[static_cast<size_t>(i) * n + j]; }

  Real norm1() const {
    Real best = 0;
    for (int j = 0; j < n; ++j) {
      Real s = 0;
      for (int i = 0; i < n; ++i) s += abs((*this)(i, j));
      best = rmax(best, s);
    }
    return best;
  }
};

inline CMatrix operator*(const CMatrix& x, const CMatrix& y) {
  CMatrix z(x.n);
  for (int i = 0; i < x.n; ++i)
    for (int k = 0; k < x.n; ++k)
      for (int j = 0; j < x.n; ++j) z(i, j) += x(i, k) * y(k, j);
  return z;
}

// Gauss-Jordan inverse with partial pivoting. Throws SingularMatrix when the
// 1-norm condition number exceeds max_cond.
inline CMatrix inverse(const CMatrix& m, const Real& max_cond) {
  const int n = m.n;
  CMatrix w = m, inv = CMatrix::identity(n);
  for (int col = 0; col < n; ++col) {
    int piv = col;
    Real best = abs(w(col, col));
    for (int r = col + 1; r < n; ++r) {
      Real v = abs(w(r, col));
      if (v > best) {
        best = v;
        piv = r;
      }
    }
    if (best == 0) throw Error(ErrorKind::SingularMatrix, "exactly singular matrix");
    if (piv != col)
      for (int j = 0; j < n; ++j) {
        std::swap(w(col, j), w(piv, j));
        std::swap(inv(col, j), inv(piv, j));
      }
    Complex d = Complex(1) / w(col, col);
    for (int j = 0; j < n; ++j) {
      w(col, j) *= d;
      inv(col, j) *= d;
    }
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      Complex f = w(r, col);
      if (f == Complex(0)) continue;
      for (int j = 0; j < n; ++j) {
        w(r, j) -= f * w(col, j);
        inv(r, j) -= f * inv(col, j);
      }
    }
  }
  Real cond = m.norm1() * inv.norm1();
  if (cond > max_cond) throw Error(ErrorKind::SingularMatrix, "condition number " + to_string(cond, 6));
  return inv;
}

}  // namespace zn
