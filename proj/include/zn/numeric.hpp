#pragma once

#include <boost/multiprecision/complex_adaptor.hpp>
#include <boost/multiprecision/mpfr.hpp>

#include <cmath>
#include <stdexcept>
#include <string>
#include <utility>

namespace zn {

namespace mp = boost::multiprecision;

using Real = mp::number<mp::mpfr_float_backend<0>, mp::et_off>;
using Complex = mp::number<mp::complex_adaptor<mp::mpfr_float_backend<0>>, mp::et_off>;

// Typed failures. The CLI maps every kind to exit code 3.
enum class ErrorKind {
  NonConvergent,
  Domain,
  Pole,
  SingularMatrix,
  NotAdmissible,
  DivergentEnergy,
  Explosion,
  DegenerateFit,
  TailTooLarge,
  CancellationFailure,
  EndpointMismatch,
  PoleOnContour,
};

inline const char* kind_name(ErrorKind k) {
  switch (k) {
    case ErrorKind::NonConvergent: return "NonConvergent";
    case ErrorKind::Domain: return "DomainError";
    case ErrorKind::Pole: return "PoleError";
    case ErrorKind::SingularMatrix: return "SingularMatrix";
    case ErrorKind::NotAdmissible: return "NotAdmissible";
    case ErrorKind::DivergentEnergy: return "DivergentEnergy";
    case ErrorKind::Explosion: return "Explosion";
    case ErrorKind::DegenerateFit: return "DegenerateFit";
    case ErrorKind::TailTooLarge: return "TailTooLarge";
    case ErrorKind::CancellationFailure: return "CancellationFailure";
    case ErrorKind::EndpointMismatch: return "EndpointMismatch";
    case ErrorKind::PoleOnContour: return "PoleOnContour";
  }
  return "Error";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(kind_name(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

 private:
  ErrorKind kind_;
};

struct Precision {
  int digits = 40;
  int guard = 10;

  int working() const { return digits + guard; }
  // Truncation threshold for products and sums.
  Real tail() const { return pow(Real(10), -working()); }
  // Pole / singularity threshold.
  Real pole() const { return pow(Real(10), -(digits / 2)); }
};

// Sets the MPFR default precision for the current thread, restores on exit.
class PrecisionScope {
 public:
  explicit PrecisionScope(const Precision& p) : PrecisionScope(p.working()) {}
  explicit PrecisionScope(int decimal_digits) : saved_(Real::default_precision()) {
    Real::default_precision(decimal_digits);
  }
  ~PrecisionScope() {
    Real::default_precision(saved_);
  }
  PrecisionScope(const PrecisionScope&) = delete;
  PrecisionScope& operator=(const PrecisionScope&) = delete;

 private:
  unsigned saved_;
};

inline Real pi_real() {
  Real p;
  mpfr_const_pi(p.backend().data(), MPFR_RNDN);
  return p;
}

inline Complex cplx(const Real& re, const Real& im = Real(0)) { return Complex(re, im); }

inline Complex imag_unit() { return Complex(Real(0), Real(1)); }

// e^{2 pi i t}
inline Complex expi2pi(const Real& t) {
  Real a = 2 * pi_real() * t;
  return Complex(cos(a), sin(a));
}

inline Real rmax(const Real& a, const Real& b) { return a < b ? b : a; }
inline Real rmin(const Real& a, const Real& b) { return a < b ? a : b; }

inline Real absv(const Complex& z) { return abs(z); }
inline Real absv(const Real& z) { return abs(z); }

inline std::string to_string(const Real& v, int digits) {
  return v.str(digits, std::ios_base::scientific);
}

inline std::string to_string(const Complex& z, int digits) {
  return to_string(real(z), digits) + (imag(z) < 0 ? "" : "+") + to_string(imag(z), digits) + "i";
}

// Residual helpers: |a-b| relative to max(|a|,|b|,floor).
template <class T>
Real rel_diff(const T& a, const T& b, const Real& floor = Real(1e-300)) {
  Real s = rmax(rmax(absv(a), absv(b)), floor);
  return absv(a - b) / s;
}

}  // namespace zn
