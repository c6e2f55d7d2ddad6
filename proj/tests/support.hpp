#pragma once

#include <gtest/gtest.h>

#include "zn/checks.hpp"

#include <complex>
#include <random>

namespace zn::test {

// 40 working digits plus guard for every test.
class Precise : public ::testing::Test {
 protected:
  Precision prec{40, 10};
  PrecisionScope scope{prec};

  ModelParams params(int n, const char* r, const char* x) const { return ModelParams(n, Real(r), Real(x), prec); }
};

inline std::complex<long double> ld(const Complex& z) {
  return {static_cast<long double>(real(z)), static_cast<long double>(imag(z))};
}

inline long double ld(const Real& v) { return static_cast<long double>(v); }

}  // namespace zn::test
