#pragma once

#include <random>
#include <vector>

#include "flatcalc/expr.hpp"

namespace testsupport {

using flatcalc::Expr;
using flatcalc::Rational;
using flatcalc::Symbol;

/// Deterministic generator of small random polynomials.
class RandomPoly {
 public:
  explicit RandomPoly(unsigned seed) : rng_(seed) {}

  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng_); }

  Rational rational() {
    int num = integer(-5, 5);
    int den = integer(1, 3);
    Rational r(num, den);
    r.canonicalize();
    return r;
  }

  Symbol pick(const std::vector<Symbol>& syms) {
    return syms[static_cast<std::size_t>(integer(0, static_cast<int>(syms.size()) - 1))];
  }

  /// Sum of up to `terms` monomials of degree <= max_degree in `syms`.
  Expr poly(const std::vector<Symbol>& syms, unsigned max_degree, int terms = 4) {
    Expr out;
    int count = integer(1, terms);
    for (int t = 0; t < count; ++t) {
      Expr mono(rational());
      int deg = integer(0, static_cast<int>(max_degree));
      for (int d = 0; d < deg; ++d) mono *= Expr(pick(syms));
      out += mono;
    }
    return out;
  }

  /// Like poly() but never zero.
  Expr nonzero_poly(const std::vector<Symbol>& syms, unsigned max_degree, int terms = 4) {
    for (;;) {
      Expr e = poly(syms, max_degree, terms);
      if (!e.is_zero()) return e;
    }
  }

  std::mt19937& engine() { return rng_; }

 private:
  std::mt19937 rng_;
};

}  // namespace testsupport
