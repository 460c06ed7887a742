#pragma once

#include <gmpxx.h>

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "flatcalc/symbol.hpp"

namespace flatcalc {

using Rational = mpq_class;

/// Product of symbol powers, factors sorted by the symbol order, exponents >= 1.
class Monomial {
 public:
  using Factor = std::pair<Symbol, unsigned>;

  Monomial() = default;
  explicit Monomial(Symbol s, unsigned e = 1);
  /// Builds from arbitrary factors; merges duplicates and drops zero exponents.
  static Monomial from_factors(std::vector<Factor> factors);

  const std::vector<Factor>& factors() const { return factors_; }
  bool empty() const { return factors_.empty(); }
  unsigned degree() const;
  unsigned degree_in(Symbol s) const;

  Monomial operator*(const Monomial& o) const;
  /// Removes one power of `s`; returns the exponent before removal (0 if absent).
  std::pair<unsigned, Monomial> drop_one(Symbol s) const;
  /// Removes all powers of `s`.
  Monomial without(Symbol s) const;

  std::string render() const;

  friend bool operator==(const Monomial&, const Monomial&) = default;

 private:
  std::vector<Factor> factors_;
};

/// Canonical monomial order: total degree first, then lexicographic on the
/// factor lists (smaller symbol first, higher exponent first on ties).
struct MonomialLess {
  bool operator()(const Monomial& a, const Monomial& b) const;
};

class Expr;
using Bindings = std::map<Symbol, Expr>;

/// Exact sparse multivariate polynomial over the rationals.
class Expr {
 public:
  using Term = std::pair<Monomial, Rational>;

  Expr() = default;
  Expr(long v);  // NOLINT(google-explicit-constructor)
  Expr(int v) : Expr(static_cast<long>(v)) {}  // NOLINT
  Expr(const Rational& v);  // NOLINT
  Expr(Symbol s);           // NOLINT
  Expr(const Monomial& m, const Rational& c);

  /// Builds a canonical expression from arbitrary (possibly duplicate) terms.
  static Expr from_terms(std::vector<Term> terms);

  const std::vector<Term>& terms() const { return terms_; }
  std::size_t size() const { return terms_.size(); }
  bool is_zero() const { return terms_.empty(); }
  bool is_constant() const;
  /// Constant term (coefficient of the empty monomial).
  Rational constant_term() const;
  unsigned degree() const;
  unsigned degree_in(Symbol s) const;
  std::set<Symbol> symbols() const;
  bool depends_on(Symbol s) const;

  Expr operator-() const;
  Expr& operator+=(const Expr& o);
  Expr& operator-=(const Expr& o);
  Expr& operator*=(const Expr& o);
  friend Expr operator+(Expr a, const Expr& b) { return a += b; }
  friend Expr operator-(Expr a, const Expr& b) { return a -= b; }
  friend Expr operator*(const Expr& a, const Expr& b);
  Expr scaled(const Rational& c) const;
  Expr pow(unsigned e) const;

  /// Coefficient of `m` (zero when absent).
  Rational coefficient(const Monomial& m) const;

  std::string render() const;

  friend bool operator==(const Expr&, const Expr&) = default;

 private:
  std::vector<Term> terms_;  // sorted by MonomialLess, no zero coefficients
};

/// Formal partial derivative with respect to `s`.
Expr partial(const Expr& f, Symbol s);

/// Simultaneous substitution of symbols by expressions.
Expr substitute(const Expr& f, const Bindings& bindings);

/// Coefficients of powers of `p`: f = sum_k p^k * coeff_k, ascending k,
/// only nonzero coefficients listed.
std::vector<std::pair<unsigned, Expr>> collect_param(const Expr& f, Symbol p);

/// Coefficient of p^k.
Expr param_coefficient(const Expr& f, Symbol p, unsigned k);

/// Evaluates at a point; symbols missing from `point` raise std::out_of_range.
Rational evaluate(const Expr& f, const std::map<Symbol, Rational>& point);

/// Raised for malformed raw input (negative or non-integer exponents, ...).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Unnormalized expression tree as produced by parsers or by hand.
struct RawExpr {
  enum class Op { Number, Sym, Add, Mul, Pow, Neg };
  Op op = Op::Number;
  Rational number;
  std::optional<Symbol> symbol;
  std::vector<std::shared_ptr<const RawExpr>> args;

  static std::shared_ptr<const RawExpr> num(const Rational& v);
  static std::shared_ptr<const RawExpr> sym(Symbol s);
  static std::shared_ptr<const RawExpr> add(std::vector<std::shared_ptr<const RawExpr>> a);
  static std::shared_ptr<const RawExpr> mul(std::vector<std::shared_ptr<const RawExpr>> a);
  static std::shared_ptr<const RawExpr> power(std::shared_ptr<const RawExpr> base,
                                              std::shared_ptr<const RawExpr> exponent);
  static std::shared_ptr<const RawExpr> neg(std::shared_ptr<const RawExpr> a);
};

/// Canonical form of a raw tree. Exponents must normalize to nonnegative
/// integer constants; anything else throws InputError.
Expr normalize(const RawExpr& raw);

}  // namespace flatcalc
