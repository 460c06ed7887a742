#pragma once

#include <map>
#include <set>
#include <string>
#include <vector>

#include "flatcalc/expr.hpp"
#include "flatcalc/jetspace.hpp"

namespace flatcalc {

/// Vector field sum_i c_i D_i + sum_s p_s d/ds, where the D_i are the total
/// derivatives of a scheme. The schematic part keeps fields with infinitely
/// many components finite.
class Derivation {
 public:
  Derivation() = default;
  static Derivation total(int i, Expr coeff = Expr(1));
  static Derivation partial(Symbol s, Expr coeff = Expr(1));

  const std::map<int, Expr>& schematic() const { return schematic_; }
  const std::map<Symbol, Expr>& partials() const { return partial_; }
  Expr schematic_coeff(int i) const;
  Expr partial_coeff(Symbol s) const;

  Derivation& add_total(int i, const Expr& c);
  Derivation& add_partial(Symbol s, const Expr& c);
  Derivation& operator+=(const Derivation& o);
  Derivation& operator-=(const Derivation& o);
  friend Derivation operator+(Derivation a, const Derivation& b) { return a += b; }
  friend Derivation operator-(Derivation a, const Derivation& b) { return a -= b; }
  Derivation operator-() const;
  /// Multiplies every coefficient by f.
  Derivation scaled(const Expr& f) const;
  /// Applies `fn` to every coefficient, dropping zeros.
  template <class Fn>
  Derivation mapped(Fn&& fn) const {
    Derivation out;
    for (const auto& [i, c] : schematic_) out.add_total(i, fn(c));
    for (const auto& [s, c] : partial_) out.add_partial(s, fn(c));
    return out;
  }

  bool is_zero() const { return schematic_.empty() && partial_.empty(); }
  bool is_vertical() const { return schematic_.empty(); }

  Expr apply(const DerivScheme& scheme, const Expr& f) const;

  std::string render() const;
  friend bool operator==(const Derivation&, const Derivation&) = default;

 private:
  std::map<int, Expr> schematic_;
  std::map<Symbol, Expr> partial_;
};

/// Lie bracket [X, Y]. The scheme's total derivatives pairwise commute; the
/// commutators [d/ds, D_i] come from the scheme and may throw std::domain_error.
Derivation bracket(const DerivScheme& scheme, const Derivation& x, const Derivation& y);

/// Basis element d xi_{k1} ^ ... ^ d xi_{kq} of the coordinate coframe,
/// stored as a sorted symbol list.
using FormKey = std::vector<Symbol>;

/// Sorts a coframe index list; returns 0 for repeated symbols, else the
/// permutation sign.
int normalize_key(FormKey& key);

/// Vector-valued form sum_K d xi_K (x) X_K over a fixed coframe of closed
/// coordinate differentials.
class VForm {
 public:
  VForm() = default;
  VForm(int degree, std::set<Symbol> coframe) : degree_(degree), coframe_(std::move(coframe)) {}

  int degree() const { return degree_; }
  const std::set<Symbol>& coframe() const { return coframe_; }
  const std::map<FormKey, Derivation>& terms() const { return terms_; }

  /// Adds d xi_{key} (x) x with arbitrary key order.
  void add(FormKey key, const Derivation& x);
  VForm& operator+=(const VForm& o);
  VForm& operator-=(const VForm& o);
  VForm scaled(const Expr& f) const;
  template <class Fn>
  VForm mapped(Fn&& fn) const {
    VForm out(degree_, coframe_);
    for (const auto& [k, d] : terms_) out.add(k, d.mapped(fn));
    return out;
  }

  bool is_zero() const { return terms_.empty(); }
  Derivation component(const FormKey& key) const;

  /// Every nonzero coefficient, one per (basis form, field direction), in a
  /// deterministic order.
  std::vector<Expr> coefficients() const;
  std::string render() const;

  friend bool operator==(const VForm&, const VForm&) = default;

 private:
  int degree_ = 0;
  std::set<Symbol> coframe_;
  std::map<FormKey, Derivation> terms_;
};

/// Exterior differential of a function over the coframe. Throws
/// std::invalid_argument if f depends on a non-coframe, non-parameter symbol.
std::map<Symbol, Expr> coframe_differential(const std::set<Symbol>& coframe, const Expr& f);

/// Froelicher-Nijenhuis bracket, extended bilinearly from decomposables.
VForm nijenhuis(const DerivScheme& scheme, const VForm& a, const VForm& b);

/// Connection over the trivial bundle R^n x R^m: coefficients v_i^alpha as
/// polynomials in x and v.
struct ConnectionSpec {
  int n = 0;
  int m = 0;
  /// coeffs[i-1][alpha-1] = v_i^alpha
  std::vector<std::vector<Expr>> coeffs;

  const Expr& coeff(int i, int alpha) const {
    return coeffs[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(alpha - 1)];
  }
  /// Throws std::invalid_argument on shape mismatch or foreign symbols.
  void validate() const;
  /// nabla_{x_i} = d/dx_i + sum_alpha v_i^alpha d/dv^alpha
  Derivation lift(int i) const;
  std::set<Symbol> coframe() const;
};

struct ConnectionForms {
  VForm horizontal;  // sum dx_i (x) nabla_{x_i}
  VForm vertical;    // sum (dv^a - v_i^a dx_i) (x) d/dv^a
  SchemePtr scheme;  // plain coordinate scheme over x_1..x_n
};

ConnectionForms connection_forms(const ConnectionSpec& spec);

/// d_nabla on vertical-valued horizontal forms: sum_i dx_i ^
/// (nabla_i theta^a - sum_b dv_i^a/dv^b theta^b) (x) d/dv^a.
/// Rejects non-flat connections and forms with non-vertical values.
VForm d_nabla_vertical(const ConnectionSpec& spec, const VForm& theta);

}  // namespace flatcalc
