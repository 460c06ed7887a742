#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <vector>

#include "flatcalc/expr.hpp"
#include "flatcalc/report.hpp"

namespace flatcalc {

class DerivScheme;
using SchemePtr = std::shared_ptr<const DerivScheme>;

/// A total-derivative rule system: for each internal symbol s and direction
/// i, the image D_i(s). Directions are numbered from 1 and correspond to the
/// independent symbols x_1..x_n.
class DerivScheme {
 public:
  enum class Kind { Coordinate, FreeJet, Evolution, Extended };

  /// D_i = d/dx_i on a plain coordinate chart; every other symbol is constant
  /// along D_i.
  static SchemePtr coordinate(int n);
  /// Free jet space J^inf with n independents and m dependents: u^a_s -> u^a_{s i}.
  static SchemePtr free_jet(int n, int m);
  /// Evolution system u^a_t = F^a(x, t, u_k) with x = x1 (spatial) and t = x2.
  /// Internal coordinates are x1, x2 and u^a_k = Jet(a, {1,...,1}).
  static SchemePtr evolution(std::vector<Expr> rhs);
  /// `base` plus `fibers` extra coordinates y^1..y^fibers, constant along
  /// every D_i and never referenced by the base rules.
  static SchemePtr extended(SchemePtr base, int fibers);

  Kind kind() const { return kind_; }
  int directions() const { return n_; }
  int dependents() const { return m_; }
  int fibers() const { return fibers_; }
  bool has_jets() const { return m_ > 0; }
  const std::vector<Expr>& rhs() const;
  /// Underlying scheme of an extension; the scheme itself otherwise.
  const DerivScheme& root() const { return base_ ? base_->root() : *this; }

  /// D_i(s) for a single symbol; throws for symbols that are not internal
  /// coordinates (e.g. u_t on an evolution chart).
  Expr rule(Symbol s, int i) const;
  Expr total_derivative(int i, const Expr& f) const;
  /// D_sigma(f) = D_{sigma_1} ... D_{sigma_k}(f).
  Expr total_derivative(const MultiIndex& sigma, const Expr& f) const;

  /// Coefficients of the commutator [d/ds, D_i] = sum_r c_r d/dr. Throws
  /// std::domain_error when the commutator has infinitely many components.
  std::vector<std::pair<Symbol, Expr>> partial_commutator(Symbol s, int i) const;

  /// True when `s` is a jet coordinate of this scheme.
  bool is_jet(Symbol s) const;
  /// Throws std::invalid_argument unless every symbol of f is internal.
  void check_internal(const Expr& f) const;

 private:
  DerivScheme() = default;
  void check_direction(int i) const;
  Expr evolution_time_rule(int alpha, int k) const;

  Kind kind_ = Kind::Coordinate;
  int n_ = 0;
  int m_ = 0;
  int fibers_ = 0;
  std::vector<Expr> rhs_;
  SchemePtr base_;

  mutable std::mutex memo_mu_;
  mutable std::vector<std::vector<Expr>> time_memo_;  // [alpha-1][k] = D_x^k F^alpha
};

/// Horizontal q-form: sorted direction tuples to coefficients.
struct HForm {
  int degree = 0;
  std::map<std::vector<int>, Expr> terms;

  /// Adds coeff * dx_{idx[0]} ^ ... with arbitrary index order; the
  /// permutation sign is folded into the coefficient, repeated indices vanish.
  void add(std::vector<int> idx, const Expr& coeff);
  bool is_zero() const { return terms.empty(); }
  friend bool operator==(const HForm&, const HForm&) = default;
};

struct HFormResult {
  HForm form;
  /// Set when the input already had top degree n; the result is then the
  /// zero form of degree n+1.
  bool top_degree = false;
};

HFormResult d_h(const DerivScheme& scheme, const HForm& omega);

/// Ev_phi(f) = sum D_sigma(phi^a) df/du^a_sigma over the jet symbols of f.
Expr evolutionary_apply(const DerivScheme& scheme, const std::vector<Expr>& phi, const Expr& f);

/// Residuals D_t(phi^a) - Ev_phi(F^a) of the linearized evolution system.
std::vector<Expr> symmetry_residuals(const DerivScheme& scheme, const std::vector<Expr>& phi);
Report is_symmetry_evolution(const DerivScheme& scheme, const std::vector<Expr>& phi);

/// Characteristic of the commutator of two evolutionary fields:
/// Ev_phi1(phi2) - Ev_phi2(phi1).
std::vector<Expr> evolutionary_commutator(const DerivScheme& scheme, const std::vector<Expr>& phi1,
                                          const std::vector<Expr>& phi2);

}  // namespace flatcalc
