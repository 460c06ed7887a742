#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "flatcalc/fce.hpp"
#include "flatcalc/jetspace.hpp"
#include "flatcalc/linsolve.hpp"
#include "flatcalc/report.hpp"
#include "flatcalc/vform.hpp"

namespace flatcalc {

using Reducer = std::function<Expr(const Expr&)>;

/// Flat representation over a trivial extension: fields
/// F_i = H_i + sum_alpha a_i^alpha d/dy^alpha, i = 1..n, where H_i is a
/// combination of the scheme's total derivatives (D_i by default).
struct FlatRepSpec {
  SchemePtr scheme;                       // extended scheme carrying y^1..y^m
  std::vector<Derivation> horizontal;     // H_i
  std::vector<std::vector<Expr>> coeffs;  // coeffs[i-1][alpha-1] = a_i^alpha
  /// Normal form modulo the equation when the scheme is not internal
  /// (identity when unset).
  Reducer reduce;

  int n() const { return static_cast<int>(coeffs.size()); }
  int m() const { return scheme->fibers(); }
  const Expr& coeff(int i, int alpha) const {
    return coeffs[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(alpha - 1)];
  }
  Expr normal(const Expr& f) const { return reduce ? reduce(f) : f; }

  Derivation field(int i) const;
  /// F_i(f) in normal form.
  Expr apply(int i, const Expr& f) const;
  /// Ubar = sum_i dx_i (x) F_i over the coframe dx_1..dx_n.
  VForm horizontal_form() const;
  std::set<Symbol> coframe() const;

  /// Default spec: H_i = D_i, checks shapes and symbols.
  static FlatRepSpec make(SchemePtr scheme, std::vector<std::vector<Expr>> coeffs);
  void validate() const;
};

/// Residuals are the coefficients of [F_i, F_j], i < j.
Report check_flat_rep(const FlatRepSpec& spec);

/// phi^* of an expression over the flat-connection chart (n, m). Throws if
/// `spec` is not flat.
Expr pullback(const FlatRepSpec& spec, const Expr& f);

struct Deformation {
  VForm cocycle;  // sum_i dx_i (x) dF_i/dp
  Report closedness;
};

/// Derivative of the family at p = p0 (symbolic in p when p0 is unset).
Deformation infinitesimal_deformation(const FlatRepSpec& family, Symbol p, const std::optional<Rational>& p0 = {});

/// Ubar bracket of a degree-0 field, in normal form.
VForm differential(const FlatRepSpec& spec, const Derivation& v);

struct ExactnessResult {
  Report report;
  std::optional<Derivation> witness;
};

/// Looks for V = sum_alpha b^alpha d/dy^alpha + sum_k e_k D_k (k in
/// `extra_directions`) with every coefficient in the ansatz and
/// [[Ubar, V]] = c.
ExactnessResult exactness_test(const FlatRepSpec& spec, const VForm& c, const AnsatzSpec& ansatz,
                               const std::vector<int>& extra_directions = {});

/// c_S = -sum_i Ev_phi(a_i^alpha) dx_i (x) d/dy^alpha. Rejects non-symmetries.
VForm symmetry_cocycle(const FlatRepSpec& spec, const std::vector<Expr>& phi);

struct LiftResult {
  Report report;
  std::optional<std::vector<Expr>> lift;  // a^alpha
};

/// Lift of Ev_phi to Ev_phi + sum a^alpha d/dy^alpha commuting with every F_i.
LiftResult lift_symmetry(const FlatRepSpec& spec, const std::vector<Expr>& phi, const AnsatzSpec& ansatz);

/// Residuals of F_i(a^alpha) - Ev_phi(a_i^alpha) - sum_beta a^beta d(a_i^alpha)/dy^beta.
std::vector<Expr> lift_residuals(const FlatRepSpec& spec, const std::vector<Expr>& phi, const std::vector<Expr>& a);

/// Flat representation from a covering X_i = sum a_i^alpha d/dy^alpha over
/// `base`. Rejects fields with a non-vertical part.
FlatRepSpec covering_to_flatrep(SchemePtr base, int fibers, const std::vector<Derivation>& fields);

}  // namespace flatcalc
