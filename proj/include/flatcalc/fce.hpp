#pragma once

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "flatcalc/expr.hpp"
#include "flatcalc/linsolve.hpp"
#include "flatcalc/report.hpp"
#include "flatcalc/vform.hpp"

namespace flatcalc {

/// Coordinates x_i, v^alpha, v_I^{alpha,A} (|I| >= 1) on the equation of
/// flat connections over R^n x R^m.
class FcChart {
 public:
  FcChart(int n, int m);

  int n() const { return n_; }
  int m() const { return m_; }
  /// Throws std::out_of_range for symbols with indices outside the chart.
  void check(Symbol s) const;
  void check(const Expr& f) const;

  /// D_{v^beta}(s) for a single coordinate.
  Expr vertical_rule(int beta, Symbol s) const;
  /// D_i(s) for a single coordinate, memoized.
  Expr total_rule(int i, Symbol s) const;
  /// D_i(s) computed by peeling `peel` from A first (no memo); used to
  /// check that the rule does not depend on the peeling order.
  Expr total_rule_peeling(int i, Symbol s, int peel) const;

 private:
  int n_;
  int m_;
  struct Memo;
  std::shared_ptr<Memo> memo_;
};

Expr fc_vertical(const FcChart& chart, int beta, const Expr& f);
Expr fc_total(const FcChart& chart, int i, const Expr& f);
/// v_i^{alpha,beta} = D_{v^beta}(v_i^alpha).
Symbol fc_connection_derivative(int i, int alpha, int beta);

/// Element of V^q: terms f dx_{i1} ^ ... ^ dx_{iq} (x) D_{v^alpha}.
struct Cochain {
  using Key = std::pair<std::vector<int>, int>;  // (sorted directions, alpha)

  int degree = 0;
  std::map<Key, Expr> terms;

  static Cochain from_functions(const std::vector<Expr>& f);
  /// f^1..f^m of a degree-0 cochain.
  std::vector<Expr> functions(int m) const;

  /// Adds coeff with arbitrary direction order; sign folded in.
  void add(std::vector<int> dirs, int alpha, const Expr& coeff);
  Expr coeff(const std::vector<int>& dirs, int alpha) const;
  bool is_zero() const { return terms.empty(); }
  std::vector<Expr> coefficients() const;
  friend bool operator==(const Cochain&, const Cochain&) = default;
};

/// One residual per (i<j, alpha) of the flatness system.
std::vector<Expr> flatness_residual(const ConnectionSpec& spec);
Report check_flat(const ConnectionSpec& spec);

Cochain dfc(const FcChart& chart, const Cochain& c);

/// phi_i^alpha = D_i f^alpha - sum_beta v_i^{alpha,beta} f^beta.
Cochain symmetry_from_f(const FcChart& chart, const std::vector<Expr>& f);
Report is_symmetry(const FcChart& chart, const Cochain& phi);

struct RecoverResult {
  Report report;
  std::optional<std::vector<Expr>> f;
  std::size_t kernel_dimension = 0;
};

/// Default search space for recover_f: coordinates with |I| <= maxI(phi) - 1,
/// |A| <= maxA(phi), total degree <= deg(phi).
AnsatzSpec default_recover_ansatz(const FcChart& chart, const Cochain& phi);
/// Every coordinate of the chart with 1 <= |I| <= max_i and |A| <= max_a,
/// plus x_i and v^alpha.
std::vector<Symbol> fc_coordinates(const FcChart& chart, int max_i, int max_a);

/// Finds f with symmetry_from_f(f) = phi inside the ansatz (applied to each
/// component). Throws std::invalid_argument when phi is not a cocycle.
RecoverResult recover_f(const FcChart& chart, const Cochain& phi, const std::optional<AnsatzSpec>& ansatz = {});

/// Coefficient S_I^{alpha,A} of the symmetry S_f at each target coordinate.
std::map<Symbol, Expr> prolong_symmetry(const FcChart& chart, const std::vector<Expr>& f,
                                        const std::set<Symbol>& targets);

/// Applies S_f (only_s) or T_f = S_f + V_f to an expression.
Expr apply_symmetry(const FcChart& chart, const std::vector<Expr>& f, const Expr& g, bool with_vertical);

/// {f, g}^alpha = S_f g^alpha - S_g f^alpha + V_f g^alpha - V_g f^alpha.
std::vector<Expr> bracket0(const FcChart& chart, const std::vector<Expr>& f, const std::vector<Expr>& g);

}  // namespace flatcalc
