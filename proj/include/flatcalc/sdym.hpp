#pragma once

#include <array>
#include <memory>
#include <optional>
#include <vector>

#include "flatcalc/flatrep.hpp"

namespace flatcalc {

using Matrix = std::vector<std::vector<Expr>>;

Matrix zero_matrix(int k);
Matrix operator+(const Matrix& a, const Matrix& b);
Matrix operator-(const Matrix& a, const Matrix& b);
Matrix operator*(const Matrix& a, const Matrix& b);
Matrix scaled(const Matrix& a, const Expr& f);
/// XY - YX
Matrix commutator(const Matrix& a, const Matrix& b);
bool is_zero(const Matrix& a);

/// Four k x k matrices A_1..A_4 of jet variables over x_1..x_4, plus fiber
/// coordinates w_1..w_k acted on linearly.
class MatChart {
 public:
  explicit MatChart(int k);

  int k() const { return k_; }
  /// Free jets in 4 directions over the 4k^2 matrix entries.
  const SchemePtr& jets() const { return jets_; }
  /// `jets()` plus the fibers w_1..w_k.
  const SchemePtr& extended() const { return extended_; }

  int dependent(int family, int p, int q) const { return (family - 1) * k_ * k_ + (p - 1) * k_ + q; }
  Symbol entry(int family, int p, int q, MultiIndex sigma = {}) const;
  struct Entry {
    int family, p, q;
  };
  Entry decode(Symbol jet) const;

  /// A_family with every entry differentiated along `sigma`.
  Matrix field(int family, const MultiIndex& sigma = {}) const;
  Matrix total_derivative(int direction, const Matrix& m) const;

  /// sigma(X) = -sum_{p,q} X_pq w_q d/dw_p, as the list of d/dw_p coefficients.
  std::vector<Expr> action(const Matrix& x) const;
  Derivation action_field(const Matrix& x) const;

 private:
  int k_;
  SchemePtr jets_;
  SchemePtr extended_;
};

/// The three coefficients of lambda^0, lambda^1, lambda^2 in
/// [d_1 + A_1 + lambda (d_3 + A_3), d_2 + A_2 + lambda (d_4 + A_4)].
std::array<Matrix, 3> lambda_expand(const MatChart& chart);

/// Normal forms modulo the self-dual equations and their prolongations.
/// Rules (entrywise, with all prolongations):
///   A_2 jets containing index 1 -> from the lambda^0 equation,
///   A_4 jets containing index 1 -> from the lambda^1 equation,
///   A_3 jets containing index 4 -> from the lambda^2 equation.
class SdymRewriter {
 public:
  enum class Strategy {
    Direct,   // differentiate the base rule by the remaining indices
    Stepwise  // differentiate the normal form of a lower jet, one index at a time
  };

  explicit SdymRewriter(const MatChart& chart, Strategy strategy = Strategy::Direct);

  bool is_normal(Symbol s) const;
  Expr normal(Symbol s) const;
  Expr normal(const Expr& f) const;
  Matrix normal(const Matrix& m) const;
  /// Copyable callable sharing this rewriter's memo.
  Reducer reducer() const;

 private:
  struct State;
  std::shared_ptr<State> state_;
};

/// Flat representation over x_1, x_2 with fields
/// D_i + lambda D_{i+2} + sigma(A_i + lambda A_{i+2}); lambda stays symbolic when unset.
FlatRepSpec sdym_flatrep(const MatChart& chart, const std::optional<Rational>& lambda_value);

/// Derivative of the lambda-family at lambda_value, and its closedness.
Deformation sdym_lambda_cocycle(const MatChart& chart, const Rational& lambda_value);

/// Ansatz for the exactness test: w's, normal jets of order <= `order`,
/// optionally x_1..x_4, total degree <= `degree`.
AnsatzSpec sdym_ansatz(const MatChart& chart, unsigned degree, int order, bool with_coordinates);

/// Exactness of the lambda-family cocycle with vertical plus D_3, D_4 witnesses.
ExactnessResult sdym_cocycle_exactness(const MatChart& chart, const Rational& lambda_value, const AnsatzSpec& ansatz);

/// G_H(A_i) = D_i(H) - [H, A_i], i = 1..4.
std::array<Matrix, 4> gauge_symmetry(const MatChart& chart, const Matrix& h);
/// Generating functions of G_H in dependent order.
std::vector<Expr> gauge_characteristic(const MatChart& chart, const Matrix& h);
/// Linearized self-dual equations along G_H, in normal form.
Report gauge_symmetry_check(const MatChart& chart, const Matrix& h);

/// Compares sum_i [F_i, Ev_G] dx^i on fiber coordinates with
/// -[[Ubar, sigma(H)]] for symbolic lambda. `replacement` swaps sigma(H) for
/// another vertical field.
Report verify_ugh(const MatChart& chart, const Matrix& h, const std::optional<Derivation>& replacement = {});

}  // namespace flatcalc
