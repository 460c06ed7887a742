#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "flatcalc/expr.hpp"

namespace flatcalc {

/// Finite polynomial ansatz: all monomials in `symbols` of total degree at
/// most `max_degree`, optionally with per-group degree caps.
struct AnsatzSpec {
  struct GroupCap {
    std::set<Symbol> group;
    unsigned max_degree;
  };

  std::vector<Symbol> symbols;
  unsigned max_degree = 0;
  std::vector<GroupCap> caps;
  /// Free-form description of the bound, echoed in bounded-no verdicts.
  std::string label;

  /// Deterministic monomial basis, in MonomialLess order.
  std::vector<Monomial> monomials() const;
  /// Undetermined coefficient symbols prefix_1 .. prefix_N for the basis.
  std::vector<Symbol> undetermined(const std::string& prefix) const;
  /// The generic ansatz element sum_k prefix_k * m_k.
  Expr generic(const std::string& prefix) const;
  std::string describe() const;
};

/// Result of an exact linear solve.
struct LinearSolution {
  bool consistent = false;
  std::vector<Rational> values;  // one per unknown; free unknowns set to 0
  std::size_t rank = 0;
  std::size_t unknowns = 0;
  std::size_t kernel_dimension() const { return unknowns - rank; }
};

/// Undetermined-coefficient system  sum_k c_k * image_k = target, where each
/// image is a vector of Expr components. Monomials of every component give
/// one scalar equation each; the solve is Gaussian elimination over Q.
class LinearSystem {
 public:
  explicit LinearSystem(std::size_t components) : components_(components) {}

  std::size_t add_unknown(std::vector<Expr> image);
  std::size_t unknowns() const { return images_.size(); }

  LinearSolution solve(const std::vector<Expr>& target) const;

 private:
  std::size_t components_;
  std::vector<std::vector<Expr>> images_;
};

}  // namespace flatcalc
