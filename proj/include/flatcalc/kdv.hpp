#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "flatcalc/flatrep.hpp"

namespace flatcalc {

/// u_t = u_3 + 6 u_0 u_1 with its Miura-type flat representation and a few
/// named symmetry characteristics.
struct KdvBundle {
  SchemePtr equation;
  FlatRepSpec miura;  // symbolic in `lambda`
  Symbol lambda = Symbol::param("lam");
  std::vector<std::pair<std::string, Expr>> symmetries;

  /// Throws std::invalid_argument for unknown names.
  const Expr& symmetry(const std::string& name) const;
  /// The Miura spec with lambda fixed (unchanged when unset).
  FlatRepSpec miura_at(const std::optional<Rational>& lambda_value) const;
  /// Monomials in x, t, y, u_0..u_order (and lambda when symbolic) up to `degree`.
  AnsatzSpec ansatz(unsigned degree, int order, bool with_lambda) const;
};

/// Builds the bundle and checks its invariants (logic_error on failure).
KdvBundle build_kdv();

/// Flatness of the Miura spec plus the symmetry check of every named characteristic.
Report kdv_verify(const KdvBundle& kdv);

LiftResult kdv_lift(const KdvBundle& kdv, const std::string& name, const std::optional<Rational>& lambda_value,
                    unsigned degree = 4, int order = 3);

struct KdvDeformation {
  Deformation deformation;
  ExactnessResult exactness;
};

/// The lambda-family cocycle, its closedness and its exactness test.
KdvDeformation kdv_deformation(const KdvBundle& kdv, unsigned degree = 4, int order = 2);

}  // namespace flatcalc
