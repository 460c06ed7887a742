#include "flatcalc/kdv.hpp"

#include <stdexcept>

namespace flatcalc {

namespace {

Symbol u(int k) { return Symbol::jet(1, MultiIndex(static_cast<std::size_t>(k), 1)); }
Expr U(int k) { return Expr(u(k)); }

}  // namespace

const Expr& KdvBundle::symmetry(const std::string& name) const {
  for (const auto& [n, phi] : symmetries)
    if (n == name) return phi;
  throw std::invalid_argument("unknown KdV symmetry '" + name + "'");
}

FlatRepSpec KdvBundle::miura_at(const std::optional<Rational>& lambda_value) const {
  if (!lambda_value) return miura;
  FlatRepSpec out = miura;
  for (auto& row : out.coeffs)
    for (auto& e : row) e = substitute(e, {{lambda, Expr(*lambda_value)}});
  return out;
}

AnsatzSpec KdvBundle::ansatz(unsigned degree, int order, bool with_lambda) const {
  AnsatzSpec a;
  if (with_lambda) a.symbols.push_back(lambda);
  a.symbols.push_back(Symbol::independent(1));
  a.symbols.push_back(Symbol::independent(2));
  a.symbols.push_back(Symbol::fiber(1));
  for (int k = 0; k <= order; ++k) a.symbols.push_back(u(k));
  a.max_degree = degree;
  a.label = "degree<=" + std::to_string(degree) + ", order<=" + std::to_string(order);
  return a;
}

KdvBundle build_kdv() {
  Expr flow = U(3) + Expr(6) * U(0) * U(1);
  Symbol lam = Symbol::param("lam");
  Expr L(lam), y(Symbol::fiber(1)), x(Symbol::independent(1)), t(Symbol::independent(2));

  KdvBundle out;
  out.lambda = lam;
  out.equation = DerivScheme::evolution({flow});
  Expr ax = L + U(0) + y * y;
  Expr at = U(2) + Expr(2) * U(0) * U(0) - Expr(2) * L * U(0) - Expr(4) * L * L + Expr(2) * U(1) * y +
            y * y * (Expr(2) * U(0) - Expr(4) * L);
  out.miura = FlatRepSpec::make(DerivScheme::extended(out.equation, 1), {{ax}, {at}});
  out.symmetries = {
      {"x-translation", U(1)},
      {"t-translation", flow},
      {"galilean", Expr(1) + Expr(6) * t * U(1)},
      {"scaling", Expr(2) * U(0) + x * U(1) + Expr(3) * t * flow},
  };

  if (check_flat_rep(out.miura).verdict != Verdict::Pass) throw std::logic_error("Miura spec is not flat");
  for (const auto& [name, phi] : out.symmetries)
    if (is_symmetry_evolution(*out.equation, {phi}).verdict != Verdict::Pass)
      throw std::logic_error(name + " is not a KdV symmetry");
  return out;
}

Report kdv_verify(const KdvBundle& kdv) {
  Report flat = check_flat_rep(kdv.miura);
  Report out;
  out.task = "kdv-verify";
  out.verdict = flat.verdict;
  out.witness.emplace_back("miura", to_string(flat.verdict));
  for (const auto& [name, phi] : kdv.symmetries) {
    Report r = is_symmetry_evolution(*kdv.equation, {phi});
    out.witness.emplace_back(name, to_string(r.verdict));
    if (r.verdict != Verdict::Pass) out.verdict = Verdict::Fail;
    for (const auto& s : r.residuals)
      if (s != "0") out.residuals.push_back(s);
  }
  for (const auto& s : flat.residuals)
    if (s != "0") out.residuals.push_back(s);
  if (out.residuals.empty()) out.residuals = {"0"};
  return out;
}

LiftResult kdv_lift(const KdvBundle& kdv, const std::string& name, const std::optional<Rational>& lambda_value,
                    unsigned degree, int order) {
  const Expr& phi = kdv.symmetry(name);
  return lift_symmetry(kdv.miura_at(lambda_value), {phi}, kdv.ansatz(degree, order, !lambda_value));
}

KdvDeformation kdv_deformation(const KdvBundle& kdv, unsigned degree, int order) {
  KdvDeformation out;
  out.deformation = infinitesimal_deformation(kdv.miura, kdv.lambda);
  out.exactness = exactness_test(kdv.miura, out.deformation.cocycle, kdv.ansatz(degree, order, true));
  return out;
}

}  // namespace flatcalc
