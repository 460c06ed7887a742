#include "flatcalc/flatrep.hpp"

#include <compare>
#include <map>
#include <stdexcept>
#include <string>

namespace flatcalc {

// ---- spec -------------------------------------------------------------------

FlatRepSpec FlatRepSpec::make(SchemePtr scheme, std::vector<std::vector<Expr>> coeffs) {
  FlatRepSpec spec;
  spec.scheme = std::move(scheme);
  spec.coeffs = std::move(coeffs);
  for (int i = 1; i <= spec.n(); ++i) spec.horizontal.push_back(Derivation::total(i));
  spec.validate();
  return spec;
}

void FlatRepSpec::validate() const {
  if (!scheme) throw std::invalid_argument("flat representation needs a scheme");
  if (m() < 1) throw std::invalid_argument("flat representation needs at least one fiber coordinate");
  if (n() < 1 || n() > scheme->directions())
    throw std::invalid_argument("flat representation needs 1.." + std::to_string(scheme->directions()) + " fields");
  if (static_cast<int>(horizontal.size()) != n()) throw std::invalid_argument("one horizontal part per field");
  for (const auto& h : horizontal)
    if (!h.partials().empty()) throw std::invalid_argument("horizontal parts must be total-derivative combinations");
  for (const auto& row : coeffs) {
    if (static_cast<int>(row.size()) != m()) throw std::invalid_argument("one coefficient per fiber coordinate");
    for (const auto& e : row) scheme->check_internal(e);
  }
}

Derivation FlatRepSpec::field(int i) const {
  Derivation d = horizontal.at(static_cast<std::size_t>(i - 1));
  for (int a = 1; a <= m(); ++a) d.add_partial(Symbol::fiber(a), coeff(i, a));
  return d;
}

Expr FlatRepSpec::apply(int i, const Expr& f) const { return normal(field(i).apply(*scheme, f)); }

std::set<Symbol> FlatRepSpec::coframe() const {
  std::set<Symbol> out;
  for (int i = 1; i <= n(); ++i) out.insert(Symbol::independent(i));
  return out;
}

VForm FlatRepSpec::horizontal_form() const {
  VForm out(1, coframe());
  for (int i = 1; i <= n(); ++i) out.add({Symbol::independent(i)}, field(i));
  return out;
}

// ---- flatness and pullback ----------------------------------------------------

Report check_flat_rep(const FlatRepSpec& spec) {
  spec.validate();
  std::vector<Expr> residuals;
  for (int i = 1; i <= spec.n(); ++i)
    for (int j = i + 1; j <= spec.n(); ++j) {
      Derivation c = bracket(*spec.scheme, spec.field(i), spec.field(j));
      c = c.mapped([&](const Expr& e) { return spec.normal(e); });
      for (const auto& [k, e] : c.schematic()) residuals.push_back(e);
      for (int a = 1; a <= spec.m(); ++a) residuals.push_back(c.partial_coeff(Symbol::fiber(a)));
      for (const auto& [s, e] : c.partials())
        if (!s.is(SymbolKind::Fiber)) residuals.push_back(e);
    }
  return Report::from_residuals("check-flatrep", residuals);
}

Expr pullback(const FlatRepSpec& spec, const Expr& f) {
  if (check_flat_rep(spec).verdict != Verdict::Pass)
    throw std::invalid_argument("pullback needs a flat representation");
  FcChart chart(spec.n(), spec.m());
  chart.check(f);
  std::map<Symbol, Expr> memo;
  auto image = [&](auto&& self, Symbol s) -> Expr {
    switch (s.kind()) {
      case SymbolKind::Param:
      case SymbolKind::Independent:
        return Expr(s);
      case SymbolKind::BaseFiber:
        return Expr(Symbol::fiber(s.index()));
      default:
        break;
    }
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    Expr value;
    const MultiIndex& I = s.upper_i();
    const MultiIndex& A = s.upper_a();
    if (!A.empty()) {
      int b = A.back();
      value = partial(self(self, Symbol::fc(s.index(), I, without_index(A, b))), Symbol::fiber(b));
    } else if (I.size() == 1) {
      value = spec.coeff(I[0], s.index());
    } else {
      int i = I.back();
      value = spec.apply(i, self(self, Symbol::fc(s.index(), without_index(I, i), {})));
    }
    memo.emplace(s, value);
    return value;
  };
  Bindings bindings;
  for (Symbol s : f.symbols()) bindings.emplace(s, image(image, s));
  return spec.normal(substitute(f, bindings));
}

// ---- deformations -----------------------------------------------------------

Deformation infinitesimal_deformation(const FlatRepSpec& family, Symbol p, const std::optional<Rational>& p0) {
  if (!p.is(SymbolKind::Param)) throw std::invalid_argument("deformation parameter must be a parameter symbol");
  if (check_flat_rep(family).verdict != Verdict::Pass)
    throw std::invalid_argument("family is not flat for symbolic " + p.render());
  auto at_p0 = [&](const Expr& e) { return p0 ? substitute(e, {{p, Expr(*p0)}}) : e; };
  auto rate = [&](const Expr& e) { return at_p0(partial(e, p)); };

  FlatRepSpec base = family;
  for (auto& h : base.horizontal) h = h.mapped(at_p0);
  for (auto& row : base.coeffs)
    for (auto& e : row) e = at_p0(e);

  Deformation out;
  out.cocycle = VForm(1, family.coframe());
  for (int i = 1; i <= family.n(); ++i) {
    Derivation d = family.field(i).mapped(rate);
    out.cocycle.add({Symbol::independent(i)}, d.mapped([&](const Expr& e) { return family.normal(e); }));
  }
  VForm closed = nijenhuis(*base.scheme, base.horizontal_form(), out.cocycle)
                     .mapped([&](const Expr& e) { return base.normal(e); });
  out.closedness = Report::from_residuals("deformation", closed.coefficients());
  return out;
}

VForm differential(const FlatRepSpec& spec, const Derivation& v) {
  VForm zero(0, spec.coframe());
  zero.add({}, v);
  return nijenhuis(*spec.scheme, spec.horizontal_form(), zero).mapped([&](const Expr& e) { return spec.normal(e); });
}

// ---- exactness --------------------------------------------------------------

namespace {

struct ComponentKey {
  FormKey form;
  int direction;                // total-derivative direction, 0 for partials
  std::optional<Symbol> along;  // partial direction
  auto operator<=>(const ComponentKey&) const = default;
};

std::map<ComponentKey, Expr> components(const VForm& f) {
  std::map<ComponentKey, Expr> out;
  for (const auto& [key, d] : f.terms()) {
    for (const auto& [i, c] : d.schematic()) out.emplace(ComponentKey{key, i, std::nullopt}, c);
    for (const auto& [s, c] : d.partials()) out.emplace(ComponentKey{key, 0, s}, c);
  }
  return out;
}

std::string unknown_name(const Derivation& dir) {
  if (!dir.schematic().empty()) return "e" + std::to_string(dir.schematic().begin()->first);
  Symbol s = dir.partials().begin()->first;
  return "b" + std::to_string(s.index());
}

}  // namespace

ExactnessResult exactness_test(const FlatRepSpec& spec, const VForm& c, const AnsatzSpec& ansatz,
                               const std::vector<int>& extra_directions) {
  spec.validate();
  if (c.degree() != 1) throw std::invalid_argument("exactness test needs a 1-cochain");
  VForm target = c.mapped([&](const Expr& e) { return spec.normal(e); });

  std::vector<Derivation> dirs;
  for (int a = 1; a <= spec.m(); ++a) dirs.push_back(Derivation::partial(Symbol::fiber(a)));
  for (int k : extra_directions) dirs.push_back(Derivation::total(k));
  auto basis = ansatz.monomials();

  std::vector<std::map<ComponentKey, Expr>> images;
  std::map<ComponentKey, std::size_t> index;
  auto register_keys = [&](const std::map<ComponentKey, Expr>& comps) {
    for (const auto& [k, e] : comps) index.try_emplace(k, index.size());
  };
  for (const auto& d : dirs)
    for (const auto& mono : basis) {
      images.push_back(components(differential(spec, d.scaled(Expr(mono, Rational(1))))));
      register_keys(images.back());
    }
  auto target_comps = components(target);
  register_keys(target_comps);

  auto dense = [&](const std::map<ComponentKey, Expr>& comps) {
    std::vector<Expr> out(index.size());
    for (const auto& [k, e] : comps) out[index.at(k)] = e;
    return out;
  };
  LinearSystem system(index.size());
  for (const auto& img : images) system.add_unknown(dense(img));
  auto sol = system.solve(dense(target_comps));

  ExactnessResult out;
  out.report.task = "exactness";
  if (!sol.consistent) {
    out.report.verdict = Verdict::BoundedNo;
    out.report.bound = ansatz.describe();
    for (const auto& e : target.coefficients()) out.report.residuals.push_back(e.render());
    return out;
  }
  Derivation witness;
  std::size_t col = 0;
  for (const auto& d : dirs) {
    Expr coeff;
    for (const auto& mono : basis) {
      if (sol.values[col] != 0) coeff += Expr(mono, sol.values[col]);
      ++col;
    }
    witness += d.scaled(coeff);
    out.report.witness.emplace_back(unknown_name(d), coeff.render());
  }
  VForm check = differential(spec, witness);
  check -= target;
  if (!check.is_zero()) throw std::logic_error("exactness witness failed verification");
  out.report.verdict = Verdict::Witness;
  out.report.residuals = {"0"};
  out.witness = std::move(witness);
  return out;
}

// ---- symmetries -------------------------------------------------------------

VForm symmetry_cocycle(const FlatRepSpec& spec, const std::vector<Expr>& phi) {
  spec.validate();
  for (const auto& r : symmetry_residuals(*spec.scheme, phi))
    if (!spec.normal(r).is_zero()) throw std::invalid_argument("generating function is not a symmetry");
  VForm out(1, spec.coframe());
  for (int i = 1; i <= spec.n(); ++i) {
    Derivation d;
    for (int a = 1; a <= spec.m(); ++a)
      d.add_partial(Symbol::fiber(a), -spec.normal(evolutionary_apply(*spec.scheme, phi, spec.coeff(i, a))));
    out.add({Symbol::independent(i)}, d);
  }
  return out;
}

std::vector<Expr> lift_residuals(const FlatRepSpec& spec, const std::vector<Expr>& phi, const std::vector<Expr>& a) {
  std::vector<Expr> out;
  for (int i = 1; i <= spec.n(); ++i)
    for (int al = 1; al <= spec.m(); ++al) {
      const Expr& ai = spec.coeff(i, al);
      Expr r = spec.apply(i, a[static_cast<std::size_t>(al - 1)]) - evolutionary_apply(*spec.scheme, phi, ai);
      for (int b = 1; b <= spec.m(); ++b) r -= a[static_cast<std::size_t>(b - 1)] * partial(ai, Symbol::fiber(b));
      out.push_back(spec.normal(r));
    }
  return out;
}

LiftResult lift_symmetry(const FlatRepSpec& spec, const std::vector<Expr>& phi, const AnsatzSpec& ansatz) {
  VForm c = symmetry_cocycle(spec, phi);
  auto ex = exactness_test(spec, c, ansatz);
  LiftResult out;
  out.report = ex.report;
  out.report.task = "lift";
  if (!ex.witness) return out;
  // the lift is the negated exactness witness
  std::vector<Expr> a;
  out.report.witness.clear();
  for (int al = 1; al <= spec.m(); ++al) {
    a.push_back(-ex.witness->partial_coeff(Symbol::fiber(al)));
    out.report.witness.emplace_back(spec.m() == 1 ? "a" : "a" + std::to_string(al), a.back().render());
  }
  for (const auto& r : lift_residuals(spec, phi, a))
    if (!r.is_zero()) throw std::logic_error("lift failed verification");
  out.lift = std::move(a);
  return out;
}

FlatRepSpec covering_to_flatrep(SchemePtr base, int fibers, const std::vector<Derivation>& fields) {
  if (!base) throw std::invalid_argument("covering needs a base scheme");
  if (static_cast<int>(fields.size()) != base->directions())
    throw std::invalid_argument("covering needs one field per direction");
  std::vector<std::vector<Expr>> coeffs;
  for (const auto& x : fields) {
    if (!x.is_vertical()) throw std::invalid_argument("covering fields must be vertical");
    std::vector<Expr> row(static_cast<std::size_t>(fibers));
    for (const auto& [s, c] : x.partials()) {
      if (!s.is(SymbolKind::Fiber) || s.index() > fibers)
        throw std::invalid_argument("covering field has a component along " + s.render());
      row[static_cast<std::size_t>(s.index() - 1)] = c;
    }
    coeffs.push_back(std::move(row));
  }
  return FlatRepSpec::make(DerivScheme::extended(std::move(base), fibers), std::move(coeffs));
}

}  // namespace flatcalc
