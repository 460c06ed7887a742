#include "doctest.h"
#include "flatcalc/flatrep.hpp"
#include "support.hpp"

using namespace flatcalc;

namespace {

Expr U(int k) { return Expr(Symbol::jet(1, MultiIndex(static_cast<std::size_t>(k), 1))); }
Expr Y() { return Expr(Symbol::fiber(1)); }
Expr X() { return Expr(Symbol::independent(1)); }
Expr T() { return Expr(Symbol::independent(2)); }
Symbol lam() { return Symbol::param("lam"); }
Expr L() { return Expr(lam()); }

SchemePtr kdv_base() { return DerivScheme::evolution({U(3) + Expr(6) * U(0) * U(1)}); }

Expr miura_x() { return L() + U(0) + Y() * Y(); }
Expr miura_t() {
  return U(2) + Expr(2) * U(0) * U(0) - Expr(2) * L() * U(0) - Expr(4) * L() * L() + Expr(2) * U(1) * Y() +
         Y() * Y() * (Expr(2) * U(0) - Expr(4) * L());
}

FlatRepSpec miura() {
  return FlatRepSpec::make(DerivScheme::extended(kdv_base(), 1), {{miura_x()}, {miura_t()}});
}

AnsatzSpec lift_ansatz(unsigned degree) {
  AnsatzSpec a;
  a.symbols = {lam(),
               Symbol::independent(1),
               Symbol::independent(2),
               Symbol::fiber(1),
               Symbol::jet(1, {}),
               Symbol::jet(1, {1}),
               Symbol::jet(1, {1, 1})};
  a.max_degree = degree;
  return a;
}

}  // namespace

TEST_SUITE("flatrep") {
  TEST_CASE("flatness") {
    CHECK(check_flat_rep(miura()).verdict == Verdict::Pass);
    auto bad = FlatRepSpec::make(DerivScheme::extended(kdv_base(), 1), {{miura_x()}, {miura_t() + Y()}});
    auto r = check_flat_rep(bad);
    CHECK(r.verdict == Verdict::Fail);
    CHECK_THROWS_AS(FlatRepSpec::make(DerivScheme::extended(kdv_base(), 1), {{miura_x(), Y()}, {miura_t()}}),
                    std::invalid_argument);
  }

  TEST_CASE("pullback of connection coordinates") {
    auto spec = miura();
    CHECK(pullback(spec, Expr(Symbol::base_fiber(1))) == Y());
    CHECK(pullback(spec, Expr(Symbol::fc(1, {1}, {}))) == miura_x());
    CHECK(pullback(spec, Expr(Symbol::fc(1, {1}, {1}))) == Expr(2) * Y());
    Expr second = spec.apply(1, miura_t());
    CHECK(pullback(spec, Expr(Symbol::fc(1, {1, 2}, {}))) == second);
    CHECK(pullback(spec, Expr(Symbol::fc(1, {1, 2}, {}))) == spec.apply(2, miura_x()));
  }

  TEST_CASE("infinitesimal deformation in the spectral parameter") {
    auto d = infinitesimal_deformation(miura(), lam());
    CHECK(d.closedness.verdict == Verdict::Pass);
    VForm expect(1, miura().coframe());
    expect.add({Symbol::independent(1)}, Derivation::partial(Symbol::fiber(1)));
    expect.add({Symbol::independent(2)},
               Derivation::partial(Symbol::fiber(1), -(Expr(2) * U(0) + Expr(8) * L() + Expr(4) * Y() * Y())));
    CHECK(d.cocycle == expect);
    auto at0 = infinitesimal_deformation(miura(), lam(), Rational(0));
    CHECK(at0.closedness.verdict == Verdict::Pass);
  }

  TEST_CASE("differential squares to zero on flat representations") {
    testsupport::RandomPoly gen(51);
    auto spec = miura();
    std::vector<Symbol> syms{Symbol::fiber(1), Symbol::jet(1, {}), Symbol::jet(1, {1}), lam()};
    for (int t = 0; t < 8; ++t) {
      Derivation v = Derivation::partial(Symbol::fiber(1), gen.poly(syms, 2, 3));
      VForm dv = differential(spec, v);
      VForm ddv = nijenhuis(*spec.scheme, spec.horizontal_form(), dv);
      CHECK(ddv.is_zero());
    }
  }

  TEST_CASE("exactness finds a planted witness") {
    auto spec = miura();
    Derivation planted = Derivation::partial(Symbol::fiber(1), Y());
    VForm c = differential(spec, planted);
    AnsatzSpec a = lift_ansatz(2);
    auto r = exactness_test(spec, c, a);
    REQUIRE(r.witness);
    CHECK(r.report.verdict == Verdict::Witness);
    CHECK(differential(spec, *r.witness) == c);

    // dx (x) d/dy alone is not a coboundary of low-degree fiber fields
    VForm lone(1, spec.coframe());
    lone.add({Symbol::independent(1)}, Derivation::partial(Symbol::fiber(1)));
    auto no = exactness_test(spec, lone, lift_ansatz(1));
    CHECK(no.report.verdict == Verdict::BoundedNo);
    CHECK(!no.report.bound.empty());
  }

  TEST_CASE("lifting translations") {
    auto spec = miura();
    auto x = lift_symmetry(spec, {U(1)}, lift_ansatz(2));
    REQUIRE(x.lift);
    CHECK(x.report.verdict == Verdict::Witness);
    for (const auto& r : lift_residuals(spec, {U(1)}, *x.lift)) CHECK(r.is_zero());
    // the kernel of the differential is trivial here, so the lift is the x-field itself
    CHECK(x.lift->at(0) == miura_x());

    Expr dt = U(3) + Expr(6) * U(0) * U(1);
    auto t = lift_symmetry(spec, {dt}, lift_ansatz(3));
    REQUIRE(t.lift);
    CHECK(t.lift->at(0) == miura_t());
    CHECK_THROWS_AS(symmetry_cocycle(spec, {U(0)}), std::invalid_argument);
  }

  TEST_CASE("coverings") {
    auto cov = covering_to_flatrep(kdv_base(), 1,
                                   {Derivation::partial(Symbol::fiber(1), miura_x()),
                                    Derivation::partial(Symbol::fiber(1), miura_t())});
    CHECK(check_flat_rep(cov).verdict == Verdict::Pass);
    CHECK(cov.field(1) == miura().field(1));
    CHECK_THROWS_AS(covering_to_flatrep(kdv_base(), 1, {Derivation::total(1), Derivation::total(2)}),
                    std::invalid_argument);
    CHECK_THROWS_AS(covering_to_flatrep(kdv_base(), 1, {Derivation::partial(Symbol::fiber(2))}),
                    std::invalid_argument);
  }
}
