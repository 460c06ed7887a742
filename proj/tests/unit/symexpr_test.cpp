#include <map>

#include "doctest.h"
#include "flatcalc/expr.hpp"
#include "support.hpp"

using namespace flatcalc;

namespace {

Symbol x(int i) { return Symbol::independent(i); }
Symbol v(int a) { return Symbol::base_fiber(a); }
Symbol u(int k) { return Symbol::jet(1, MultiIndex(static_cast<std::size_t>(k), 1)); }

std::vector<Symbol> universe() {
  return {x(1), x(2), v(1), u(0), u(1), Symbol::fc(1, {2}, {}), Symbol::param("lam")};
}

}  // namespace

TEST_SUITE("symexpr") {
  TEST_CASE("normalize: difference of squares, cancellation, binomial") {
    auto X = RawExpr::sym(x(1));
    auto V = RawExpr::sym(v(1));
    auto prod = RawExpr::mul({RawExpr::add({X, V}), RawExpr::add({X, RawExpr::neg(V)})});
    CHECK(normalize(*prod) == Expr(x(1)) * Expr(x(1)) - Expr(v(1)) * Expr(v(1)));
    CHECK(normalize(*prod).render() == "x1^2 - v1^2");

    auto cancel = RawExpr::add({X, X, RawExpr::neg(RawExpr::mul({RawExpr::num(2), X}))});
    CHECK(normalize(*cancel).is_zero());
    CHECK(normalize(*cancel).render() == "0");

    auto sq = RawExpr::power(RawExpr::add({RawExpr::sym(u(0)), RawExpr::sym(u(1))}), RawExpr::num(2));
    Expr e = normalize(*sq);
    CHECK(e.size() == 3);
    CHECK(e.render() == "u[0]^2 + 2*u[0]*u[1] + u[1]^2");
  }

  TEST_CASE("normalize rejects bad exponents") {
    auto X = RawExpr::sym(x(1));
    CHECK_THROWS_AS(normalize(*RawExpr::power(X, RawExpr::num(-1))), InputError);
    CHECK_THROWS_AS(normalize(*RawExpr::power(X, RawExpr::num(Rational(1, 2)))), InputError);
    CHECK_THROWS_AS(normalize(*RawExpr::power(X, X)), InputError);
  }

  TEST_CASE("partial derivatives") {
    Expr u0(u(0)), u1(u(1));
    CHECK(partial(u0 * u0 * u1, u(0)) == Expr(2) * u0 * u1);
    CHECK(partial(Expr(x(1)), v(1)).is_zero());
    Symbol w = Symbol::fc(1, {2}, {});
    CHECK(partial(Expr(w).pow(3), w) == Expr(3) * Expr(w).pow(2));
  }

  TEST_CASE("substitute") {
    Symbol lam = Symbol::param("lam");
    CHECK(substitute(Expr(lam) * Expr(u(0)), {{lam, Expr(0)}}).is_zero());
    Symbol w = Symbol::fc(1, {1}, {});
    CHECK(substitute(Expr(w) + Expr(x(2)), {{w, Expr(x(2))}}) == Expr(2) * Expr(x(2)));
    Symbol eps = Symbol::param("eps");
    CHECK(substitute(Expr(eps).pow(2), {{eps, Expr(eps)}}) == Expr(eps).pow(2));
    // simultaneous, not sequential
    CHECK(substitute(Expr(x(1)) + Expr(x(2)) * 2, {{x(1), Expr(x(2))}, {x(2), Expr(x(1))}}) ==
          Expr(x(2)) + Expr(x(1)) * 2);
  }

  TEST_CASE("collect_param") {
    Symbol lam = Symbol::param("lam");
    Expr L(lam), u0(u(0)), u1(u(1));
    auto c = collect_param(L * L * u0 + L * u1 + 1, lam);
    REQUIRE(c.size() == 3);
    CHECK(c[0] == std::make_pair(0u, Expr(1)));
    CHECK(c[1] == std::make_pair(1u, u1));
    CHECK(c[2] == std::make_pair(2u, u0));
    auto d = collect_param(u0, lam);
    REQUIRE(d.size() == 1);
    CHECK(d[0] == std::make_pair(0u, u0));
    auto e = collect_param(L * (u0 + L) - L * u0, lam);
    REQUIRE(e.size() == 1);
    CHECK(e[0] == std::make_pair(2u, Expr(1)));
  }

  TEST_CASE("symbol rendering and canonical indices") {
    CHECK(Symbol::fc(2, {1}, {}).render() == "v[2;1;]");
    CHECK(Symbol::fc(1, {2, 2}, {1}).render() == "v[1;2,2;1]");
    CHECK(Symbol::fc(1, {2, 1}, {}) == Symbol::fc(1, {1, 2}, {}));
    CHECK(Symbol::fc(3, {}, {}) == Symbol::base_fiber(3));
    CHECK(u(3).render() == "u[3]");
    CHECK(Symbol::jet(2, {1, 3}).render() == "u2[1,3]");
    CHECK(Symbol::fiber(1).render() == "y1");
    Expr a = Expr(Symbol::param("lam")) + Expr(u(0)) + Expr(Symbol::fiber(1)).pow(2);
    CHECK(a.render() == "lam + u[0] + y1^2");
    CHECK((Expr(Rational(-3, 2)) * Expr(x(1)) + 1).render() == "1 - 3/2*x1");
  }

  TEST_CASE("ring axioms on random polynomials") {
    testsupport::RandomPoly gen(11);
    auto syms = universe();
    for (int t = 0; t < 50; ++t) {
      Expr f = gen.poly(syms, 3), g = gen.poly(syms, 3), h = gen.poly(syms, 2);
      CHECK((f + g) + h == f + (g + h));
      CHECK((f * g) * h == f * (g * h));
      CHECK(f * g == g * f);
      CHECK(f + g == g + f);
      CHECK(f * (g + h) == f * g + f * h);
      CHECK((f - f).is_zero());
    }
  }

  TEST_CASE("Leibniz and commuting partials") {
    testsupport::RandomPoly gen(12);
    auto syms = universe();
    for (int t = 0; t < 50; ++t) {
      Expr f = gen.poly(syms, 3), g = gen.poly(syms, 3);
      Symbol s = gen.pick(syms), r = gen.pick(syms);
      CHECK(partial(f * g, s) == partial(f, s) * g + f * partial(g, s));
      CHECK(partial(partial(f, s), r) == partial(partial(f, r), s));
    }
  }

  TEST_CASE("zero test agrees with evaluation") {
    testsupport::RandomPoly gen(13);
    auto syms = universe();
    for (int t = 0; t < 30; ++t) {
      Expr f = gen.poly(syms, 3);
      Expr zero_candidate = (t % 2 == 0) ? f - f : f;
      bool all_zero = true;
      for (int p = 0; p < 20; ++p) {
        std::map<Symbol, Rational> point;
        for (Symbol s : syms) point[s] = gen.rational() + Rational(p, 7);
        all_zero = all_zero && evaluate(zero_candidate, point) == 0;
      }
      CHECK(zero_candidate.is_zero() == all_zero);
    }
  }

  TEST_CASE("collect_param round trip") {
    testsupport::RandomPoly gen(14);
    auto syms = universe();
    Symbol lam = Symbol::param("lam");
    for (int t = 0; t < 30; ++t) {
      Expr f = gen.poly(syms, 4, 6);
      Expr back;
      for (const auto& [k, c] : collect_param(f, lam)) {
        CHECK_FALSE(c.depends_on(lam));
        CHECK_FALSE(c.is_zero());
        back += Expr(lam).pow(k) * c;
      }
      CHECK(back == f);
    }
  }
}
