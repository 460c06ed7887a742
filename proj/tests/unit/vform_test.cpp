#include "doctest.h"
#include "flatcalc/fce.hpp"
#include "flatcalc/vform.hpp"
#include "support.hpp"

using namespace flatcalc;

namespace {

Symbol x(int i) { return Symbol::independent(i); }
Symbol v(int a) { return Symbol::base_fiber(a); }

// random decomposable-sum form over the coordinate coframe x1..x3
VForm random_form(testsupport::RandomPoly& gen, int degree, const std::vector<Symbol>& coords) {
  std::set<Symbol> coframe(coords.begin(), coords.end());
  VForm out(degree, coframe);
  int terms = gen.integer(1, 2);
  for (int t = 0; t < terms; ++t) {
    FormKey key;
    for (int d = 0; d < degree; ++d) key.push_back(gen.pick(coords));
    Derivation field;
    int comps = gen.integer(1, 2);
    for (int c = 0; c < comps; ++c) field.add_partial(gen.pick(coords), gen.poly(coords, 2, 2));
    out.add(key, field);
  }
  return out;
}

VForm sign_scaled(const VForm& f, int sign) { return sign > 0 ? f : f.scaled(Expr(-1)); }

}  // namespace

TEST_SUITE("vform") {
  TEST_CASE("derivation brackets") {
    auto kdv = DerivScheme::evolution({Expr(Symbol::jet(1, {1, 1, 1})) +
                                       Expr(6) * Expr(Symbol::jet(1, {})) * Expr(Symbol::jet(1, {1}))});
    CHECK(bracket(*kdv, Derivation::total(1), Derivation::total(2)).is_zero());

    auto plain = DerivScheme::coordinate(1);
    auto lhs = bracket(*plain, Derivation::partial(v(1), Expr(v(1))), Derivation::partial(v(1)));
    CHECK(lhs == Derivation::partial(v(1), Expr(-1)));

    // free jets: [d/du_1, D_1] = d/du_0
    auto fj = DerivScheme::free_jet(1, 1);
    Symbol u0 = Symbol::jet(1, {}), u1 = Symbol::jet(1, {1});
    CHECK(bracket(*fj, Derivation::partial(u1), Derivation::total(1)) == Derivation::partial(u0));
    // evolution charts: the t-commutator is infinite
    CHECK_THROWS_AS(bracket(*kdv, Derivation::partial(u0), Derivation::total(2)), std::domain_error);
  }

  TEST_CASE("bracket agrees with the commutator on functions") {
    testsupport::RandomPoly gen(41);
    auto fj = DerivScheme::free_jet(2, 1);
    std::vector<Symbol> syms{x(1), x(2), Symbol::jet(1, {}), Symbol::jet(1, {1}), Symbol::jet(1, {2}),
                             Symbol::jet(1, {1, 1})};
    for (int t = 0; t < 20; ++t) {
      Derivation a = Derivation::total(1, gen.poly(syms, 1, 2));
      a.add_partial(gen.pick(syms), gen.poly(syms, 2, 2));
      Derivation b = Derivation::total(2, gen.poly(syms, 1, 2));
      b.add_partial(gen.pick(syms), gen.poly(syms, 2, 2));
      Expr f = gen.poly(syms, 3);
      Expr direct = a.apply(*fj, b.apply(*fj, f)) - b.apply(*fj, a.apply(*fj, f));
      CHECK(bracket(*fj, a, b).apply(*fj, f) == direct);
    }
  }

  TEST_CASE("nijenhuis examples") {
    auto line = DerivScheme::coordinate(1);
    std::set<Symbol> cf{x(1), v(1)};
    VForm a(1, cf);
    a.add({x(1)}, Derivation::partial(x(1)));
    CHECK(nijenhuis(*line, a, a).is_zero());
    VForm b(1, cf);
    b.add({x(1)}, Derivation::total(1) + Derivation::partial(v(1), Expr(v(1)) * Expr(x(1))));
    CHECK(nijenhuis(*line, b, b).is_zero());

    ConnectionSpec bad{2, 1, {{Expr(v(1))}, {Expr(x(1)) * Expr(v(1))}}};
    auto forms = connection_forms(bad);
    VForm curv = nijenhuis(*forms.scheme, forms.horizontal, forms.horizontal);
    VForm expect(2, bad.coframe());
    expect.add({x(1), x(2)}, Derivation::partial(v(1), Expr(2) * Expr(v(1))));
    CHECK(curv == expect);
  }

  TEST_CASE("connection forms") {
    ConnectionSpec triv{2, 1, {{Expr(0)}, {Expr(0)}}};
    auto f = connection_forms(triv);
    CHECK(f.horizontal.component({x(1)}) == Derivation::total(1));
    CHECK(f.horizontal.component({x(2)}) == Derivation::total(2));
    ConnectionSpec line{1, 1, {{Expr(v(1))}}};
    auto g = connection_forms(line);
    CHECK(g.horizontal.component({x(1)}) == Derivation::total(1) + Derivation::partial(v(1), Expr(v(1))));
    CHECK(g.vertical.component({v(1)}) == Derivation::partial(v(1)));
    CHECK(g.vertical.component({x(1)}) == Derivation::partial(v(1), -Expr(v(1))));
    ConnectionSpec xy{2, 1, {{Expr(x(2))}, {Expr(x(1))}}};
    auto h = connection_forms(xy);
    CHECK(nijenhuis(*h.scheme, h.horizontal, h.horizontal).is_zero());
    // horizontal + vertical reproduces the identity dx_i (x) d/dx_i + dv (x) d/dv
    VForm sum = h.horizontal;
    sum += h.vertical;
    CHECK(sum.component({x(1)}) == Derivation::total(1));
    CHECK(sum.component({v(1)}) == Derivation::partial(v(1)));
  }

  TEST_CASE("graded antisymmetry and Jacobi") {
    testsupport::RandomPoly gen(42);
    auto scheme = DerivScheme::coordinate(3);
    std::vector<Symbol> coords{x(1), x(2), x(3)};
    for (int t = 0; t < 20; ++t) {
      int p = gen.integer(0, 2), q = gen.integer(0, 2), r = gen.integer(0, 1);
      VForm a = random_form(gen, p, coords), b = random_form(gen, q, coords), c = random_form(gen, r, coords);
      VForm ab = nijenhuis(*scheme, a, b);
      VForm ba = nijenhuis(*scheme, b, a);
      ab += sign_scaled(ba, (p * q) % 2 == 0 ? 1 : -1);
      CHECK(ab.is_zero());

      VForm lhs = nijenhuis(*scheme, a, nijenhuis(*scheme, b, c));
      VForm rhs = nijenhuis(*scheme, nijenhuis(*scheme, a, b), c);
      rhs += sign_scaled(nijenhuis(*scheme, b, nijenhuis(*scheme, a, c)), (p * q) % 2 == 0 ? 1 : -1);
      lhs -= rhs;
      CHECK(lhs.is_zero());
    }
  }

  TEST_CASE("curvature criterion on generated connections") {
    testsupport::RandomPoly gen(43);
    for (int t = 0; t < 30; ++t) {
      int n = gen.integer(1, 2) + 0, m = gen.integer(1, 2);
      if (t % 3 == 0) n = 2;
      ConnectionSpec spec{n, m, {}};
      std::vector<Symbol> xs;
      for (int i = 1; i <= n; ++i) xs.push_back(x(i));
      std::vector<Symbol> all = xs;
      for (int a = 1; a <= m; ++a) all.push_back(v(a));
      std::vector<Expr> potential;
      for (int a = 1; a <= m; ++a) potential.push_back(gen.poly(xs, 3));
      spec.coeffs.assign(static_cast<std::size_t>(n), std::vector<Expr>(static_cast<std::size_t>(m)));
      for (int i = 1; i <= n; ++i)
        for (int a = 1; a <= m; ++a)
          spec.coeffs[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(a - 1)] =
              partial(potential[static_cast<std::size_t>(a - 1)], x(i));
      if (t % 2 == 1) spec.coeffs[0][0] += gen.nonzero_poly(all, 2);
      auto forms = connection_forms(spec);
      bool curvature_zero = nijenhuis(*forms.scheme, forms.horizontal, forms.horizontal).is_zero();
      CHECK(curvature_zero == (check_flat(spec).verdict == Verdict::Pass));
      if (t % 2 == 0) CHECK(curvature_zero);
    }
  }

  TEST_CASE("d_nabla on vertical forms") {
    ConnectionSpec triv{2, 1, {{Expr(0)}, {Expr(0)}}};
    VForm one(0, triv.coframe());
    one.add({}, Derivation::partial(v(1)));
    CHECK(d_nabla_vertical(triv, one).is_zero());

    ConnectionSpec xy{2, 1, {{Expr(x(2))}, {Expr(x(1))}}};
    VForm theta(0, xy.coframe());
    theta.add({}, Derivation::partial(v(1), Expr(v(1))));
    VForm expect(1, xy.coframe());
    expect.add({x(1)}, Derivation::partial(v(1), Expr(x(2))));
    expect.add({x(2)}, Derivation::partial(v(1), Expr(x(1))));
    CHECK(d_nabla_vertical(xy, theta) == expect);

    ConnectionSpec bad{2, 1, {{Expr(v(1))}, {Expr(x(1)) * Expr(v(1))}}};
    CHECK_THROWS_AS(d_nabla_vertical(bad, theta), std::invalid_argument);
    VForm horiz(0, xy.coframe());
    horiz.add({}, Derivation::total(1));
    CHECK_THROWS_AS(d_nabla_vertical(xy, horiz), std::invalid_argument);
  }

  TEST_CASE("d_nabla squares to zero and equals the bracket with the horizontal form") {
    testsupport::RandomPoly gen(44);
    for (int t = 0; t < 10; ++t) {
      int m = gen.integer(1, 2);
      ConnectionSpec spec{2, m, {}};
      std::vector<Symbol> xs{x(1), x(2)};
      std::vector<Symbol> all = xs;
      for (int a = 1; a <= m; ++a) all.push_back(v(a));
      spec.coeffs.assign(2, std::vector<Expr>(static_cast<std::size_t>(m)));
      for (int a = 1; a <= m; ++a) {
        // gradients and constant linear terms are both flat
        if (gen.integer(0, 1) == 0) {
          Expr pot = gen.poly(xs, 3);
          spec.coeffs[0][static_cast<std::size_t>(a - 1)] = partial(pot, x(1));
          spec.coeffs[1][static_cast<std::size_t>(a - 1)] = partial(pot, x(2));
        } else {
          spec.coeffs[0][static_cast<std::size_t>(a - 1)] = Expr(gen.rational()) * Expr(v(a));
          spec.coeffs[1][static_cast<std::size_t>(a - 1)] = Expr(gen.rational()) * Expr(v(a));
        }
      }
      REQUIRE(check_flat(spec).verdict == Verdict::Pass);
      VForm theta(0, spec.coframe());
      Derivation field;
      for (int a = 1; a <= m; ++a) field.add_partial(v(a), gen.poly(all, 2));
      theta.add({}, field);
      VForm d1 = d_nabla_vertical(spec, theta);
      CHECK(d_nabla_vertical(spec, d1).is_zero());
      auto forms = connection_forms(spec);
      CHECK(nijenhuis(*forms.scheme, forms.horizontal, theta) == d1);
    }
  }
}
