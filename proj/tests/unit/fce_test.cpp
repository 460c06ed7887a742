#include "doctest.h"
#include "flatcalc/fce.hpp"
#include "support.hpp"

using namespace flatcalc;

namespace {

Symbol x(int i) { return Symbol::independent(i); }
Symbol v(int a) { return Symbol::base_fiber(a); }
Symbol fc(int a, MultiIndex I, MultiIndex A) { return Symbol::fc(a, std::move(I), std::move(A)); }

std::vector<Symbol> low_symbols(const FcChart& chart, int max_i) { return fc_coordinates(chart, max_i, 1); }

std::vector<Expr> random_f(testsupport::RandomPoly& gen, const FcChart& chart, const std::vector<Symbol>& syms,
                           unsigned degree) {
  std::vector<Expr> f;
  for (int a = 0; a < chart.m(); ++a) f.push_back(gen.poly(syms, degree, 3));
  return f;
}

}  // namespace

TEST_SUITE("fce") {
  TEST_CASE("vertical derivative") {
    FcChart chart(2, 2);
    CHECK(fc_vertical(chart, 1, Expr(v(1))) == Expr(1));
    CHECK(fc_vertical(chart, 2, Expr(fc(1, {1}, {}))) == Expr(fc(1, {1}, {2})));
    CHECK(fc_vertical(chart, 1, Expr(fc(1, {2}, {})).pow(2)) == Expr(2) * Expr(fc(1, {2}, {})) * Expr(fc(1, {2}, {1})));
    CHECK_THROWS(fc_vertical(chart, 3, Expr(v(1))));
  }

  TEST_CASE("total derivative rules") {
    FcChart chart(2, 1);
    CHECK(fc_total(chart, 1, Expr(v(1))) == Expr(fc(1, {1}, {})));
    CHECK(fc_total(chart, 1, Expr(fc(1, {2}, {}))) == Expr(fc(1, {1, 2}, {})));
    CHECK(fc_total(chart, 1, Expr(fc(1, {2}, {1}))) ==
          Expr(fc(1, {1, 2}, {1})) - Expr(fc(1, {1}, {1})) * Expr(fc(1, {2}, {1})));
    CHECK(fc_total(chart, 2, Expr(x(2))) == Expr(1));
  }

  TEST_CASE("total derivative is independent of the peeling order") {
    for (int n = 1; n <= 2; ++n)
      for (int m = 1; m <= 2; ++m) {
        FcChart chart(n, m);
        for (Symbol s : fc_coordinates(chart, 3, 3)) {
          if (!s.is(SymbolKind::Fc) || s.upper_a().size() < 2) continue;
          for (int i = 1; i <= n; ++i) {
            Expr ref = chart.total_rule(i, s);
            for (int b : s.upper_a()) CHECK(chart.total_rule_peeling(i, s, b) == ref);
          }
        }
      }
  }

  TEST_CASE("total derivatives commute on the chart") {
    testsupport::RandomPoly gen(31);
    FcChart chart(2, 2);
    auto syms = low_symbols(chart, 2);
    for (int t = 0; t < 10; ++t) {
      Expr f = gen.poly(syms, 2);
      CHECK(fc_total(chart, 1, fc_total(chart, 2, f)) == fc_total(chart, 2, fc_total(chart, 1, f)));
    }
  }

  TEST_CASE("flatness residual") {
    ConnectionSpec triv{2, 1, {{Expr(0)}, {Expr(0)}}};
    CHECK(check_flat(triv).verdict == Verdict::Pass);
    ConnectionSpec xy{2, 1, {{Expr(x(2))}, {Expr(x(1))}}};
    CHECK(check_flat(xy).verdict == Verdict::Pass);
    ConnectionSpec bad{2, 1, {{Expr(v(1))}, {Expr(x(1)) * Expr(v(1))}}};
    auto r = check_flat(bad);
    CHECK(r.verdict == Verdict::Fail);
    CHECK(r.residuals == std::vector<std::string>{"v1"});
  }

  TEST_CASE("dfc examples") {
    FcChart chart(2, 2);
    auto d = dfc(chart, Cochain::from_functions({Expr(1), Expr(0)}));
    Cochain expect;
    expect.degree = 1;
    for (int i = 1; i <= 2; ++i)
      for (int b = 1; b <= 2; ++b) expect.add({i}, b, -Expr(fc(b, {i}, {1})));
    CHECK(d == expect);

    FcChart one(2, 1);
    auto e = dfc(one, Cochain::from_functions({Expr(v(1))}));
    for (int i = 1; i <= 2; ++i)
      CHECK(e.coeff({i}, 1) == Expr(fc(1, {i}, {})) - Expr(fc(1, {i}, {1})) * Expr(v(1)));
  }

  TEST_CASE("dfc squares to zero") {
    testsupport::RandomPoly gen(32);
    for (int n = 1; n <= 2; ++n)
      for (int m = 1; m <= 2; ++m) {
        FcChart chart(n, m);
        auto syms = low_symbols(chart, 2);
        for (int t = 0; t < 5; ++t) {
          auto f = Cochain::from_functions(random_f(gen, chart, syms, 2));
          CHECK(dfc(chart, dfc(chart, f)).is_zero());
          Cochain c;
          c.degree = 1;
          for (int i = 1; i <= n; ++i)
            for (int a = 1; a <= m; ++a) c.add({i}, a, gen.poly(syms, 2, 3));
          CHECK(dfc(chart, dfc(chart, c)).is_zero());
        }
      }
  }

  TEST_CASE("symmetries from functions") {
    FcChart chart(2, 2);
    auto phi = symmetry_from_f(chart, {Expr(1), Expr(0)});
    for (int i = 1; i <= 2; ++i)
      for (int a = 1; a <= 2; ++a) CHECK(phi.coeff({i}, a) == -Expr(fc(a, {i}, {1})));
    CHECK(symmetry_from_f(chart, {Expr(0), Expr(0)}).is_zero());
    FcChart one(2, 1);
    auto psi = symmetry_from_f(one, {Expr(v(1))});
    CHECK(psi.coeff({1}, 1) == Expr(fc(1, {1}, {})) - Expr(fc(1, {1}, {1})) * Expr(v(1)));
  }

  TEST_CASE("is_symmetry") {
    testsupport::RandomPoly gen(33);
    FcChart chart(2, 2);
    auto syms = low_symbols(chart, 1);
    for (int t = 0; t < 5; ++t)
      CHECK(is_symmetry(chart, symmetry_from_f(chart, random_f(gen, chart, syms, 2))).verdict == Verdict::Pass);
    FcChart one(2, 1);
    Cochain naive;
    naive.degree = 1;
    naive.add({1}, 1, Expr(fc(1, {1}, {})));
    naive.add({2}, 1, Expr(fc(1, {2}, {})));
    CHECK(is_symmetry(one, naive).verdict == Verdict::Fail);
    Cochain zero;
    zero.degree = 1;
    CHECK(is_symmetry(one, zero).verdict == Verdict::Pass);
  }

  TEST_CASE("recover_f") {
    FcChart chart(2, 2);
    std::vector<Expr> f{Expr(v(1)) * Expr(v(2)), Expr(0)};
    auto r = recover_f(chart, symmetry_from_f(chart, f));
    REQUIRE(r.f);
    CHECK(*r.f == f);
    CHECK(r.report.verdict == Verdict::Witness);
    CHECK(r.kernel_dimension == 0);

    auto e1 = recover_f(chart, symmetry_from_f(chart, {Expr(1), Expr(0)}));
    REQUIRE(e1.f);
    CHECK(*e1.f == std::vector<Expr>{Expr(1), Expr(0)});

    Cochain zero;
    zero.degree = 1;
    auto z = recover_f(chart, zero);
    REQUIRE(z.f);
    CHECK(*z.f == std::vector<Expr>{Expr(0), Expr(0)});

    Cochain naive;
    naive.degree = 1;
    naive.add({1}, 1, Expr(fc(1, {1}, {})));
    CHECK_THROWS_AS(recover_f(chart, naive), std::invalid_argument);
  }

  TEST_CASE("recover_f reports bounded-no when the ansatz is too small") {
    FcChart chart(1, 1);
    auto phi = symmetry_from_f(chart, {Expr(v(1)).pow(3)});
    AnsatzSpec tiny;
    tiny.symbols = {v(1)};
    tiny.max_degree = 2;
    auto r = recover_f(chart, phi, tiny);
    CHECK(r.report.verdict == Verdict::BoundedNo);
    CHECK_FALSE(r.f);
    CHECK(r.report.bound == tiny.describe());
  }

  TEST_CASE("prolonged symmetry coefficients") {
    FcChart chart(2, 2);
    std::vector<Expr> e1{Expr(1), Expr(0)};
    auto s = prolong_symmetry(chart, e1, {fc(2, {1}, {}), fc(2, {1}, {2})});
    CHECK(s.at(fc(2, {1}, {})) == -Expr(fc(2, {1}, {1})));
    CHECK(s.at(fc(2, {1}, {2})) == -Expr(fc(2, {1}, {1, 2})));
    auto z = prolong_symmetry(chart, {Expr(0), Expr(0)}, {fc(1, {1, 2}, {1})});
    CHECK(z.at(fc(1, {1, 2}, {1})).is_zero());
    CHECK_THROWS(prolong_symmetry(chart, e1, {v(1)}));
  }

  TEST_CASE("bracket examples") {
    FcChart chart(2, 2);
    CHECK(bracket0(chart, {Expr(1), Expr(0)}, {Expr(0), Expr(1)}) == std::vector<Expr>{Expr(0), Expr(0)});
    FcChart one(2, 1);
    CHECK(bracket0(one, {Expr(v(1))}, {Expr(1)}) == std::vector<Expr>{Expr(-1)});
  }

  TEST_CASE("bracket: antisymmetry, Jacobi, commutator oracle") {
    testsupport::RandomPoly gen(34);
    FcChart chart(2, 1);
    auto syms = low_symbols(chart, 1);
    auto targets = fc_coordinates(chart, 2, 1);
    for (int t = 0; t < 4; ++t) {
      auto f = random_f(gen, chart, syms, 2);
      auto g = random_f(gen, chart, syms, 2);
      auto h = random_f(gen, chart, syms, 1);
      auto fg = bracket0(chart, f, g);
      auto gf = bracket0(chart, g, f);
      for (std::size_t a = 0; a < fg.size(); ++a) CHECK((fg[a] + gf[a]).is_zero());
      CHECK(bracket0(chart, f, f) == std::vector<Expr>(1));
      auto j1 = bracket0(chart, f, bracket0(chart, g, h));
      auto j2 = bracket0(chart, g, bracket0(chart, h, f));
      auto j3 = bracket0(chart, h, bracket0(chart, f, g));
      CHECK((j1[0] + j2[0] + j3[0]).is_zero());
      for (Symbol s : targets) {
        if (!s.is(SymbolKind::Fc)) continue;
        Expr lhs = apply_symmetry(chart, fg, Expr(s), true);
        Expr rhs = apply_symmetry(chart, f, apply_symmetry(chart, g, Expr(s), true), true) -
                   apply_symmetry(chart, g, apply_symmetry(chart, f, Expr(s), true), true);
        CHECK(lhs == rhs);
      }
    }
  }
}
