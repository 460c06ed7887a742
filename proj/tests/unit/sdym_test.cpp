#include "doctest.h"
#include "flatcalc/sdym.hpp"
#include "support.hpp"

using namespace flatcalc;

namespace {

Matrix constant_matrix(testsupport::RandomPoly& gen, int k) {
  Matrix m = zero_matrix(k);
  for (auto& row : m)
    for (auto& e : row) e = Expr(gen.rational());
  return m;
}

}  // namespace

TEST_SUITE("sdym") {
  TEST_CASE("action is a homomorphism") {
    testsupport::RandomPoly gen(61);
    for (int k = 1; k <= 3; ++k) {
      MatChart chart(k);
      for (int t = 0; t < 5; ++t) {
        Matrix a = constant_matrix(gen, k), b = constant_matrix(gen, k);
        Derivation lhs = chart.action_field(commutator(a, b));
        Derivation rhs = bracket(*chart.extended(), chart.action_field(a), chart.action_field(b));
        CHECK(lhs == rhs);
      }
    }
  }

  TEST_CASE("lambda expansion") {
    MatChart one(1);
    auto eqs = lambda_expand(one);
    CHECK(eqs[0][0][0] == Expr(one.entry(2, 1, 1, {1})) - Expr(one.entry(1, 1, 1, {2})));
    CHECK(eqs[2][0][0] == Expr(one.entry(4, 1, 1, {3})) - Expr(one.entry(3, 1, 1, {4})));

    MatChart two(2);
    auto e2 = lambda_expand(two);
    Matrix expect0 = two.field(2, {1}) - two.field(1, {2}) + commutator(two.field(1), two.field(2));
    CHECK(e2[0] == expect0);
    Matrix expect1 = two.field(4, {1}) - two.field(1, {4}) + commutator(two.field(1), two.field(4)) +
                     two.field(2, {3}) - two.field(3, {2}) + commutator(two.field(3), two.field(2));
    CHECK(e2[1] == expect1);
    CHECK(!e2[0][0][0].is_zero());
  }

  TEST_CASE("rewriter") {
    MatChart two(2);
    SdymRewriter rw(two);
    for (const auto& eq : lambda_expand(two)) CHECK(is_zero(rw.normal(eq)));
    CHECK(rw.is_normal(two.entry(1, 1, 2, {1, 1})));
    CHECK(!rw.is_normal(two.entry(2, 1, 2, {1, 3})));
    CHECK(!rw.is_normal(two.entry(3, 2, 2, {4})));
    CHECK(rw.is_normal(two.entry(4, 2, 2, {3})));
    for (Symbol s : rw.normal(two.entry(4, 1, 1, {1, 1, 4})).symbols()) CHECK(rw.is_normal(s));
  }

  TEST_CASE("rewriting strategies agree") {
    testsupport::RandomPoly gen(62);
    MatChart two(2);
    SdymRewriter direct(two), stepwise(two, SdymRewriter::Strategy::Stepwise);
    std::vector<Symbol> syms;
    for (int f = 1; f <= 4; ++f)
      for (MultiIndex s : std::vector<MultiIndex>{{1}, {1, 4}, {1, 1}, {4, 4}, {1, 3}, {1, 2, 4}, {3, 4}})
        syms.push_back(two.entry(f, gen.integer(1, 2), gen.integer(1, 2), s));
    for (int t = 0; t < 50; ++t) {
      Expr f = gen.poly(syms, 2, 3);
      CHECK(direct.normal(f) == stepwise.normal(f));
    }
  }

  TEST_CASE("flat representation") {
    MatChart one(1);
    auto spec = sdym_flatrep(one, Rational(0));
    CHECK(spec.coeff(1, 1) == -(Expr(one.entry(1, 1, 1)) * Expr(Symbol::fiber(1))));
    CHECK(check_flat_rep(spec).verdict == Verdict::Pass);
    MatChart two(2);
    CHECK(check_flat_rep(sdym_flatrep(two, Rational(0))).verdict == Verdict::Pass);
    CHECK(check_flat_rep(sdym_flatrep(two, std::nullopt)).verdict == Verdict::Pass);
    // without the rewriter the zero-curvature residual survives
    auto raw = sdym_flatrep(two, Rational(0));
    raw.reduce = nullptr;
    CHECK(check_flat_rep(raw).verdict == Verdict::Fail);
  }

  TEST_CASE("lambda cocycle") {
    MatChart two(2);
    auto d = sdym_lambda_cocycle(two, Rational(0));
    CHECK(d.closedness.verdict == Verdict::Pass);
    VForm expect(1, {Symbol::independent(1), Symbol::independent(2)});
    for (int i = 1; i <= 2; ++i) {
      Derivation c = Derivation::total(i + 2);
      auto act = two.action(two.field(i + 2));
      for (int p = 1; p <= 2; ++p) c.add_partial(Symbol::fiber(p), act[static_cast<std::size_t>(p - 1)]);
      expect.add({Symbol::independent(i)}, c);
    }
    CHECK(d.cocycle == expect);
    MatChart one(1);
    auto r = sdym_cocycle_exactness(one, Rational(0), sdym_ansatz(one, 2, 1, true));
    CHECK(r.report.verdict == Verdict::BoundedNo);
  }

  TEST_CASE("gauge symmetries") {
    MatChart one(1);
    Matrix c = zero_matrix(1);
    c[0][0] = Expr(3);
    for (const auto& g : gauge_symmetry(one, c)) CHECK(is_zero(g));

    MatChart two(2);
    Matrix hx = zero_matrix(2);
    hx[0][1] = Expr(Symbol::independent(1)) * Expr(Symbol::independent(3));
    hx[1][0] = Expr(Symbol::independent(2));
    CHECK(gauge_symmetry_check(two, hx).verdict == Verdict::Pass);
    CHECK(gauge_symmetry_check(two, two.field(1)).verdict == Verdict::Pass);
    // a generic characteristic is not a symmetry
    std::vector<Expr> phi(16);
    phi[0] = Expr(two.entry(1, 1, 1)) * Expr(two.entry(1, 1, 1));
    SdymRewriter rw(two);
    bool any = false;
    for (const auto& eq : lambda_expand(two))
      for (const auto& row : eq)
        for (const auto& e : row) any = any || !rw.normal(evolutionary_apply(*two.jets(), phi, e)).is_zero();
    CHECK(any);
  }

  TEST_CASE("gauge cocycles are exact") {
    MatChart one(1);
    CHECK(verify_ugh(one, one.field(1)).verdict == Verdict::Pass);
    MatChart two(2);
    testsupport::RandomPoly gen(63);
    Matrix h = constant_matrix(gen, 2);
    CHECK(verify_ugh(two, h).verdict == Verdict::Pass);
    CHECK(verify_ugh(two, two.field(1)).verdict == Verdict::Pass);
    Derivation squared;
    auto act = two.action(h);
    for (int p = 1; p <= 2; ++p) squared.add_partial(Symbol::fiber(p), act[static_cast<std::size_t>(p - 1)].pow(2));
    CHECK(verify_ugh(two, h, squared).verdict == Verdict::Fail);
  }
}
