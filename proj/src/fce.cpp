#include "flatcalc/fce.hpp"

#include <algorithm>
#include <mutex>
#include <stdexcept>
#include <string>
#include <unordered_map>

namespace flatcalc {

struct FcChart::Memo {
  std::mutex mu;
  std::unordered_map<Symbol, std::vector<std::optional<Expr>>> total;
};

FcChart::FcChart(int n, int m) : n_(n), m_(m), memo_(std::make_shared<Memo>()) {
  if (n < 1 || m < 1) throw std::invalid_argument("flat-connection chart needs n, m >= 1");
}

void FcChart::check(Symbol s) const {
  auto in = [](const MultiIndex& idx, int hi) {
    return std::all_of(idx.begin(), idx.end(), [&](int k) { return k >= 1 && k <= hi; });
  };
  bool ok = true;
  switch (s.kind()) {
    case SymbolKind::Param:
      break;
    case SymbolKind::Independent:
      ok = s.index() <= n_;
      break;
    case SymbolKind::BaseFiber:
      ok = s.index() <= m_;
      break;
    case SymbolKind::Fc:
      ok = s.index() <= m_ && in(s.upper_i(), n_) && in(s.upper_a(), m_);
      break;
    default:
      ok = false;
  }
  if (!ok) throw std::out_of_range("symbol " + s.render() + " outside the chart");
}

void FcChart::check(const Expr& f) const {
  for (Symbol s : f.symbols()) check(s);
}

Expr FcChart::vertical_rule(int beta, Symbol s) const {
  if (beta < 1 || beta > m_) throw std::out_of_range("vertical direction " + std::to_string(beta));
  switch (s.kind()) {
    case SymbolKind::BaseFiber:
      return s.index() == beta ? Expr(1) : Expr(0);
    case SymbolKind::Fc:
      return Expr(Symbol::fc(s.index(), s.upper_i(), with_index(s.upper_a(), beta)));
    default:
      return Expr(0);
  }
}

Symbol fc_connection_derivative(int i, int alpha, int beta) { return Symbol::fc(alpha, {i}, {beta}); }

Expr FcChart::total_rule_peeling(int i, Symbol s, int peel) const {
  if (i < 1 || i > n_) throw std::out_of_range("direction " + std::to_string(i));
  switch (s.kind()) {
    case SymbolKind::Independent:
      return s.index() == i ? Expr(1) : Expr(0);
    case SymbolKind::BaseFiber:
      return Expr(Symbol::fc(s.index(), {i}, {}));
    case SymbolKind::Fc:
      break;
    default:
      return Expr(0);
  }
  const MultiIndex& upper = s.upper_a();
  if (upper.empty()) return Expr(Symbol::fc(s.index(), with_index(s.upper_i(), i), {}));
  if (!contains_index(upper, peel)) throw std::invalid_argument("peel index not in A");
  // D_i D_{v^b} = D_{v^b} D_i - sum_g v_i^{g,b} D_{v^g}
  MultiIndex rest = without_index(upper, peel);
  Expr out = fc_vertical(*this, peel, total_rule(i, Symbol::fc(s.index(), s.upper_i(), rest)));
  for (int g = 1; g <= m_; ++g)
    out -= Expr(fc_connection_derivative(i, g, peel)) * Expr(Symbol::fc(s.index(), s.upper_i(), with_index(rest, g)));
  return out;
}

Expr FcChart::total_rule(int i, Symbol s) const {
  if (!s.is(SymbolKind::Fc) || s.upper_a().empty()) return total_rule_peeling(i, s, 0);
  {
    std::lock_guard lock(memo_->mu);
    auto it = memo_->total.find(s);
    if (it != memo_->total.end() && it->second[static_cast<std::size_t>(i - 1)]) return *it->second[static_cast<std::size_t>(i - 1)];
  }
  Expr value = total_rule_peeling(i, s, s.upper_a().back());
  std::lock_guard lock(memo_->mu);
  auto& slots = memo_->total[s];
  slots.resize(static_cast<std::size_t>(n_));
  slots[static_cast<std::size_t>(i - 1)] = value;
  return value;
}

Expr fc_vertical(const FcChart& chart, int beta, const Expr& f) {
  Expr out;
  for (Symbol s : f.symbols()) {
    Expr r = chart.vertical_rule(beta, s);
    if (!r.is_zero()) out += r * partial(f, s);
  }
  return out;
}

Expr fc_total(const FcChart& chart, int i, const Expr& f) {
  Expr out;
  for (Symbol s : f.symbols()) {
    Expr r = chart.total_rule(i, s);
    if (!r.is_zero()) out += r * partial(f, s);
  }
  return out;
}

// ---- cochains ---------------------------------------------------------------

Cochain Cochain::from_functions(const std::vector<Expr>& f) {
  Cochain c;
  for (std::size_t a = 0; a < f.size(); ++a) c.add({}, static_cast<int>(a + 1), f[a]);
  return c;
}

std::vector<Expr> Cochain::functions(int m) const {
  if (degree != 0) throw std::invalid_argument("functions() needs a degree-0 cochain");
  std::vector<Expr> out(static_cast<std::size_t>(m));
  for (const auto& [key, c] : terms) out.at(static_cast<std::size_t>(key.second - 1)) = c;
  return out;
}

void Cochain::add(std::vector<int> dirs, int alpha, const Expr& coeff) {
  if (coeff.is_zero()) return;
  if (static_cast<int>(dirs.size()) != degree) throw std::invalid_argument("cochain term has wrong degree");
  int sign = 1;
  for (std::size_t a = 1; a < dirs.size(); ++a)
    for (std::size_t b = a; b > 0 && dirs[b - 1] >= dirs[b]; --b) {
      if (dirs[b - 1] == dirs[b]) return;
      std::swap(dirs[b - 1], dirs[b]);
      sign = -sign;
    }
  Key key{std::move(dirs), alpha};
  auto [it, fresh] = terms.try_emplace(key, sign > 0 ? coeff : -coeff);
  if (!fresh) {
    it->second += sign > 0 ? coeff : -coeff;
    if (it->second.is_zero()) terms.erase(it);
  }
}

Expr Cochain::coeff(const std::vector<int>& dirs, int alpha) const {
  auto it = terms.find({dirs, alpha});
  return it == terms.end() ? Expr() : it->second;
}

std::vector<Expr> Cochain::coefficients() const {
  std::vector<Expr> out;
  for (const auto& [k, c] : terms) out.push_back(c);
  return out;
}

// ---- flatness ---------------------------------------------------------------

std::vector<Expr> flatness_residual(const ConnectionSpec& spec) {
  spec.validate();
  auto lift_apply = [&](int i, const Expr& f) {
    Expr out = partial(f, Symbol::independent(i));
    for (int b = 1; b <= spec.m; ++b) out += spec.coeff(i, b) * partial(f, Symbol::base_fiber(b));
    return out;
  };
  std::vector<Expr> out;
  for (int i = 1; i <= spec.n; ++i)
    for (int j = i + 1; j <= spec.n; ++j)
      for (int a = 1; a <= spec.m; ++a)
        out.push_back(lift_apply(i, spec.coeff(j, a)) - lift_apply(j, spec.coeff(i, a)));
  return out;
}

Report check_flat(const ConnectionSpec& spec) {
  return Report::from_residuals("check-flat", flatness_residual(spec));
}

// ---- d_fc -------------------------------------------------------------------

Cochain dfc(const FcChart& chart, const Cochain& c) {
  Cochain out;
  out.degree = c.degree + 1;
  if (c.degree >= chart.n()) return out;
  for (const auto& [key, f] : c.terms) {
    chart.check(f);
    const auto& [dirs, alpha] = key;
    for (int i = 1; i <= chart.n(); ++i) {
      std::vector<int> k{i};
      k.insert(k.end(), dirs.begin(), dirs.end());
      out.add(k, alpha, fc_total(chart, i, f));
      for (int b = 1; b <= chart.m(); ++b) {
        // the connection term enters with the same sign in every degree; this keeps d o d = 0
        out.add(k, b, -(Expr(fc_connection_derivative(i, b, alpha)) * f));
      }
    }
  }
  return out;
}

Cochain symmetry_from_f(const FcChart& chart, const std::vector<Expr>& f) {
  if (static_cast<int>(f.size()) != chart.m()) throw std::invalid_argument("f needs m components");
  Cochain out;
  out.degree = 1;
  for (int i = 1; i <= chart.n(); ++i)
    for (int a = 1; a <= chart.m(); ++a) {
      chart.check(f[static_cast<std::size_t>(a - 1)]);
      Expr phi = fc_total(chart, i, f[static_cast<std::size_t>(a - 1)]);
      for (int b = 1; b <= chart.m(); ++b)
        phi -= Expr(fc_connection_derivative(i, a, b)) * f[static_cast<std::size_t>(b - 1)];
      out.add({i}, a, phi);
    }
  return out;
}

Report is_symmetry(const FcChart& chart, const Cochain& phi) {
  if (phi.degree != 1) throw std::invalid_argument("a symmetry is a degree-1 cochain");
  return Report::from_residuals("is-symmetry", dfc(chart, phi).coefficients());
}

// ---- recovery ---------------------------------------------------------------

namespace {

void multisets(int hi, int size, MultiIndex& cur, int from, std::vector<MultiIndex>& out) {
  if (static_cast<int>(cur.size()) == size) {
    out.push_back(cur);
    return;
  }
  for (int k = from; k <= hi; ++k) {
    cur.push_back(k);
    multisets(hi, size, cur, k, out);
    cur.pop_back();
  }
}

std::vector<MultiIndex> multisets(int hi, int size) {
  std::vector<MultiIndex> out;
  MultiIndex cur;
  multisets(hi, size, cur, 1, out);
  return out;
}

}  // namespace

std::vector<Symbol> fc_coordinates(const FcChart& chart, int max_i, int max_a) {
  std::vector<Symbol> out;
  for (int i = 1; i <= chart.n(); ++i) out.push_back(Symbol::independent(i));
  for (int a = 1; a <= chart.m(); ++a) out.push_back(Symbol::base_fiber(a));
  for (int li = 1; li <= max_i; ++li)
    for (const auto& I : multisets(chart.n(), li))
      for (int la = 0; la <= max_a; ++la)
        for (const auto& A : multisets(chart.m(), la))
          for (int a = 1; a <= chart.m(); ++a) out.push_back(Symbol::fc(a, I, A));
  std::sort(out.begin(), out.end());
  return out;
}

AnsatzSpec default_recover_ansatz(const FcChart& chart, const Cochain& phi) {
  int max_i = 0;
  int max_a = 0;
  unsigned deg = 0;
  for (const auto& [k, c] : phi.terms) {
    deg = std::max(deg, c.degree());
    for (Symbol s : c.symbols()) {
      if (!s.is(SymbolKind::Fc)) continue;
      max_i = std::max(max_i, s.order());
      max_a = std::max(max_a, static_cast<int>(s.upper_a().size()));
    }
  }
  AnsatzSpec spec;
  spec.symbols = fc_coordinates(chart, std::max(0, max_i - 1), max_a);
  spec.max_degree = deg;
  spec.label = "degree<=" + std::to_string(deg) + ", |I|<=" + std::to_string(std::max(0, max_i - 1)) +
               ", |A|<=" + std::to_string(max_a);
  return spec;
}

RecoverResult recover_f(const FcChart& chart, const Cochain& phi, const std::optional<AnsatzSpec>& ansatz) {
  if (phi.degree != 1) throw std::invalid_argument("recover-f needs a degree-1 cochain");
  if (!dfc(chart, phi).is_zero()) throw std::invalid_argument("recover-f needs a cocycle");
  AnsatzSpec spec = ansatz ? *ansatz : default_recover_ansatz(chart, phi);
  auto basis = spec.monomials();

  // components indexed by (i, alpha)
  const std::size_t comps = static_cast<std::size_t>(chart.n() * chart.m());
  auto flatten = [&](const Cochain& c) {
    std::vector<Expr> v(comps);
    for (const auto& [key, e] : c.terms)
      v[static_cast<std::size_t>((key.first[0] - 1) * chart.m() + key.second - 1)] = e;
    return v;
  };
  LinearSystem system(comps);
  std::vector<std::pair<int, std::size_t>> columns;  // (alpha, basis index)
  for (int a = 1; a <= chart.m(); ++a)
    for (std::size_t k = 0; k < basis.size(); ++k) {
      std::vector<Expr> f(static_cast<std::size_t>(chart.m()));
      f[static_cast<std::size_t>(a - 1)] = Expr(basis[k], Rational(1));
      system.add_unknown(flatten(symmetry_from_f(chart, f)));
      columns.emplace_back(a, k);
    }
  auto sol = system.solve(flatten(phi));

  RecoverResult out;
  out.report.task = "recover-f";
  if (!sol.consistent) {
    out.report.verdict = Verdict::BoundedNo;
    out.report.bound = spec.describe();
    out.report.residuals = {"no solution within bound"};
    return out;
  }
  std::vector<Expr> f(static_cast<std::size_t>(chart.m()));
  for (std::size_t c = 0; c < columns.size(); ++c)
    if (sol.values[c] != 0)
      f[static_cast<std::size_t>(columns[c].first - 1)] += Expr(basis[columns[c].second], sol.values[c]);
  // the reported witness is re-checked, never trusted
  Cochain back = symmetry_from_f(chart, f);
  if (!(back == phi)) throw std::logic_error("recover-f witness failed verification");
  out.report.verdict = Verdict::Witness;
  out.report.residuals = {"0"};
  for (int a = 1; a <= chart.m(); ++a)
    out.report.witness.emplace_back("f" + std::to_string(a), f[static_cast<std::size_t>(a - 1)].render());
  out.kernel_dimension = sol.kernel_dimension();
  out.f = std::move(f);
  return out;
}

// ---- symmetries and the bracket ----------------------------------------------

namespace {

class SymmetryProlongation {
 public:
  SymmetryProlongation(const FcChart& chart, const std::vector<Expr>& f) : chart_(chart), f_(f) {
    if (static_cast<int>(f.size()) != chart.m()) throw std::invalid_argument("f needs m components");
    phi_ = symmetry_from_f(chart, f);
  }

  // S(s) on one coordinate; zero off the support |I| >= 1
  Expr at(Symbol s) {
    if (!s.is(SymbolKind::Fc)) return Expr(0);
    auto it = memo_.find(s);
    if (it != memo_.end()) return it->second;
    Expr value;
    const MultiIndex& I = s.upper_i();
    const MultiIndex& A = s.upper_a();
    const int alpha = s.index();
    if (!A.empty()) {
      int b = A.back();
      value = fc_vertical(chart_, b, at(Symbol::fc(alpha, I, without_index(A, b))));
    } else if (I.size() == 1) {
      value = phi_.coeff({I[0]}, alpha);
    } else {
      int i = I.back();
      MultiIndex rest = without_index(I, i);
      value = fc_total(chart_, i, at(Symbol::fc(alpha, rest, {})));
      for (int b = 1; b <= chart_.m(); ++b)
        value += Expr(Symbol::fc(alpha, rest, {b})) * phi_.coeff({i}, b);
    }
    memo_.emplace(s, value);
    return value;
  }

  Expr vertical_at(Symbol s) const {
    Expr out;
    for (int b = 1; b <= chart_.m(); ++b)
      out += f_[static_cast<std::size_t>(b - 1)] * chart_.vertical_rule(b, s);
    return out;
  }

  Expr apply(const Expr& g, bool with_vertical) {
    Expr out;
    for (Symbol s : g.symbols()) {
      Expr r = at(s);
      if (with_vertical) r += vertical_at(s);
      if (!r.is_zero()) out += r * partial(g, s);
    }
    return out;
  }

 private:
  const FcChart& chart_;
  const std::vector<Expr>& f_;
  Cochain phi_;
  std::map<Symbol, Expr> memo_;
};

}  // namespace

std::map<Symbol, Expr> prolong_symmetry(const FcChart& chart, const std::vector<Expr>& f,
                                        const std::set<Symbol>& targets) {
  SymmetryProlongation s(chart, f);
  std::map<Symbol, Expr> out;
  for (Symbol t : targets) {
    chart.check(t);
    if (!t.is(SymbolKind::Fc)) throw std::invalid_argument("symmetry coefficient requested at " + t.render());
    out.emplace(t, s.at(t));
  }
  return out;
}

Expr apply_symmetry(const FcChart& chart, const std::vector<Expr>& f, const Expr& g, bool with_vertical) {
  chart.check(g);
  SymmetryProlongation s(chart, f);
  return s.apply(g, with_vertical);
}

std::vector<Expr> bracket0(const FcChart& chart, const std::vector<Expr>& f, const std::vector<Expr>& g) {
  SymmetryProlongation sf(chart, f);
  SymmetryProlongation sg(chart, g);
  std::vector<Expr> out;
  for (int a = 0; a < chart.m(); ++a)
    out.push_back(sf.apply(g[static_cast<std::size_t>(a)], true) - sg.apply(f[static_cast<std::size_t>(a)], true));
  return out;
}

}  // namespace flatcalc
