#include "flatcalc/expr.hpp"

#include <algorithm>
#include <sstream>

namespace flatcalc {

// ---- Monomial ---------------------------------------------------------------

Monomial::Monomial(Symbol s, unsigned e) {
  if (e) factors_.emplace_back(s, e);
}

Monomial Monomial::from_factors(std::vector<Factor> factors) {
  std::sort(factors.begin(), factors.end(),
            [](const Factor& a, const Factor& b) { return a.first < b.first; });
  Monomial m;
  for (const auto& [s, e] : factors) {
    if (!e) continue;
    if (!m.factors_.empty() && m.factors_.back().first == s)
      m.factors_.back().second += e;
    else
      m.factors_.emplace_back(s, e);
  }
  return m;
}

unsigned Monomial::degree() const {
  unsigned d = 0;
  for (const auto& f : factors_) d += f.second;
  return d;
}

unsigned Monomial::degree_in(Symbol s) const {
  for (const auto& f : factors_)
    if (f.first == s) return f.second;
  return 0;
}

Monomial Monomial::operator*(const Monomial& o) const {
  Monomial r;
  r.factors_.reserve(factors_.size() + o.factors_.size());
  auto a = factors_.begin();
  auto b = o.factors_.begin();
  while (a != factors_.end() && b != o.factors_.end()) {
    if (a->first == b->first) {
      r.factors_.emplace_back(a->first, a->second + b->second);
      ++a;
      ++b;
    } else if (a->first < b->first) {
      r.factors_.push_back(*a++);
    } else {
      r.factors_.push_back(*b++);
    }
  }
  r.factors_.insert(r.factors_.end(), a, factors_.end());
  r.factors_.insert(r.factors_.end(), b, o.factors_.end());
  return r;
}

std::pair<unsigned, Monomial> Monomial::drop_one(Symbol s) const {
  Monomial r = *this;
  for (auto it = r.factors_.begin(); it != r.factors_.end(); ++it) {
    if (it->first == s) {
      unsigned e = it->second;
      if (e == 1)
        r.factors_.erase(it);
      else
        --it->second;
      return {e, r};
    }
  }
  return {0, r};
}

Monomial Monomial::without(Symbol s) const {
  Monomial r;
  for (const auto& f : factors_)
    if (f.first != s) r.factors_.push_back(f);
  return r;
}

std::string Monomial::render() const {
  std::string out;
  for (std::size_t k = 0; k < factors_.size(); ++k) {
    if (k) out += '*';
    out += factors_[k].first.render();
    if (factors_[k].second > 1) out += '^' + std::to_string(factors_[k].second);
  }
  return out;
}

bool MonomialLess::operator()(const Monomial& a, const Monomial& b) const {
  unsigned da = a.degree(), db = b.degree();
  if (da != db) return da < db;
  const auto& fa = a.factors();
  const auto& fb = b.factors();
  std::size_t n = std::min(fa.size(), fb.size());
  for (std::size_t k = 0; k < n; ++k) {
    if (fa[k].first != fb[k].first) return fa[k].first < fb[k].first;
    if (fa[k].second != fb[k].second) return fa[k].second > fb[k].second;
  }
  return fa.size() < fb.size();
}

// ---- Expr -------------------------------------------------------------------

Expr::Expr(long v) {
  if (v != 0) terms_.emplace_back(Monomial{}, Rational(v));
}

Expr::Expr(const Rational& v) {
  if (v != 0) {
    terms_.emplace_back(Monomial{}, v);
    terms_.back().second.canonicalize();
  }
}

Expr::Expr(Symbol s) { terms_.emplace_back(Monomial(s), Rational(1)); }

Expr::Expr(const Monomial& m, const Rational& c) {
  if (c != 0) {
    terms_.emplace_back(m, c);
    terms_.back().second.canonicalize();
  }
}

Expr Expr::from_terms(std::vector<Term> terms) {
  std::map<Monomial, Rational, MonomialLess> acc;
  for (auto& [m, c] : terms) {
    c.canonicalize();
    auto [it, inserted] = acc.try_emplace(std::move(m), c);
    if (!inserted) it->second += c;
  }
  Expr r;
  r.terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.terms_.emplace_back(m, c);
  return r;
}

bool Expr::is_constant() const {
  return terms_.empty() || (terms_.size() == 1 && terms_[0].first.empty());
}

Rational Expr::constant_term() const {
  if (!terms_.empty() && terms_[0].first.empty()) return terms_[0].second;
  return 0;
}

unsigned Expr::degree() const {
  // terms are graded, so the last one has maximal degree
  return terms_.empty() ? 0 : terms_.back().first.degree();
}

unsigned Expr::degree_in(Symbol s) const {
  unsigned d = 0;
  for (const auto& t : terms_) d = std::max(d, t.first.degree_in(s));
  return d;
}

std::set<Symbol> Expr::symbols() const {
  std::set<Symbol> out;
  for (const auto& t : terms_)
    for (const auto& f : t.first.factors()) out.insert(f.first);
  return out;
}

bool Expr::depends_on(Symbol s) const {
  for (const auto& t : terms_)
    if (t.first.degree_in(s)) return true;
  return false;
}

Expr Expr::operator-() const {
  Expr r = *this;
  for (auto& t : r.terms_) t.second = -t.second;
  return r;
}

Expr& Expr::operator+=(const Expr& o) {
  if (o.terms_.empty()) return *this;
  if (terms_.empty()) return *this = o;
  std::vector<Term> merged;
  merged.reserve(terms_.size() + o.terms_.size());
  MonomialLess less;
  auto a = terms_.begin();
  auto b = o.terms_.begin();
  while (a != terms_.end() && b != o.terms_.end()) {
    if (a->first == b->first) {
      Rational c = a->second + b->second;
      if (c != 0) merged.emplace_back(a->first, std::move(c));
      ++a;
      ++b;
    } else if (less(a->first, b->first)) {
      merged.push_back(std::move(*a++));
    } else {
      merged.push_back(*b++);
    }
  }
  for (; a != terms_.end(); ++a) merged.push_back(std::move(*a));
  merged.insert(merged.end(), b, o.terms_.end());
  terms_ = std::move(merged);
  return *this;
}

Expr& Expr::operator-=(const Expr& o) { return *this += -o; }

Expr operator*(const Expr& a, const Expr& b) {
  if (a.terms_.empty() || b.terms_.empty()) return {};
  if (a.is_constant()) return b.scaled(a.terms_[0].second);
  if (b.is_constant()) return a.scaled(b.terms_[0].second);
  std::map<Monomial, Rational, MonomialLess> acc;
  for (const auto& [ma, ca] : a.terms_) {
    for (const auto& [mb, cb] : b.terms_) {
      Monomial m = ma * mb;
      auto [it, inserted] = acc.try_emplace(std::move(m), ca * cb);
      if (!inserted) it->second += ca * cb;
    }
  }
  Expr r;
  r.terms_.reserve(acc.size());
  for (auto& [m, c] : acc)
    if (c != 0) r.terms_.emplace_back(m, c);
  return r;
}

Expr& Expr::operator*=(const Expr& o) { return *this = *this * o; }

Expr Expr::scaled(const Rational& c) const {
  if (c == 0) return {};
  Rational k = c;
  k.canonicalize();
  Expr r = *this;
  for (auto& t : r.terms_) t.second *= k;
  return r;
}

Expr Expr::pow(unsigned e) const {
  Expr result(1);
  Expr base = *this;
  while (e) {
    if (e & 1u) result *= base;
    e >>= 1u;
    if (e) base *= base;
  }
  return result;
}

Rational Expr::coefficient(const Monomial& m) const {
  auto it = std::lower_bound(terms_.begin(), terms_.end(), m,
                             [](const Term& t, const Monomial& k) { return MonomialLess{}(t.first, k); });
  if (it != terms_.end() && it->first == m) return it->second;
  return 0;
}

std::string Expr::render() const {
  if (terms_.empty()) return "0";
  std::string out;
  bool first = true;
  for (const auto& [m, c] : terms_) {
    bool negative = c < 0;
    Rational mag = negative ? Rational(-c) : c;
    if (first)
      out += negative ? "-" : "";
    else
      out += negative ? " - " : " + ";
    first = false;
    if (m.empty()) {
      out += mag.get_str();
    } else if (mag == 1) {
      out += m.render();
    } else {
      out += mag.get_str() + "*" + m.render();
    }
  }
  return out;
}

// ---- free functions ---------------------------------------------------------

Expr partial(const Expr& f, Symbol s) {
  std::vector<Expr::Term> out;
  for (const auto& [m, c] : f.terms()) {
    auto [e, rest] = m.drop_one(s);
    if (e) out.emplace_back(std::move(rest), c * e);
  }
  return Expr::from_terms(std::move(out));
}

Expr substitute(const Expr& f, const Bindings& bindings) {
  if (bindings.empty()) return f;
  std::map<std::pair<Symbol, unsigned>, Expr> power_cache;
  auto power_of = [&](Symbol s, unsigned e) -> const Expr& {
    auto key = std::make_pair(s, e);
    auto it = power_cache.find(key);
    if (it != power_cache.end()) return it->second;
    return power_cache.emplace(key, bindings.at(s).pow(e)).first->second;
  };
  Expr result;
  std::vector<Expr::Term> untouched;
  for (const auto& [m, c] : f.terms()) {
    std::vector<Monomial::Factor> kept;
    Expr factor(c);
    bool replaced = false;
    for (const auto& [s, e] : m.factors()) {
      if (bindings.count(s)) {
        factor *= power_of(s, e);
        replaced = true;
        if (factor.is_zero()) break;
      } else {
        kept.emplace_back(s, e);
      }
    }
    if (!replaced) {
      untouched.emplace_back(m, c);
      continue;
    }
    if (factor.is_zero()) continue;
    result += factor * Expr(Monomial::from_factors(std::move(kept)), Rational(1));
  }
  return result + Expr::from_terms(std::move(untouched));
}

std::vector<std::pair<unsigned, Expr>> collect_param(const Expr& f, Symbol p) {
  std::map<unsigned, std::vector<Expr::Term>> buckets;
  for (const auto& [m, c] : f.terms()) buckets[m.degree_in(p)].emplace_back(m.without(p), c);
  std::vector<std::pair<unsigned, Expr>> out;
  for (auto& [k, terms] : buckets) {
    Expr e = Expr::from_terms(std::move(terms));
    if (!e.is_zero()) out.emplace_back(k, std::move(e));
  }
  return out;
}

Expr param_coefficient(const Expr& f, Symbol p, unsigned k) {
  std::vector<Expr::Term> terms;
  for (const auto& [m, c] : f.terms())
    if (m.degree_in(p) == k) terms.emplace_back(m.without(p), c);
  return Expr::from_terms(std::move(terms));
}

Rational evaluate(const Expr& f, const std::map<Symbol, Rational>& point) {
  Rational total = 0;
  for (const auto& [m, c] : f.terms()) {
    Rational v = c;
    for (const auto& [s, e] : m.factors()) {
      const Rational& x = point.at(s);
      for (unsigned k = 0; k < e; ++k) v *= x;
    }
    total += v;
  }
  return total;
}

// ---- raw trees --------------------------------------------------------------

std::shared_ptr<const RawExpr> RawExpr::num(const Rational& v) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Number;
  r->number = v;
  return r;
}

std::shared_ptr<const RawExpr> RawExpr::sym(Symbol s) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Sym;
  r->symbol = s;
  return r;
}

std::shared_ptr<const RawExpr> RawExpr::add(std::vector<std::shared_ptr<const RawExpr>> a) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Add;
  r->args = std::move(a);
  return r;
}

std::shared_ptr<const RawExpr> RawExpr::mul(std::vector<std::shared_ptr<const RawExpr>> a) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Mul;
  r->args = std::move(a);
  return r;
}

std::shared_ptr<const RawExpr> RawExpr::power(std::shared_ptr<const RawExpr> base,
                                              std::shared_ptr<const RawExpr> exponent) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Pow;
  r->args = {std::move(base), std::move(exponent)};
  return r;
}

std::shared_ptr<const RawExpr> RawExpr::neg(std::shared_ptr<const RawExpr> a) {
  auto r = std::make_shared<RawExpr>();
  r->op = Op::Neg;
  r->args = {std::move(a)};
  return r;
}

Expr normalize(const RawExpr& raw) {
  switch (raw.op) {
    case RawExpr::Op::Number:
      return Expr(raw.number);
    case RawExpr::Op::Sym:
      return Expr(*raw.symbol);
    case RawExpr::Op::Add: {
      Expr acc;
      for (const auto& a : raw.args) acc += normalize(*a);
      return acc;
    }
    case RawExpr::Op::Mul: {
      Expr acc(1);
      for (const auto& a : raw.args) acc *= normalize(*a);
      return acc;
    }
    case RawExpr::Op::Neg:
      return -normalize(*raw.args.at(0));
    case RawExpr::Op::Pow: {
      Expr exponent = normalize(*raw.args.at(1));
      if (!exponent.is_constant()) throw InputError("exponent must be a constant");
      Rational e = exponent.constant_term();
      if (e.get_den() != 1) throw InputError("exponent must be an integer");
      if (e < 0) throw InputError("exponent must be nonnegative");
      if (e > 4096) throw InputError("exponent too large");
      return normalize(*raw.args.at(0)).pow(static_cast<unsigned>(e.get_num().get_ui()));
    }
  }
  throw std::logic_error("unreachable raw expression op");
}

}  // namespace flatcalc
