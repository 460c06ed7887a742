#include "flatcalc/vform.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

namespace flatcalc {
namespace {

template <class Key>
void accumulate(std::map<Key, Expr>& into, const Key& k, const Expr& c) {
  if (c.is_zero()) return;
  auto [it, fresh] = into.try_emplace(k, c);
  if (!fresh) {
    it->second += c;
    if (it->second.is_zero()) into.erase(it);
  }
}

std::string render_key(const FormKey& key) {
  if (key.empty()) return "1";
  std::string out;
  for (std::size_t k = 0; k < key.size(); ++k) out += (k ? "^d" : "d") + key[k].render();
  return out;
}

}  // namespace

// ---- Derivation -------------------------------------------------------------

Derivation Derivation::total(int i, Expr coeff) {
  Derivation d;
  d.add_total(i, coeff);
  return d;
}

Derivation Derivation::partial(Symbol s, Expr coeff) {
  Derivation d;
  d.add_partial(s, coeff);
  return d;
}

Expr Derivation::schematic_coeff(int i) const {
  auto it = schematic_.find(i);
  return it == schematic_.end() ? Expr() : it->second;
}

Expr Derivation::partial_coeff(Symbol s) const {
  auto it = partial_.find(s);
  return it == partial_.end() ? Expr() : it->second;
}

Derivation& Derivation::add_total(int i, const Expr& c) {
  accumulate(schematic_, i, c);
  return *this;
}

Derivation& Derivation::add_partial(Symbol s, const Expr& c) {
  accumulate(partial_, s, c);
  return *this;
}

Derivation& Derivation::operator+=(const Derivation& o) {
  for (const auto& [i, c] : o.schematic_) add_total(i, c);
  for (const auto& [s, c] : o.partial_) add_partial(s, c);
  return *this;
}

Derivation& Derivation::operator-=(const Derivation& o) {
  for (const auto& [i, c] : o.schematic_) add_total(i, -c);
  for (const auto& [s, c] : o.partial_) add_partial(s, -c);
  return *this;
}

Derivation Derivation::operator-() const {
  return mapped([](const Expr& c) { return -c; });
}

Derivation Derivation::scaled(const Expr& f) const {
  return mapped([&](const Expr& c) { return c * f; });
}

Expr Derivation::apply(const DerivScheme& scheme, const Expr& f) const {
  Expr out;
  for (const auto& [i, c] : schematic_) out += c * scheme.total_derivative(i, f);
  for (const auto& [s, c] : partial_) {
    if (f.depends_on(s)) out += c * flatcalc::partial(f, s);
  }
  return out;
}

std::string Derivation::render() const {
  if (is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Expr& c, const std::string& field) {
    if (!first) os << " + ";
    first = false;
    os << '(' << c.render() << ")*" << field;
  };
  for (const auto& [i, c] : schematic_) emit(c, "D" + std::to_string(i));
  for (const auto& [s, c] : partial_) emit(c, "d/d" + s.render());
  return os.str();
}

Derivation bracket(const DerivScheme& scheme, const Derivation& x, const Derivation& y) {
  Derivation out;
  // [sum c_i D_i, sum d_j D_j] has no D-D part since the D_i commute
  for (const auto& [j, d] : y.schematic()) out.add_total(j, x.apply(scheme, d));
  for (const auto& [j, c] : x.schematic()) out.add_total(j, -y.apply(scheme, c));
  for (const auto& [t, q] : y.partials()) out.add_partial(t, x.apply(scheme, q));
  for (const auto& [t, p] : x.partials()) out.add_partial(t, -y.apply(scheme, p));
  // p_s d_j [d/ds, D_j] and -q_t c_i [d/dt, D_i]
  for (const auto& [s, p] : x.partials())
    for (const auto& [j, d] : y.schematic())
      for (const auto& [r, k] : scheme.partial_commutator(s, j)) out.add_partial(r, p * d * k);
  for (const auto& [t, q] : y.partials())
    for (const auto& [i, c] : x.schematic())
      for (const auto& [r, k] : scheme.partial_commutator(t, i)) out.add_partial(r, -(q * c * k));
  return out;
}

// ---- VForm ------------------------------------------------------------------

int normalize_key(FormKey& key) {
  int sign = 1;
  for (std::size_t a = 1; a < key.size(); ++a)
    for (std::size_t b = a; b > 0 && !(key[b - 1] < key[b]); --b) {
      if (key[b - 1] == key[b]) return 0;
      std::swap(key[b - 1], key[b]);
      sign = -sign;
    }
  return sign;
}

void VForm::add(FormKey key, const Derivation& x) {
  if (static_cast<int>(key.size()) != degree_)
    throw std::invalid_argument("form term of degree " + std::to_string(key.size()) + " added to degree " +
                                std::to_string(degree_));
  for (Symbol s : key)
    if (!coframe_.count(s)) throw std::invalid_argument("d" + s.render() + " is not in the coframe");
  int sign = normalize_key(key);
  if (sign == 0 || x.is_zero()) return;
  Derivation& slot = terms_[key];
  if (sign > 0)
    slot += x;
  else
    slot -= x;
  if (slot.is_zero()) terms_.erase(key);
}

VForm& VForm::operator+=(const VForm& o) {
  if (o.degree_ != degree_ && !o.is_zero()) throw std::invalid_argument("adding forms of different degree");
  coframe_.insert(o.coframe_.begin(), o.coframe_.end());
  for (const auto& [k, d] : o.terms_) add(k, d);
  return *this;
}

VForm& VForm::operator-=(const VForm& o) {
  if (o.degree_ != degree_ && !o.is_zero()) throw std::invalid_argument("subtracting forms of different degree");
  coframe_.insert(o.coframe_.begin(), o.coframe_.end());
  for (const auto& [k, d] : o.terms_) add(k, -d);
  return *this;
}

VForm VForm::scaled(const Expr& f) const {
  return mapped([&](const Expr& c) { return c * f; });
}

Derivation VForm::component(const FormKey& key) const {
  auto it = terms_.find(key);
  return it == terms_.end() ? Derivation() : it->second;
}

std::vector<Expr> VForm::coefficients() const {
  std::vector<Expr> out;
  for (const auto& [k, d] : terms_) {
    for (const auto& [i, c] : d.schematic()) out.push_back(c);
    for (const auto& [s, c] : d.partials()) out.push_back(c);
  }
  return out;
}

std::string VForm::render() const {
  if (is_zero()) return "0";
  std::string out;
  for (const auto& [k, d] : terms_) {
    if (!out.empty()) out += " + ";
    out += render_key(k) + " (x) [" + d.render() + "]";
  }
  return out;
}

std::map<Symbol, Expr> coframe_differential(const std::set<Symbol>& coframe, const Expr& f) {
  std::map<Symbol, Expr> out;
  for (Symbol s : f.symbols()) {
    if (s.is(SymbolKind::Param)) continue;
    if (!coframe.count(s))
      throw std::invalid_argument("differential of " + f.render() + " leaves the coframe (" + s.render() + ")");
    accumulate(out, s, partial(f, s));
  }
  return out;
}

namespace {

// L_X(d xi_K) for a closed coordinate basis form: sum_r d xi_k1 ^ .. d(X xi_kr) .. ^ d xi_kq
std::vector<std::pair<FormKey, Expr>> lie_of_basis(const DerivScheme& scheme, const std::set<Symbol>& coframe,
                                                  const Derivation& x, const FormKey& key) {
  std::vector<std::pair<FormKey, Expr>> out;
  for (std::size_t r = 0; r < key.size(); ++r) {
    Expr moved = x.apply(scheme, Expr(key[r]));
    if (moved.is_constant()) continue;
    for (const auto& [s, c] : coframe_differential(coframe, moved)) {
      FormKey k = key;
      k[r] = s;
      out.emplace_back(std::move(k), c);
    }
  }
  return out;
}

FormKey concat(const FormKey& a, const FormKey& b) {
  FormKey k = a;
  k.insert(k.end(), b.begin(), b.end());
  return k;
}

}  // namespace

VForm nijenhuis(const DerivScheme& scheme, const VForm& a, const VForm& b) {
  std::set<Symbol> coframe = a.coframe();
  coframe.insert(b.coframe().begin(), b.coframe().end());
  VForm out(a.degree() + b.degree(), coframe);
  for (const auto& [ka, x] : a.terms()) {
    for (const auto& [kb, y] : b.terms()) {
      // dK ^ dL (x) [X, Y]
      FormKey kab = concat(ka, kb);
      FormKey probe = kab;
      if (normalize_key(probe) != 0) out.add(kab, bracket(scheme, x, y));
      // dK ^ L_X(dL) (x) Y
      for (const auto& [kl, c] : lie_of_basis(scheme, coframe, x, kb)) out.add(concat(ka, kl), y.scaled(c));
      // - L_Y(dK) ^ dL (x) X
      for (const auto& [kk, c] : lie_of_basis(scheme, coframe, y, ka)) out.add(concat(kk, kb), x.scaled(-c));
    }
  }
  return out;
}

// ---- connections ------------------------------------------------------------

void ConnectionSpec::validate() const {
  if (n < 1 || m < 1) throw std::invalid_argument("connection needs n, m >= 1");
  if (static_cast<int>(coeffs.size()) != n) throw std::invalid_argument("connection needs n coefficient rows");
  for (const auto& row : coeffs) {
    if (static_cast<int>(row.size()) != m) throw std::invalid_argument("connection needs m coefficients per row");
    for (const auto& e : row)
      for (Symbol s : e.symbols()) {
        bool ok = s.is(SymbolKind::Param) || (s.is(SymbolKind::Independent) && s.index() <= n) ||
                  (s.is(SymbolKind::BaseFiber) && s.index() <= m);
        if (!ok) throw std::invalid_argument("connection coefficient uses " + s.render());
      }
  }
}

Derivation ConnectionSpec::lift(int i) const {
  Derivation d = Derivation::total(i);
  for (int a = 1; a <= m; ++a) d.add_partial(Symbol::base_fiber(a), coeff(i, a));
  return d;
}

std::set<Symbol> ConnectionSpec::coframe() const {
  std::set<Symbol> out;
  for (int i = 1; i <= n; ++i) out.insert(Symbol::independent(i));
  for (int a = 1; a <= m; ++a) out.insert(Symbol::base_fiber(a));
  return out;
}

ConnectionForms connection_forms(const ConnectionSpec& spec) {
  spec.validate();
  ConnectionForms out;
  out.scheme = DerivScheme::coordinate(spec.n);
  out.horizontal = VForm(1, spec.coframe());
  out.vertical = VForm(1, spec.coframe());
  for (int i = 1; i <= spec.n; ++i) out.horizontal.add({Symbol::independent(i)}, spec.lift(i));
  for (int a = 1; a <= spec.m; ++a) {
    Symbol v = Symbol::base_fiber(a);
    out.vertical.add({v}, Derivation::partial(v));
    for (int i = 1; i <= spec.n; ++i)
      out.vertical.add({Symbol::independent(i)}, Derivation::partial(v, -spec.coeff(i, a)));
  }
  return out;
}

VForm d_nabla_vertical(const ConnectionSpec& spec, const VForm& theta) {
  auto forms = connection_forms(spec);
  if (!nijenhuis(*forms.scheme, forms.horizontal, forms.horizontal).is_zero())
    throw std::invalid_argument("d_nabla needs a flat connection");
  for (const auto& [key, d] : theta.terms()) {
    for (Symbol s : key)
      if (!s.is(SymbolKind::Independent) || s.index() > spec.n)
        throw std::invalid_argument("d_nabla needs a horizontal form, got d" + s.render());
    if (!d.is_vertical()) throw std::invalid_argument("d_nabla needs vertical values");
    for (const auto& [s, c] : d.partials())
      if (!s.is(SymbolKind::BaseFiber) || s.index() > spec.m)
        throw std::invalid_argument("d_nabla needs values along d/dv, got d/d" + s.render());
  }
  VForm out(theta.degree() + 1, spec.coframe());
  for (const auto& [key, d] : theta.terms()) {
    for (int i = 1; i <= spec.n; ++i) {
      Derivation nabla = spec.lift(i);
      Derivation value;
      for (int a = 1; a <= spec.m; ++a) {
        Symbol va = Symbol::base_fiber(a);
        Expr c = nabla.apply(*forms.scheme, d.partial_coeff(va));
        for (int b = 1; b <= spec.m; ++b)
          c -= partial(spec.coeff(i, a), Symbol::base_fiber(b)) * d.partial_coeff(Symbol::base_fiber(b));
        value.add_partial(va, c);
      }
      FormKey k{Symbol::independent(i)};
      k.insert(k.end(), key.begin(), key.end());
      out.add(std::move(k), value);
    }
  }
  return out;
}

}  // namespace flatcalc
