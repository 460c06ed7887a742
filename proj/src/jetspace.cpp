#include "flatcalc/jetspace.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

namespace flatcalc {
namespace {

bool all_spatial(const MultiIndex& sigma) {
  return std::all_of(sigma.begin(), sigma.end(), [](int s) { return s == 1; });
}

MultiIndex spatial(int k) { return MultiIndex(static_cast<std::size_t>(k), 1); }

}  // namespace

SchemePtr DerivScheme::coordinate(int n) {
  if (n < 1) throw std::invalid_argument("scheme needs at least one direction");
  auto s = std::shared_ptr<DerivScheme>(new DerivScheme());
  s->kind_ = Kind::Coordinate;
  s->n_ = n;
  return s;
}

SchemePtr DerivScheme::free_jet(int n, int m) {
  if (n < 1 || m < 1) throw std::invalid_argument("free jet scheme needs n, m >= 1");
  auto s = std::shared_ptr<DerivScheme>(new DerivScheme());
  s->kind_ = Kind::FreeJet;
  s->n_ = n;
  s->m_ = m;
  return s;
}

SchemePtr DerivScheme::evolution(std::vector<Expr> rhs) {
  if (rhs.empty()) throw std::invalid_argument("evolution scheme needs a right-hand side");
  auto s = std::shared_ptr<DerivScheme>(new DerivScheme());
  s->kind_ = Kind::Evolution;
  s->n_ = 2;
  s->m_ = static_cast<int>(rhs.size());
  s->rhs_ = std::move(rhs);
  for (const auto& f : s->rhs_) {
    for (Symbol sym : f.symbols()) {
      bool ok = sym.is(SymbolKind::Param) ||
                (sym.is(SymbolKind::Independent) && sym.index() <= 2) ||
                (sym.is(SymbolKind::Jet) && sym.index() <= s->m_ && all_spatial(sym.sigma()));
      if (!ok)
        throw std::invalid_argument("evolution right-hand side uses non-internal symbol " + sym.render());
    }
  }
  s->time_memo_.resize(s->rhs_.size());
  return s;
}

SchemePtr DerivScheme::extended(SchemePtr base, int fibers) {
  if (!base) throw std::invalid_argument("extended scheme needs a base");
  if (fibers < 0) throw std::invalid_argument("negative fiber count");
  auto s = std::shared_ptr<DerivScheme>(new DerivScheme());
  s->kind_ = Kind::Extended;
  s->n_ = base->n_;
  s->m_ = base->m_;
  s->fibers_ = fibers;
  s->base_ = std::move(base);
  return s;
}

const std::vector<Expr>& DerivScheme::rhs() const { return base_ ? base_->rhs() : rhs_; }

void DerivScheme::check_direction(int i) const {
  if (i < 1 || i > n_)
    throw std::out_of_range("direction " + std::to_string(i) + " out of range 1.." + std::to_string(n_));
}

bool DerivScheme::is_jet(Symbol s) const {
  if (base_) return base_->is_jet(s);
  if (!s.is(SymbolKind::Jet) || s.index() > m_) return false;
  if (kind_ == Kind::Evolution) return all_spatial(s.sigma());
  if (kind_ == Kind::FreeJet)
    return std::all_of(s.sigma().begin(), s.sigma().end(), [&](int d) { return d <= n_; });
  return false;
}

void DerivScheme::check_internal(const Expr& f) const {
  for (Symbol s : f.symbols()) {
    bool ok = s.is(SymbolKind::Param) || (s.is(SymbolKind::Independent) && s.index() <= n_) ||
              (s.is(SymbolKind::Fiber) && s.index() <= fibers_) || is_jet(s);
    if (!ok) throw std::invalid_argument("symbol " + s.render() + " is not a coordinate of this chart");
  }
}

Expr DerivScheme::evolution_time_rule(int alpha, int k) const {
  {
    std::lock_guard lock(memo_mu_);
    auto& memo = time_memo_[static_cast<std::size_t>(alpha - 1)];
    if (static_cast<int>(memo.size()) > k) return memo[static_cast<std::size_t>(k)];
  }
  // D_t u_k = D_x (D_t u_{k-1})
  Expr value = k == 0 ? rhs_[static_cast<std::size_t>(alpha - 1)]
                      : total_derivative(1, evolution_time_rule(alpha, k - 1));
  std::lock_guard lock(memo_mu_);
  auto& memo = time_memo_[static_cast<std::size_t>(alpha - 1)];
  while (static_cast<int>(memo.size()) < k) memo.emplace_back();  // filled by the recursion above
  if (static_cast<int>(memo.size()) == k) memo.push_back(value);
  return value;
}

Expr DerivScheme::rule(Symbol s, int i) const {
  check_direction(i);
  switch (s.kind()) {
    case SymbolKind::Independent:
      return s.index() == i ? Expr(1) : Expr(0);
    case SymbolKind::Param:
    case SymbolKind::Fiber:
    case SymbolKind::BaseFiber:
      return Expr(0);
    case SymbolKind::Fc:
      throw std::invalid_argument("E_fc coordinate " + s.render() + " on a jet scheme");
    case SymbolKind::Jet:
      break;
  }
  if (base_) return base_->rule(s, i);
  if (!is_jet(s)) throw std::invalid_argument("symbol " + s.render() + " is not an internal coordinate");
  if (kind_ == Kind::FreeJet) return Expr(Symbol::jet(s.index(), with_index(s.sigma(), i)));
  // Evolution
  if (i == 1) return Expr(Symbol::jet(s.index(), spatial(s.order() + 1)));
  return evolution_time_rule(s.index(), s.order());
}

Expr DerivScheme::total_derivative(int i, const Expr& f) const {
  check_direction(i);
  Expr out;
  for (Symbol s : f.symbols()) {
    Expr r = rule(s, i);
    if (!r.is_zero()) out += r * partial(f, s);
  }
  return out;
}

Expr DerivScheme::total_derivative(const MultiIndex& sigma, const Expr& f) const {
  Expr out = f;
  for (auto it = sigma.rbegin(); it != sigma.rend(); ++it) out = total_derivative(*it, out);
  return out;
}

std::vector<std::pair<Symbol, Expr>> DerivScheme::partial_commutator(Symbol s, int i) const {
  check_direction(i);
  if (base_) {
    if (s.is(SymbolKind::Fiber)) return {};
    return base_->partial_commutator(s, i);
  }
  switch (kind_) {
    case Kind::Coordinate:
      return {};
    case Kind::FreeJet:
      if (s.is(SymbolKind::Jet) && contains_index(s.sigma(), i))
        return {{Symbol::jet(s.index(), without_index(s.sigma(), i)), Expr(1)}};
      return {};
    case Kind::Evolution: {
      if (s.is(SymbolKind::Jet)) {
        if (i == 1) {
          if (s.order() == 0) return {};
          return {{Symbol::jet(s.index(), spatial(s.order() - 1)), Expr(1)}};
        }
        throw std::domain_error("[d/d" + s.render() + ", D_t] has infinitely many components");
      }
      if (i == 2) {
        for (const auto& f : rhs_)
          if (f.depends_on(s))
            throw std::domain_error("[d/d" + s.render() + ", D_t] has infinitely many components");
      }
      return {};
    }
    case Kind::Extended:
      break;
  }
  return {};
}

// ---- horizontal forms -------------------------------------------------------

void HForm::add(std::vector<int> idx, const Expr& coeff) {
  if (coeff.is_zero()) return;
  int sign = 1;
  // insertion sort counting transpositions
  for (std::size_t a = 1; a < idx.size(); ++a)
    for (std::size_t b = a; b > 0 && idx[b - 1] >= idx[b]; --b) {
      if (idx[b - 1] == idx[b]) return;
      std::swap(idx[b - 1], idx[b]);
      sign = -sign;
    }
  Expr& slot = terms[idx];
  slot += sign > 0 ? coeff : -coeff;
  if (slot.is_zero()) terms.erase(idx);
}

HFormResult d_h(const DerivScheme& scheme, const HForm& omega) {
  HFormResult out;
  out.form.degree = omega.degree + 1;
  if (omega.degree >= scheme.directions()) {
    out.top_degree = true;
    return out;
  }
  for (const auto& [idx, coeff] : omega.terms) {
    for (int i = 1; i <= scheme.directions(); ++i) {
      std::vector<int> key{i};
      key.insert(key.end(), idx.begin(), idx.end());
      out.form.add(std::move(key), scheme.total_derivative(i, coeff));
    }
  }
  return out;
}

// ---- evolutionary fields ----------------------------------------------------

Expr evolutionary_apply(const DerivScheme& scheme, const std::vector<Expr>& phi, const Expr& f) {
  if (!scheme.has_jets()) throw std::invalid_argument("evolutionary field needs a jet scheme");
  if (static_cast<int>(phi.size()) != scheme.dependents())
    throw std::invalid_argument("generating function has " + std::to_string(phi.size()) +
                                " components, expected " + std::to_string(scheme.dependents()));
  std::map<Symbol, Expr> memo;  // D_sigma(phi^a) keyed by the jet symbol u^a_sigma
  auto d_sigma = [&](auto&& self, Symbol s) -> Expr {
    auto it = memo.find(s);
    if (it != memo.end()) return it->second;
    Expr value;
    if (s.sigma().empty()) {
      value = phi[static_cast<std::size_t>(s.index() - 1)];
    } else {
      int last = s.sigma().back();
      value = scheme.total_derivative(last, self(self, Symbol::jet(s.index(), without_index(s.sigma(), last))));
    }
    memo.emplace(s, value);
    return value;
  };
  Expr out;
  for (Symbol s : f.symbols()) {
    if (!scheme.is_jet(s)) continue;
    out += d_sigma(d_sigma, s) * partial(f, s);
  }
  return out;
}

std::vector<Expr> symmetry_residuals(const DerivScheme& scheme, const std::vector<Expr>& phi) {
  const DerivScheme& root = scheme.root();
  if (root.kind() != DerivScheme::Kind::Evolution)
    throw std::invalid_argument("symmetry check needs an evolution scheme");
  std::vector<Expr> out;
  for (std::size_t a = 0; a < phi.size(); ++a)
    out.push_back(scheme.total_derivative(2, phi[a]) - evolutionary_apply(scheme, phi, root.rhs()[a]));
  return out;
}

Report is_symmetry_evolution(const DerivScheme& scheme, const std::vector<Expr>& phi) {
  return Report::from_residuals("symmetry", symmetry_residuals(scheme, phi));
}

std::vector<Expr> evolutionary_commutator(const DerivScheme& scheme, const std::vector<Expr>& phi1,
                                          const std::vector<Expr>& phi2) {
  std::vector<Expr> out;
  for (std::size_t a = 0; a < phi1.size(); ++a)
    out.push_back(evolutionary_apply(scheme, phi1, phi2[a]) - evolutionary_apply(scheme, phi2, phi1[a]));
  return out;
}

}  // namespace flatcalc
