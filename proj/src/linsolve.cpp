#include "flatcalc/linsolve.hpp"

#include <algorithm>
#include <map>
#include <sstream>
#include <stdexcept>

#include "flatcalc/report.hpp"

namespace flatcalc {

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass:
      return "pass";
    case Verdict::Fail:
      return "fail";
    case Verdict::Witness:
      return "witness";
    case Verdict::BoundedNo:
      return "bounded-no";
  }
  return "?";
}

Report Report::from_residuals(std::string task, const std::vector<Expr>& residuals) {
  Report r;
  r.task = std::move(task);
  bool all_zero = true;
  for (const auto& e : residuals) {
    r.residuals.push_back(e.render());
    all_zero = all_zero && e.is_zero();
  }
  if (r.residuals.empty()) r.residuals.push_back("0");
  r.verdict = all_zero ? Verdict::Pass : Verdict::Fail;
  return r;
}

// ---- ansatz -----------------------------------------------------------------

std::vector<Monomial> AnsatzSpec::monomials() const {
  std::vector<Symbol> syms = symbols;
  std::sort(syms.begin(), syms.end());
  syms.erase(std::unique(syms.begin(), syms.end()), syms.end());

  std::vector<Monomial> out;
  std::vector<Monomial::Factor> current;
  auto within_caps = [&](const std::vector<Monomial::Factor>& fs) {
    for (const auto& cap : caps) {
      unsigned d = 0;
      for (const auto& [s, e] : fs)
        if (cap.group.count(s)) d += e;
      if (d > cap.max_degree) return false;
    }
    return true;
  };
  // depth-first over symbols, choosing an exponent for each
  auto rec = [&](auto&& self, std::size_t idx, unsigned budget) -> void {
    if (!within_caps(current)) return;
    if (idx == syms.size()) {
      out.push_back(Monomial::from_factors(current));
      return;
    }
    for (unsigned e = 0; e <= budget; ++e) {
      if (e) current.emplace_back(syms[idx], e);
      self(self, idx + 1, budget - e);
      if (e) current.pop_back();
      if (e && !within_caps({{syms[idx], e}})) break;
    }
  };
  rec(rec, 0, max_degree);
  std::sort(out.begin(), out.end(), MonomialLess{});
  return out;
}

std::vector<Symbol> AnsatzSpec::undetermined(const std::string& prefix) const {
  std::vector<Symbol> out;
  std::size_t n = monomials().size();
  for (std::size_t k = 1; k <= n; ++k) out.push_back(Symbol::param(prefix + std::to_string(k)));
  return out;
}

Expr AnsatzSpec::generic(const std::string& prefix) const {
  auto basis = monomials();
  auto coeffs = undetermined(prefix);
  Expr out;
  for (std::size_t k = 0; k < basis.size(); ++k)
    out += Expr(coeffs[k]) * Expr(basis[k], Rational(1));
  return out;
}

std::string AnsatzSpec::describe() const {
  if (!label.empty()) return label;
  std::ostringstream os;
  os << "degree<=" << max_degree << " in {";
  for (std::size_t k = 0; k < symbols.size(); ++k) os << (k ? "," : "") << symbols[k].render();
  os << '}';
  return os.str();
}

// ---- linear system ----------------------------------------------------------

namespace {

using SparseRow = std::vector<std::pair<std::size_t, Rational>>;  // sorted by column

// row += factor * other
void axpy(SparseRow& row, const Rational& factor, const SparseRow& other) {
  SparseRow merged;
  merged.reserve(row.size() + other.size());
  auto a = row.begin();
  auto b = other.begin();
  while (a != row.end() || b != other.end()) {
    if (b == other.end() || (a != row.end() && a->first < b->first)) {
      merged.push_back(std::move(*a++));
    } else if (a == row.end() || b->first < a->first) {
      merged.emplace_back(b->first, factor * b->second);
      ++b;
    } else {
      Rational c = a->second + factor * b->second;
      if (c != 0) merged.emplace_back(a->first, std::move(c));
      ++a;
      ++b;
    }
  }
  row = std::move(merged);
}

}  // namespace

std::size_t LinearSystem::add_unknown(std::vector<Expr> image) {
  if (image.size() != components_) throw std::invalid_argument("image has wrong component count");
  images_.push_back(std::move(image));
  return images_.size() - 1;
}

LinearSolution LinearSystem::solve(const std::vector<Expr>& target) const {
  if (target.size() != components_) throw std::invalid_argument("target has wrong component count");
  const std::size_t n = images_.size();
  const std::size_t rhs_col = n;  // augmented column sorts last

  // one row per (component, monomial)
  std::vector<std::map<Monomial, SparseRow, MonomialLess>> rows(components_);
  for (std::size_t k = 0; k < n; ++k)
    for (std::size_t c = 0; c < components_; ++c)
      for (const auto& [m, coeff] : images_[k][c].terms()) rows[c][m].emplace_back(k, coeff);
  for (std::size_t c = 0; c < components_; ++c)
    for (const auto& [m, coeff] : target[c].terms()) rows[c][m].emplace_back(rhs_col, coeff);

  LinearSolution sol;
  sol.unknowns = n;
  std::map<std::size_t, SparseRow> pivots;
  for (auto& comp : rows) {
    for (auto& [m, row] : comp) {
      // columns were appended in increasing k order, rhs last
      while (!row.empty() && row.front().first != rhs_col) {
        auto it = pivots.find(row.front().first);
        if (it == pivots.end()) break;
        Rational f = -row.front().second;
        axpy(row, f, it->second);
      }
      if (row.empty()) continue;
      if (row.front().first == rhs_col) return sol;  // 0 = nonzero
      Rational lead = row.front().second;
      for (auto& e : row) e.second /= lead;
      std::size_t col = row.front().first;
      pivots.emplace(col, std::move(row));
    }
  }
  sol.consistent = true;
  sol.rank = pivots.size();
  sol.values.assign(n, Rational(0));
  for (auto it = pivots.rbegin(); it != pivots.rend(); ++it) {
    Rational v = 0;
    for (const auto& [col, c] : it->second) {
      if (col == it->first) continue;
      if (col == rhs_col)
        v += c;
      else
        v -= c * sol.values[col];
    }
    sol.values[it->first] = v;
  }
  return sol;
}

}  // namespace flatcalc
