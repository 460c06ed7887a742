#include "flatcalc/sdym.hpp"

#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace flatcalc {

// ---- matrices ---------------------------------------------------------------

Matrix zero_matrix(int k) {
  return Matrix(static_cast<std::size_t>(k), std::vector<Expr>(static_cast<std::size_t>(k)));
}

namespace {

std::size_t dim(const Matrix& a) { return a.size(); }

template <class Fn>
Matrix entrywise(const Matrix& a, Fn&& fn) {
  Matrix out = a;
  for (auto& row : out)
    for (auto& e : row) e = fn(e);
  return out;
}

}  // namespace

Matrix operator+(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (std::size_t p = 0; p < dim(a); ++p)
    for (std::size_t q = 0; q < dim(a); ++q) out[p][q] += b[p][q];
  return out;
}

Matrix operator-(const Matrix& a, const Matrix& b) {
  Matrix out = a;
  for (std::size_t p = 0; p < dim(a); ++p)
    for (std::size_t q = 0; q < dim(a); ++q) out[p][q] -= b[p][q];
  return out;
}

Matrix operator*(const Matrix& a, const Matrix& b) {
  Matrix out = zero_matrix(static_cast<int>(dim(a)));
  for (std::size_t p = 0; p < dim(a); ++p)
    for (std::size_t r = 0; r < dim(a); ++r) {
      if (a[p][r].is_zero()) continue;
      for (std::size_t q = 0; q < dim(a); ++q) out[p][q] += a[p][r] * b[r][q];
    }
  return out;
}

Matrix scaled(const Matrix& a, const Expr& f) {
  return entrywise(a, [&](const Expr& e) { return e * f; });
}

Matrix commutator(const Matrix& a, const Matrix& b) { return a * b - b * a; }

bool is_zero(const Matrix& a) {
  for (const auto& row : a)
    for (const auto& e : row)
      if (!e.is_zero()) return false;
  return true;
}

// ---- chart ------------------------------------------------------------------

MatChart::MatChart(int k) : k_(k) {
  if (k < 1) throw std::invalid_argument("matrix size must be positive");
  jets_ = DerivScheme::free_jet(4, 4 * k * k);
  extended_ = DerivScheme::extended(jets_, k);
}

Symbol MatChart::entry(int family, int p, int q, MultiIndex sigma) const {
  if (family < 1 || family > 4 || p < 1 || p > k_ || q < 1 || q > k_)
    throw std::out_of_range("matrix entry out of range");
  return Symbol::jet(dependent(family, p, q), std::move(sigma));
}

MatChart::Entry MatChart::decode(Symbol jet) const {
  if (!jet.is(SymbolKind::Jet) || jet.index() > 4 * k_ * k_) throw std::invalid_argument("not a matrix entry");
  int r = jet.index() - 1;
  int kk = k_ * k_;
  return {r / kk + 1, (r % kk) / k_ + 1, r % k_ + 1};
}

Matrix MatChart::field(int family, const MultiIndex& sigma) const {
  Matrix out = zero_matrix(k_);
  for (int p = 1; p <= k_; ++p)
    for (int q = 1; q <= k_; ++q) out[p - 1][q - 1] = Expr(entry(family, p, q, sigma));
  return out;
}

Matrix MatChart::total_derivative(int direction, const Matrix& m) const {
  return entrywise(m, [&](const Expr& e) { return jets_->total_derivative(direction, e); });
}

std::vector<Expr> MatChart::action(const Matrix& x) const {
  std::vector<Expr> out(static_cast<std::size_t>(k_));
  for (int p = 1; p <= k_; ++p)
    for (int q = 1; q <= k_; ++q) out[p - 1] -= x[p - 1][q - 1] * Expr(Symbol::fiber(q));
  return out;
}

Derivation MatChart::action_field(const Matrix& x) const {
  Derivation d;
  auto coeffs = action(x);
  for (int p = 1; p <= k_; ++p) d.add_partial(Symbol::fiber(p), coeffs[static_cast<std::size_t>(p - 1)]);
  return d;
}

// ---- lambda expansion -------------------------------------------------------

std::array<Matrix, 3> lambda_expand(const MatChart& chart) {
  Symbol lam = Symbol::param("lam");
  Expr L(lam);
  Matrix first = chart.field(1) + scaled(chart.field(3), L);
  Matrix second = chart.field(2) + scaled(chart.field(4), L);
  auto along_first = [&](const Matrix& m) {
    return chart.total_derivative(1, m) + scaled(chart.total_derivative(3, m), L);
  };
  auto along_second = [&](const Matrix& m) {
    return chart.total_derivative(2, m) + scaled(chart.total_derivative(4, m), L);
  };
  Matrix full = along_first(second) - along_second(first) + commutator(first, second);

  std::array<Matrix, 3> out{zero_matrix(chart.k()), zero_matrix(chart.k()), zero_matrix(chart.k())};
  for (int p = 0; p < chart.k(); ++p)
    for (int q = 0; q < chart.k(); ++q)
      for (const auto& [power, coeff] : collect_param(full[p][q], lam)) {
        if (power > 2) throw std::logic_error("unexpected power of lam in the zero-curvature condition");
        out[power][p][q] = coeff;
      }
  return out;
}

// ---- rewriting --------------------------------------------------------------

struct SdymRewriter::State {
  MatChart chart;
  Strategy strategy;
  std::array<Matrix, 5> rhs;  // by family; empty for family 1
  std::array<int, 5> lead{0, 0, 1, 4, 1};
  std::mutex mu;
  std::map<Symbol, Expr> memo;

  State(const MatChart& c, Strategy s) : chart(c), strategy(s) {}

  bool reducible(int family, const MultiIndex& sigma) const {
    int l = lead[static_cast<std::size_t>(family)];
    return l != 0 && contains_index(sigma, l);
  }

  bool is_normal(Symbol s) const {
    if (!s.is(SymbolKind::Jet) || s.index() > 4 * chart.k() * chart.k()) return true;
    return !reducible(chart.decode(s).family, s.sigma());
  }

  Expr normal_expr(const Expr& f) {
    Bindings b;
    for (Symbol s : f.symbols())
      if (!is_normal(s)) b.emplace(s, normal_symbol(s));
    return b.empty() ? f : substitute(f, b);
  }

  Expr normal_symbol(Symbol s) {
    if (is_normal(s)) return Expr(s);
    {
      std::lock_guard lock(mu);
      auto it = memo.find(s);
      if (it != memo.end()) return it->second;
    }
    auto [family, p, q] = chart.decode(s);
    const MultiIndex& sigma = s.sigma();
    const Expr& base = rhs[static_cast<std::size_t>(family)][p - 1][q - 1];
    Expr value;
    if (strategy == Strategy::Direct || sigma.size() == 1) {
      value = normal_expr(chart.jets()->total_derivative(without_index(sigma, lead[static_cast<std::size_t>(family)]), base));
    } else {
      int j = sigma.back();
      if (!reducible(family, without_index(sigma, j))) j = sigma.front();
      Expr lower = normal_symbol(chart.entry(family, p, q, without_index(sigma, j)));
      value = normal_expr(chart.jets()->total_derivative(j, lower));
    }
    std::lock_guard lock(mu);
    memo.emplace(s, value);
    return value;
  }
};

SdymRewriter::SdymRewriter(const MatChart& chart, Strategy strategy)
    : state_(std::make_shared<State>(chart, strategy)) {
  auto eqs = lambda_expand(chart);
  // each equation is solved for its leading jet, which enters linearly
  const std::array<std::pair<int, int>, 3> solved{{{2, 0}, {4, 1}, {3, 2}}};
  for (auto [family, eq] : solved) {
    int l = state_->lead[static_cast<std::size_t>(family)];
    Matrix rhs = zero_matrix(chart.k());
    for (int p = 1; p <= chart.k(); ++p)
      for (int q = 1; q <= chart.k(); ++q) {
        Symbol leading = chart.entry(family, p, q, {l});
        const Expr& e = eqs[static_cast<std::size_t>(eq)][p - 1][q - 1];
        Expr c = partial(e, leading);
        if (!c.is_constant() || c.is_zero()) throw std::logic_error("leading jet does not enter linearly");
        Expr rest = e - c * Expr(leading);
        rhs[p - 1][q - 1] = rest.scaled(Rational(-1) / c.constant_term());
      }
    state_->rhs[static_cast<std::size_t>(family)] = std::move(rhs);
  }
}

bool SdymRewriter::is_normal(Symbol s) const { return state_->is_normal(s); }
Expr SdymRewriter::normal(Symbol s) const { return state_->normal_symbol(s); }
Expr SdymRewriter::normal(const Expr& f) const { return state_->normal_expr(f); }

Matrix SdymRewriter::normal(const Matrix& m) const {
  return entrywise(m, [&](const Expr& e) { return normal(e); });
}

Reducer SdymRewriter::reducer() const {
  auto st = state_;
  return [st](const Expr& f) { return st->normal_expr(f); };
}

// ---- flat representation ----------------------------------------------------

FlatRepSpec sdym_flatrep(const MatChart& chart, const std::optional<Rational>& lambda_value) {
  Expr L = lambda_value ? Expr(*lambda_value) : Expr(Symbol::param("lam"));
  FlatRepSpec spec;
  spec.scheme = chart.extended();
  for (int i = 1; i <= 2; ++i) {
    Derivation h = Derivation::total(i);
    if (!L.is_zero()) h.add_total(i + 2, L);
    spec.horizontal.push_back(h);
    spec.coeffs.push_back(chart.action(chart.field(i) + scaled(chart.field(i + 2), L)));
  }
  spec.reduce = SdymRewriter(chart).reducer();
  spec.validate();
  return spec;
}

Deformation sdym_lambda_cocycle(const MatChart& chart, const Rational& lambda_value) {
  return infinitesimal_deformation(sdym_flatrep(chart, std::nullopt), Symbol::param("lam"), lambda_value);
}

AnsatzSpec sdym_ansatz(const MatChart& chart, unsigned degree, int order, bool with_coordinates) {
  SdymRewriter rw(chart);
  AnsatzSpec a;
  for (int p = 1; p <= chart.k(); ++p) a.symbols.push_back(Symbol::fiber(p));
  if (with_coordinates)
    for (int i = 1; i <= 4; ++i) a.symbols.push_back(Symbol::independent(i));
  std::vector<MultiIndex> indices{{}};
  for (std::size_t start = 0; start < indices.size(); ++start) {
    MultiIndex base = indices[start];
    if (static_cast<int>(base.size()) >= order) continue;
    for (int i = base.empty() ? 1 : base.back(); i <= 4; ++i) indices.push_back(with_index(base, i));
  }
  for (int family = 1; family <= 4; ++family)
    for (int p = 1; p <= chart.k(); ++p)
      for (int q = 1; q <= chart.k(); ++q)
        for (const auto& sigma : indices) {
          Symbol s = chart.entry(family, p, q, sigma);
          if (rw.is_normal(s)) a.symbols.push_back(s);
        }
  a.max_degree = degree;
  a.label = "degree<=" + std::to_string(degree) + ", order<=" + std::to_string(order);
  if (with_coordinates) a.label += ", with x";
  return a;
}

ExactnessResult sdym_cocycle_exactness(const MatChart& chart, const Rational& lambda_value, const AnsatzSpec& ansatz) {
  auto cocycle = sdym_lambda_cocycle(chart, lambda_value);
  return exactness_test(sdym_flatrep(chart, lambda_value), cocycle.cocycle, ansatz, {3, 4});
}

// ---- gauge symmetries -------------------------------------------------------

std::array<Matrix, 4> gauge_symmetry(const MatChart& chart, const Matrix& h) {
  std::array<Matrix, 4> out;
  for (int i = 1; i <= 4; ++i)
    out[static_cast<std::size_t>(i - 1)] = chart.total_derivative(i, h) - commutator(h, chart.field(i));
  return out;
}

std::vector<Expr> gauge_characteristic(const MatChart& chart, const Matrix& h) {
  auto g = gauge_symmetry(chart, h);
  std::vector<Expr> phi(static_cast<std::size_t>(4 * chart.k() * chart.k()));
  for (int i = 1; i <= 4; ++i)
    for (int p = 1; p <= chart.k(); ++p)
      for (int q = 1; q <= chart.k(); ++q)
        phi[static_cast<std::size_t>(chart.dependent(i, p, q) - 1)] = g[static_cast<std::size_t>(i - 1)][p - 1][q - 1];
  return phi;
}

Report gauge_symmetry_check(const MatChart& chart, const Matrix& h) {
  SdymRewriter rw(chart);
  auto phi = gauge_characteristic(chart, h);
  std::vector<Expr> residuals;
  for (const auto& eq : lambda_expand(chart))
    for (const auto& row : eq)
      for (const auto& e : row) residuals.push_back(rw.normal(evolutionary_apply(*chart.jets(), phi, e)));
  return Report::from_residuals("gauge-symmetry", residuals);
}

Report verify_ugh(const MatChart& chart, const Matrix& h, const std::optional<Derivation>& replacement) {
  FlatRepSpec spec = sdym_flatrep(chart, std::nullopt);
  auto phi = gauge_characteristic(chart, h);
  Derivation v = replacement ? *replacement : chart.action_field(h);
  VForm rhs = differential(spec, v).scaled(Expr(-1));

  std::vector<Expr> residuals;
  for (int i = 1; i <= 2; ++i) {
    Derivation right = rhs.component({Symbol::independent(i)});
    for (int p = 1; p <= chart.k(); ++p) {
      // [F_i, Ev_G](w_p) = -Ev_G(a_i^p)
      Expr left = -spec.normal(evolutionary_apply(*spec.scheme, phi, spec.coeff(i, p)));
      residuals.push_back(spec.normal(left - right.partial_coeff(Symbol::fiber(p))));
    }
    for (const auto& [dir, c] : right.schematic()) residuals.push_back(c);
    for (const auto& [s, c] : right.partials())
      if (!s.is(SymbolKind::Fiber)) residuals.push_back(c);
  }
  return Report::from_residuals("sdym-ugh", residuals);
}

}  // namespace flatcalc
