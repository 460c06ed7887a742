#pragma once

#include <compare>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

namespace flatcalc {

/// Kind tag of a symbol. The enumerator order is the primary sort key of
/// the symbol order, so it must never be reshuffled.
enum class SymbolKind : int {
  Param = 0,       // formal parameter (lam, eps, ...)
  Independent = 1, // x_i
  BaseFiber = 2,   // v^alpha (also the E_fc coordinate v_{}^{alpha,{}})
  Fiber = 3,       // y^beta, extra fiber direction of an extended scheme
  Jet = 4,         // u^alpha_sigma
  Fc = 5,          // v_I^{alpha,A} with |I| >= 1
};

using MultiIndex = std::vector<int>;

struct SymbolData {
  SymbolKind kind;
  int index; // i, alpha or beta; unused for Param
  MultiIndex first;  // sigma (Jet) or I (Fc), sorted
  MultiIndex second; // A (Fc), sorted
  std::string name;  // Param only

  friend bool operator==(const SymbolData&, const SymbolData&) = default;
};

/// Interned, immutable symbol handle. Equality is identity of the interned
/// record; ordering compares contents and is independent of interning order.
class Symbol {
 public:
  static Symbol independent(int i);
  static Symbol base_fiber(int alpha);
  static Symbol fiber(int beta);
  static Symbol jet(int alpha, MultiIndex sigma);
  /// v_I^{alpha,A}. With I and A empty this is the base fiber coordinate v^alpha.
  static Symbol fc(int alpha, MultiIndex I, MultiIndex A);
  static Symbol param(const std::string& name);

  SymbolKind kind() const { return d_->kind; }
  int index() const { return d_->index; }
  const MultiIndex& sigma() const { return d_->first; }
  const MultiIndex& upper_i() const { return d_->first; }
  const MultiIndex& upper_a() const { return d_->second; }
  const std::string& name() const { return d_->name; }

  bool is(SymbolKind k) const { return d_->kind == k; }
  /// Total number of derivative indices (|sigma| for jets, |I| for Fc).
  int order() const { return static_cast<int>(d_->first.size()); }

  std::string render() const;

  friend bool operator==(Symbol a, Symbol b) { return a.d_ == b.d_; }
  friend std::strong_ordering operator<=>(Symbol a, Symbol b);

  std::size_t hash() const { return std::hash<const void*>{}(d_); }

 private:
  explicit Symbol(const SymbolData* d) : d_(d) {}
  static Symbol intern(SymbolData data);
  const SymbolData* d_;
};

/// Returns `idx` with `extra` inserted, kept sorted.
MultiIndex with_index(MultiIndex idx, int extra);
/// Returns `idx` with one occurrence of `value` removed; `value` must be present.
MultiIndex without_index(MultiIndex idx, int value);
bool contains_index(const MultiIndex& idx, int value);

}  // namespace flatcalc

template <>
struct std::hash<flatcalc::Symbol> {
  std::size_t operator()(flatcalc::Symbol s) const noexcept { return s.hash(); }
};
