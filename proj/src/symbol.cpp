#include "flatcalc/symbol.hpp"

#include <algorithm>
#include <memory>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace flatcalc {
namespace {

struct DataHash {
  std::size_t operator()(const SymbolData& d) const noexcept {
    std::size_t h = std::hash<int>{}(static_cast<int>(d.kind)) * 1000003u ^
                    std::hash<int>{}(d.index);
    for (int v : d.first) h = h * 31u + static_cast<std::size_t>(v);
    h = h * 131u + 7u;
    for (int v : d.second) h = h * 37u + static_cast<std::size_t>(v);
    return h ^ std::hash<std::string>{}(d.name);
  }
};

class Registry {
 public:
  const SymbolData* get(SymbolData data) {
    std::lock_guard lock(mu_);
    auto it = table_.find(data);
    if (it != table_.end()) return it->second.get();
    auto owned = std::make_unique<SymbolData>(data);
    const SymbolData* raw = owned.get();
    table_.emplace(std::move(data), std::move(owned));
    return raw;
  }

 private:
  std::mutex mu_;
  std::unordered_map<SymbolData, std::unique_ptr<SymbolData>, DataHash> table_;
};

Registry& registry() {
  static Registry r;
  return r;
}

void require_positive(int v, const char* what) {
  if (v < 1) throw std::invalid_argument(std::string("symbol index must be positive: ") + what);
}

void append_list(std::ostringstream& os, const MultiIndex& idx) {
  for (std::size_t k = 0; k < idx.size(); ++k) {
    if (k) os << ',';
    os << idx[k];
  }
}

}  // namespace

Symbol Symbol::intern(SymbolData data) { return Symbol(registry().get(std::move(data))); }

Symbol Symbol::independent(int i) {
  require_positive(i, "independent");
  return intern({SymbolKind::Independent, i, {}, {}, {}});
}

Symbol Symbol::base_fiber(int alpha) {
  require_positive(alpha, "fiber");
  return intern({SymbolKind::BaseFiber, alpha, {}, {}, {}});
}

Symbol Symbol::fiber(int beta) {
  require_positive(beta, "extension fiber");
  return intern({SymbolKind::Fiber, beta, {}, {}, {}});
}

Symbol Symbol::jet(int alpha, MultiIndex sigma) {
  require_positive(alpha, "jet");
  for (int s : sigma) require_positive(s, "jet multi-index");
  std::sort(sigma.begin(), sigma.end());
  return intern({SymbolKind::Jet, alpha, std::move(sigma), {}, {}});
}

Symbol Symbol::fc(int alpha, MultiIndex I, MultiIndex A) {
  require_positive(alpha, "fc");
  for (int s : I) require_positive(s, "fc lower multi-index");
  for (int s : A) require_positive(s, "fc upper multi-index");
  if (I.empty()) {
    if (!A.empty())
      throw std::invalid_argument("v_I^{alpha,A} with empty I requires empty A");
    return base_fiber(alpha);
  }
  std::sort(I.begin(), I.end());
  std::sort(A.begin(), A.end());
  return intern({SymbolKind::Fc, alpha, std::move(I), std::move(A), {}});
}

Symbol Symbol::param(const std::string& name) {
  if (name.empty()) throw std::invalid_argument("empty parameter name");
  return intern({SymbolKind::Param, 0, {}, {}, name});
}

std::string Symbol::render() const {
  std::ostringstream os;
  switch (d_->kind) {
    case SymbolKind::Param:
      os << d_->name;
      break;
    case SymbolKind::Independent:
      os << 'x' << d_->index;
      break;
    case SymbolKind::BaseFiber:
      os << 'v' << d_->index;
      break;
    case SymbolKind::Fiber:
      os << 'y' << d_->index;
      break;
    case SymbolKind::Jet: {
      bool spatial = d_->index == 1 &&
                     std::all_of(d_->first.begin(), d_->first.end(), [](int s) { return s == 1; });
      if (spatial) {
        os << "u[" << d_->first.size() << ']';
      } else {
        os << 'u' << d_->index << '[';
        append_list(os, d_->first);
        os << ']';
      }
      break;
    }
    case SymbolKind::Fc:
      os << "v[" << d_->index << ';';
      append_list(os, d_->first);
      os << ';';
      append_list(os, d_->second);
      os << ']';
      break;
  }
  return os.str();
}

std::strong_ordering operator<=>(Symbol a, Symbol b) {
  if (a.d_ == b.d_) return std::strong_ordering::equal;
  const SymbolData& x = *a.d_;
  const SymbolData& y = *b.d_;
  if (auto c = static_cast<int>(x.kind) <=> static_cast<int>(y.kind); c != 0) return c;
  if (auto c = x.index <=> y.index; c != 0) return c;
  if (auto c = x.first <=> y.first; c != 0) return c;
  if (auto c = x.second <=> y.second; c != 0) return c;
  return x.name <=> y.name;
}

MultiIndex with_index(MultiIndex idx, int extra) {
  idx.insert(std::upper_bound(idx.begin(), idx.end(), extra), extra);
  return idx;
}

MultiIndex without_index(MultiIndex idx, int value) {
  auto it = std::find(idx.begin(), idx.end(), value);
  if (it == idx.end()) throw std::logic_error("index not present in multi-index");
  idx.erase(it);
  return idx;
}

bool contains_index(const MultiIndex& idx, int value) {
  return std::find(idx.begin(), idx.end(), value) != idx.end();
}

}  // namespace flatcalc
