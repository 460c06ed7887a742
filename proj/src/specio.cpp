#include "flatcalc/specio.hpp"

#include <algorithm>
#include <cctype>
#include <iomanip>
#include <regex>
#include <set>
#include <sstream>

#include "json.hpp"

namespace flatcalc {

ParseError::ParseError(int line, int column, const std::string& message)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " +
                                        message
                                  : message),
      line_(line),
      column_(column) {}

namespace {

// ---- expressions --------------------------------------------------------------

std::vector<int> parse_index_list(const std::string& s, int line, int col) {
  std::vector<int> out;
  std::string cur;
  auto flush = [&] {
    std::string t;
    for (char c : cur)
      if (!std::isspace(static_cast<unsigned char>(c))) t += c;
    if (t.empty()) throw ParseError(line, col, "empty index in list");
    if (!std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw ParseError(line, col, "bad index '" + t + "'");
    out.push_back(std::stoi(t));
    cur.clear();
  };
  if (std::all_of(s.begin(), s.end(), [](char c) { return std::isspace(static_cast<unsigned char>(c)); })) return out;
  for (char c : s) {
    if (c == ',')
      flush();
    else
      cur += c;
  }
  flush();
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out{""};
  for (char c : s) {
    if (c == sep)
      out.emplace_back();
    else
      out.back() += c;
  }
  return out;
}

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

class ExprParser {
 public:
  ExprParser(const std::string& text, const ChartDecl& chart, int line, int column)
      : s_(text), chart_(chart), line_(line), col0_(column) {}

  Expr parse() {
    Expr e = sum();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

  Symbol resolve(const std::string& name, const std::optional<std::string>& bracket, std::size_t at) {
    auto error = [&](const std::string& msg) { throw ParseError(line_, col0_ + static_cast<int>(at), msg); };
    std::string full = name + (bracket ? "[" + *bracket + "]" : "");
    if (!bracket && std::find(chart_.params.begin(), chart_.params.end(), name) != chart_.params.end())
      return Symbol::param(name);
    std::size_t d = name.size();
    while (d > 0 && std::isdigit(static_cast<unsigned char>(name[d - 1]))) --d;
    std::string base = name.substr(0, d);
    std::optional<int> idx;
    if (d < name.size()) idx = std::stoi(name.substr(d));
    bool evolution = chart_.kind == ChartKind::Evolution;
    bool jets = evolution || chart_.kind == ChartKind::Jet;
    bool fc_like = chart_.kind == ChartKind::Coordinate || chart_.kind == ChartKind::Fc;
    int n = evolution ? 2 : chart_.n;

    if (!bracket && evolution && (name == "x" || name == "t")) return Symbol::independent(name == "x" ? 1 : 2);
    if (!bracket && base == "x" && idx) {
      if (*idx < 1 || *idx > n) error("index of " + full + " out of range 1.." + std::to_string(n));
      return Symbol::independent(*idx);
    }
    if (!bracket && base == "y" && chart_.fibers > 0) {
      int k = idx.value_or(chart_.fibers == 1 ? 1 : 0);
      if (k < 1 || k > chart_.fibers) error("fiber " + full + " out of range 1.." + std::to_string(chart_.fibers));
      return Symbol::fiber(k);
    }
    if (fc_like && base == "v") {
      if (!bracket) {
        int a = idx.value_or(chart_.m == 1 ? 1 : 0);
        if (a < 1 || a > chart_.m) error("fiber " + full + " out of range 1.." + std::to_string(chart_.m));
        return Symbol::base_fiber(a);
      }
      if (chart_.kind != ChartKind::Fc || idx) error("undeclared variable " + full);
      auto parts = split(*bracket, ';');
      if (parts.size() != 3) error("expected v[alpha;I;A] in " + full);
      auto alpha = parse_index_list(parts[0], line_, col0_ + static_cast<int>(at));
      if (alpha.size() != 1) error("expected one fiber index in " + full);
      auto I = parse_index_list(parts[1], line_, col0_ + static_cast<int>(at));
      auto A = parse_index_list(parts[2], line_, col0_ + static_cast<int>(at));
      if (alpha[0] < 1 || alpha[0] > chart_.m) error("fiber index out of range in " + full);
      for (int i : I)
        if (i < 1 || i > chart_.n) error("direction index out of range in " + full);
      for (int b : A)
        if (b < 1 || b > chart_.m) error("fiber index out of range in " + full);
      std::sort(I.begin(), I.end());
      std::sort(A.begin(), A.end());
      if (I.empty() && !A.empty()) error("v[alpha;;A] needs a nonempty I");
      return Symbol::fc(alpha[0], I, A);
    }
    if (jets && base == "u" && bracket) {
      auto list = parse_index_list(*bracket, line_, col0_ + static_cast<int>(at));
      MultiIndex sigma;
      int alpha = 1;
      if (!idx) {
        if (list.size() != 1) error("expected u[k] in " + full);
        sigma.assign(static_cast<std::size_t>(list[0]), 1);
      } else {
        alpha = *idx;
        sigma = list;
      }
      if (alpha < 1 || alpha > chart_.m) error("dependent index out of range in " + full);
      int dirs = evolution ? 1 : chart_.n;
      for (int s : sigma)
        if (s < 1 || s > dirs) error("derivative index out of range in " + full);
      std::sort(sigma.begin(), sigma.end());
      return Symbol::jet(alpha, sigma);
    }
    error("undeclared variable " + full);
    return Symbol::independent(1);  // unreachable
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw ParseError(line_, col0_ + static_cast<int>(pos_), msg);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool accept(char c) {
    skip();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  Expr sum() {
    Expr e = product();
    for (;;) {
      if (accept('+'))
        e += product();
      else if (accept('-'))
        e -= product();
      else
        return e;
    }
  }

  Expr product() {
    Expr e = unary();
    for (;;) {
      if (accept('*')) {
        e *= unary();
      } else if (accept('/')) {
        std::size_t at = pos_;
        Expr d = unary();
        if (!d.is_constant() || d.is_zero()) {
          pos_ = at;
          fail("division only by a nonzero constant");
        }
        e = e.scaled(Rational(1) / d.constant_term());
      } else {
        return e;
      }
    }
  }

  Expr unary() {
    if (accept('-')) return -unary();
    if (accept('+')) return unary();
    return power();
  }

  Expr power() {
    Expr base = atom();
    if (accept('^')) {
      skip();
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      if (start == pos_) fail("expected a non-negative integer exponent");
      base = base.pow(static_cast<unsigned>(std::stoul(s_.substr(start, pos_ - start))));
    }
    return base;
  }

  Expr atom() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      Expr e = sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = pos_;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      return Expr(Rational(mpz_class(s_.substr(start, pos_ - start))));
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      std::string name = s_.substr(start, pos_ - start);
      std::optional<std::string> bracket;
      if (pos_ < s_.size() && s_[pos_] == '[') {
        auto close = s_.find(']', pos_);
        if (close == std::string::npos) fail("unterminated '['");
        bracket = s_.substr(pos_ + 1, close - pos_ - 1);
        pos_ = close + 1;
      }
      return Expr(resolve(name, bracket, start));
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  const std::string& s_;
  const ChartDecl& chart_;
  int line_;
  int col0_;
  std::size_t pos_ = 0;
};

// ---- file structure -----------------------------------------------------------

const std::vector<std::string> kKnownSections{"chart",    "connection", "equation", "flatrep", "covering", "symmetry",
                                              "cochain",  "cocycle",    "pullback", "ansatz",  "task"};

int to_int(const Binding& b, int lo) {
  const std::string& t = b.text;
  if (t.empty() || !std::all_of(t.begin(), t.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
    throw ParseError(b.line, b.column, "expected an integer for " + b.lhs);
  int v = std::stoi(t);
  if (v < lo) throw ParseError(b.line, b.column, b.lhs + " must be at least " + std::to_string(lo));
  return v;
}

std::vector<std::string> name_list(const Binding& b) {
  std::vector<std::string> out;
  for (auto& part : split(b.text, ',')) {
    std::string t = trim(part);
    if (t.empty()) throw ParseError(b.line, b.column, "empty entry in " + b.lhs);
    out.push_back(t);
  }
  return out;
}

// lhs shapes: name, name<k>, name<k>[list], name[list], name_t, name<k>_t
struct Lhs {
  std::string base;
  std::optional<int> index;
  std::optional<std::string> bracket;
  bool time = false;
};

Lhs split_lhs(const Binding& b) {
  static const std::regex re(R"(^([A-Za-z]+)([0-9]*)(\[([^\]]*)\])?(_t)?$)");
  std::smatch m;
  if (!std::regex_match(b.lhs, m, re)) throw ParseError(b.line, 1, "malformed left-hand side '" + b.lhs + "'");
  Lhs out;
  out.base = m[1];
  if (m[2].length()) out.index = std::stoi(m[2]);
  if (m[3].matched) out.bracket = m[4];
  out.time = m[5].matched;
  return out;
}

void range(const Binding& b, int v, int hi, const std::string& what) {
  if (v < 1 || v > hi)
    throw ParseError(b.line, 1, what + " index " + std::to_string(v) + " in '" + b.lhs + "' out of range 1.." +
                                    std::to_string(hi));
}

int single_index(const Binding& b, const Lhs& l, int hi, const std::string& what) {
  if (l.bracket) throw ParseError(b.line, 1, "unexpected bracket in '" + b.lhs + "'");
  int v = l.index.value_or(hi == 1 ? 1 : 0);
  if (!l.index && hi != 1) throw ParseError(b.line, 1, "'" + b.lhs + "' needs an index");
  range(b, v, hi, what);
  return v;
}

}  // namespace

Expr parse_expression(const std::string& text, const ChartDecl& chart, int line, int column) {
  return ExprParser(text, chart, line, column).parse();
}

const Binding* Section::find(const std::string& lhs) const {
  for (const auto& b : bindings)
    if (b.lhs == lhs) return &b;
  return nullptr;
}

const Section* ProblemFile::section(const std::string& name) const {
  for (const auto& s : sections)
    if (s.name == name) return &s;
  return nullptr;
}

FcChart ProblemFile::fc_chart() const {
  if (chart.kind == ChartKind::Evolution || chart.kind == ChartKind::Jet)
    return FcChart(static_cast<int>(flatrep.size()), chart.fibers);
  return FcChart(chart.n, chart.m);
}

SchemePtr ProblemFile::base_scheme() const {
  switch (chart.kind) {
    case ChartKind::Evolution:
      return DerivScheme::evolution(equation);
    case ChartKind::Jet:
      return DerivScheme::free_jet(chart.n, chart.m);
    default:
      return DerivScheme::coordinate(chart.n);
  }
}

FlatRepSpec ProblemFile::flatrep_spec() const {
  if (flatrep.empty()) throw std::invalid_argument("problem has no flat representation");
  return FlatRepSpec::make(DerivScheme::extended(base_scheme(), chart.fibers), flatrep);
}

AnsatzSpec ProblemFile::flatrep_ansatz(unsigned deg, int ord) const {
  AnsatzSpec a;
  if (!ansatz_symbols.empty()) {
    a.symbols = ansatz_symbols;
  } else {
    for (const auto& p : chart.params) a.symbols.push_back(Symbol::param(p));
    for (int i = 1; i <= chart.n; ++i) a.symbols.push_back(Symbol::independent(i));
    for (int k = 1; k <= chart.fibers; ++k) a.symbols.push_back(Symbol::fiber(k));
    int dirs = chart.kind == ChartKind::Evolution ? 1 : chart.n;
    std::vector<MultiIndex> indices{{}};
    for (std::size_t s = 0; s < indices.size(); ++s) {
      MultiIndex base = indices[s];
      if (static_cast<int>(base.size()) >= ord) continue;
      for (int i = base.empty() ? 1 : base.back(); i <= dirs; ++i) indices.push_back(with_index(base, i));
    }
    for (int alpha = 1; alpha <= chart.m; ++alpha)
      for (const auto& sigma : indices) a.symbols.push_back(Symbol::jet(alpha, sigma));
  }
  a.max_degree = deg;
  a.label = "degree<=" + std::to_string(deg) + ", order<=" + std::to_string(ord);
  return a;
}

std::vector<std::string> required_sections(const std::string& task) {
  static const std::map<std::string, std::vector<std::string>> table{
      {"check-flat", {"connection"}},
      {"dfc", {"cochain"}},
      {"symmetry-from-f", {"symmetry"}},
      {"recover-f", {"cochain"}},
      {"bracket", {"symmetry"}},
      {"check-flatrep", {"flatrep|covering"}},
      {"pullback", {"flatrep|covering", "pullback"}},
      {"deformation", {"flatrep"}},
      {"exactness", {"flatrep|covering", "cocycle"}},
      {"lift", {"flatrep|covering", "symmetry"}},
      {"kdv-verify", {}},
      {"kdv-lift", {}},
      {"kdv-deformation", {}},
      {"sdym-expand", {}},
      {"sdym-flatrep", {}},
      {"sdym-ugh", {}},
  };
  auto it = table.find(task);
  if (it == table.end()) throw std::invalid_argument("unknown task '" + task + "'");
  return it->second;
}

ProblemFile parse_problem(const std::string& text, const std::optional<std::string>& task) {
  ProblemFile file;

  // pass 1: sections and raw bindings
  std::istringstream in(text);
  std::string raw;
  int line_no = 0;
  std::set<std::string> seen;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string line = raw.substr(0, raw.find('#'));
    std::string t = trim(line);
    if (t.empty()) continue;
    if (t.front() == '[') {
      if (t.back() != ']') throw ParseError(line_no, static_cast<int>(line.find('[')) + 1, "expected ']'");
      std::string name = trim(t.substr(1, t.size() - 2));
      if (std::find(kKnownSections.begin(), kKnownSections.end(), name) == kKnownSections.end())
        throw ParseError(line_no, static_cast<int>(line.find('[')) + 2, "unknown section '" + name + "'");
      if (!seen.insert(name).second) throw ParseError(line_no, 1, "duplicate section '" + name + "'");
      file.sections.push_back({name, line_no, {}});
      continue;
    }
    if (file.sections.empty()) throw ParseError(line_no, 1, "binding outside of a section");
    // several bindings may share a line, separated by ';' outside brackets
    std::size_t start = 0;
    int depth = 0;
    for (std::size_t k = 0; k <= line.size(); ++k) {
      char c = k < line.size() ? line[k] : ';';
      if (c == '[') ++depth;
      if (c == ']') --depth;
      if (c != ';' || depth > 0) continue;
      std::string piece = line.substr(start, k - start);
      if (!trim(piece).empty()) {
        auto eq = piece.find('=');
        int piece_col = static_cast<int>(start + piece.find_first_not_of(" \t")) + 1;
        if (eq == std::string::npos) throw ParseError(line_no, piece_col, "expected 'name = value'");
        Binding b;
        b.lhs = trim(piece.substr(0, eq));
        std::string rhs = piece.substr(eq + 1);
        b.text = trim(rhs);
        b.line = line_no;
        b.column = static_cast<int>(start + eq + 1 + rhs.find_first_not_of(" \t")) + 1;
        if (b.lhs.empty()) throw ParseError(line_no, piece_col, "missing name before '='");
        if (b.text.empty()) throw ParseError(line_no, static_cast<int>(start + eq) + 2, "missing value after '='");
        for (const auto& other : file.sections.back().bindings)
          if (other.lhs == b.lhs) throw ParseError(line_no, piece_col, "duplicate binding '" + b.lhs + "'");
        file.sections.back().bindings.push_back(std::move(b));
      }
      start = k + 1;
    }
  }

  // task
  if (const Section* s = file.section("task")) {
    const Binding* b = s->find("name");
    if (!b) throw ParseError(s->line, 1, "[task] needs a name");
    file.task = b->text;
    try {
      required_sections(file.task);
    } catch (const std::invalid_argument& e) {
      throw ParseError(b->line, b->column, e.what());
    }
  }
  if (task) {
    if (!file.task.empty() && file.task != *task)
      throw ParseError(file.section("task")->line, 1, "file declares task '" + file.task + "', not '" + *task + "'");
    file.task = *task;
  }

  // chart
  const Section* chart = file.section("chart");
  if (!chart) throw ParseError(0, 0, "missing [chart] section");
  ChartDecl& decl = file.chart;
  bool explicit_n = false;
  for (const auto& b : chart->bindings) {
    if (b.lhs == "kind" || b.lhs == "scheme") {
      static const std::map<std::string, ChartKind> kinds{{"coordinate", ChartKind::Coordinate},
                                                          {"connection", ChartKind::Coordinate},
                                                          {"fc", ChartKind::Fc},
                                                          {"evolution", ChartKind::Evolution},
                                                          {"jet", ChartKind::Jet}};
      auto it = kinds.find(b.text);
      if (it == kinds.end()) throw ParseError(b.line, b.column, "unknown chart kind '" + b.text + "'");
      decl.kind = it->second;
    } else if (b.lhs == "n") {
      decl.n = to_int(b, 1);
      explicit_n = true;
    } else if (b.lhs == "m") {
      decl.m = to_int(b, 1);
    } else if (b.lhs == "fibers") {
      decl.fibers = to_int(b, 0);
    } else if (b.lhs == "params") {
      decl.params = name_list(b);
      static const std::regex ident(R"(^[A-Za-z_][A-Za-z_]*$)");
      for (const auto& p : decl.params)
        if (!std::regex_match(p, ident) || p == "x" || p == "t" || p == "v" || p == "y" || p == "u")
          throw ParseError(b.line, b.column, "parameter name '" + p + "' is not allowed");
    } else if (b.lhs == "names") {
      decl.names = name_list(b);
    } else {
      throw ParseError(b.line, 1, "unknown chart key '" + b.lhs + "'");
    }
  }
  if (decl.kind == ChartKind::Evolution) {
    if (explicit_n && decl.n != 2) throw ParseError(chart->line, 1, "evolution charts have n = 2 (x, t)");
    decl.n = 2;
  }
  if (decl.n < 1) throw ParseError(chart->line, 1, "[chart] needs n");
  if (decl.m < 1) throw ParseError(chart->line, 1, "[chart] needs m");

  auto expr_of = [&](Binding& b, const ChartDecl& ctx) -> Expr {
    b.value = parse_expression(b.text, ctx, b.line, b.column);
    return *b.value;
  };
  bool jets = decl.kind == ChartKind::Evolution || decl.kind == ChartKind::Jet;

  for (auto& sec : file.sections) {
    if (sec.name == "chart" || sec.name == "task") continue;
    auto need = [&](bool ok, const std::string& what) {
      if (!ok) throw ParseError(sec.line, 1, "[" + sec.name + "] " + what);
    };
    if (sec.name == "connection") {
      need(!jets, "needs a coordinate or fc chart");
      ConnectionSpec spec{decl.n, decl.m, {}};
      spec.coeffs.assign(static_cast<std::size_t>(decl.n), std::vector<Expr>(static_cast<std::size_t>(decl.m)));
      for (auto& b : sec.bindings) {
        Lhs l = split_lhs(b);
        if (l.base != "v" || l.time) throw ParseError(b.line, 1, "expected v<i> or v[alpha;i;] on the left");
        int i = 0, a = 1;
        if (l.bracket) {
          if (l.index) throw ParseError(b.line, 1, "malformed left-hand side '" + b.lhs + "'");
          auto parts = split(*l.bracket, ';');
          if (parts.size() != 3 || !trim(parts[2]).empty())
            throw ParseError(b.line, 1, "expected v[alpha;i;] on the left");
          auto al = parse_index_list(parts[0], b.line, 1);
          auto ii = parse_index_list(parts[1], b.line, 1);
          if (al.size() != 1 || ii.size() != 1) throw ParseError(b.line, 1, "expected v[alpha;i;] on the left");
          a = al[0];
          i = ii[0];
        } else {
          if (!l.index) throw ParseError(b.line, 1, "'" + b.lhs + "' needs a direction index");
          if (decl.m != 1) throw ParseError(b.line, 1, "use v[alpha;i;] when m > 1");
          i = *l.index;
        }
        range(b, i, decl.n, "direction");
        range(b, a, decl.m, "fiber");
        spec.coeffs[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(a - 1)] = expr_of(b, decl);
      }
      file.connection = std::move(spec);
    } else if (sec.name == "equation") {
      need(decl.kind == ChartKind::Evolution, "needs an evolution chart");
      file.equation.assign(static_cast<std::size_t>(decl.m), Expr());
      std::vector<bool> given(static_cast<std::size_t>(decl.m));
      for (auto& b : sec.bindings) {
        Lhs l = split_lhs(b);
        if (l.base != "u" || !l.time) throw ParseError(b.line, 1, "expected u_t or u<alpha>_t on the left");
        int a = single_index(b, l, decl.m, "dependent");
        file.equation[static_cast<std::size_t>(a - 1)] = expr_of(b, decl);
        given[static_cast<std::size_t>(a - 1)] = true;
      }
      for (int a = 1; a <= decl.m; ++a)
        need(given[static_cast<std::size_t>(a - 1)], "is missing u" + std::to_string(a) + "_t");
    } else if (sec.name == "flatrep" || sec.name == "covering") {
      need(jets, "needs an evolution or jet chart");
      need(decl.fibers >= 1, "needs fibers >= 1 in [chart]");
      need(!(file.has("flatrep") && file.has("covering")), "cannot be combined with another flat representation");
      file.covering = sec.name == "covering";
      const std::string letter = file.covering ? "X" : "a";
      file.flatrep.assign(static_cast<std::size_t>(decl.n), std::vector<Expr>(static_cast<std::size_t>(decl.fibers)));
      for (auto& b : sec.bindings) {
        if (!file.covering && b.lhs == "param") {
          if (std::find(decl.params.begin(), decl.params.end(), b.text) == decl.params.end())
            throw ParseError(b.line, b.column, "undeclared parameter '" + b.text + "'");
          file.deformation_param = Symbol::param(b.text);
          continue;
        }
        if (!file.covering && b.lhs == "at") {
          Expr v = expr_of(b, ChartDecl{});
          if (!v.is_constant()) throw ParseError(b.line, b.column, "expected a rational value");
          file.deformation_at = v.constant_term();
          continue;
        }
        Lhs l = split_lhs(b);
        if (l.base != letter || l.time || !l.index)
          throw ParseError(b.line, 1, "expected " + letter + "<i> or " + letter + "<i>[alpha] on the left");
        int i = *l.index;
        range(b, i, decl.n, "direction");
        int a = 1;
        if (l.bracket) {
          auto al = parse_index_list(*l.bracket, b.line, 1);
          if (al.size() != 1) throw ParseError(b.line, 1, "expected one fiber index in '" + b.lhs + "'");
          a = al[0];
        } else if (decl.fibers != 1) {
          throw ParseError(b.line, 1, "use " + letter + "<i>[alpha] when fibers > 1");
        }
        range(b, a, decl.fibers, "fiber");
        file.flatrep[static_cast<std::size_t>(i - 1)][static_cast<std::size_t>(a - 1)] = expr_of(b, decl);
      }
    } else if (sec.name == "symmetry") {
      for (auto& b : sec.bindings) {
        Lhs l = split_lhs(b);
        if (l.base == "phi") {
          need(jets, "phi needs an evolution or jet chart");
          if (file.phi.empty()) file.phi.assign(static_cast<std::size_t>(decl.m), Expr());
          int a = single_index(b, l, decl.m, "dependent");
          file.phi[static_cast<std::size_t>(a - 1)] = expr_of(b, decl);
        } else if (l.base == "f" || l.base == "g") {
          need(!jets, "f and g need a coordinate or fc chart");
          ChartDecl fc = decl;
          fc.kind = ChartKind::Fc;
          auto& target = l.base == "f" ? file.f : file.g;
          if (target.empty()) target.assign(static_cast<std::size_t>(decl.m), Expr());
          int a = single_index(b, l, decl.m, "fiber");
          target[static_cast<std::size_t>(a - 1)] = expr_of(b, fc);
        } else {
          throw ParseError(b.line, 1, "expected phi, f or g on the left");
        }
      }
    } else if (sec.name == "cochain") {
      need(!jets, "needs a coordinate or fc chart");
      ChartDecl fc = decl;
      fc.kind = ChartKind::Fc;
      Cochain c;
      std::optional<int> degree;
      for (auto& b : sec.bindings) {
        Lhs l = split_lhs(b);
        if (l.base != "c" || l.index || !l.bracket || l.time) throw ParseError(b.line, 1, "expected c[I;alpha] on the left");
        auto parts = split(*l.bracket, ';');
        if (parts.size() != 2) throw ParseError(b.line, 1, "expected c[I;alpha] on the left");
        auto dirs = parse_index_list(parts[0], b.line, 1);
        auto al = parse_index_list(parts[1], b.line, 1);
        if (al.size() != 1) throw ParseError(b.line, 1, "expected one fiber index in '" + b.lhs + "'");
        for (int i : dirs) range(b, i, decl.n, "direction");
        range(b, al[0], decl.m, "fiber");
        if (degree && *degree != static_cast<int>(dirs.size()))
          throw ParseError(b.line, 1, "mixed cochain degrees");
        degree = static_cast<int>(dirs.size());
        c.degree = *degree;
        c.add(dirs, al[0], expr_of(b, fc));
      }
      file.cochain = std::move(c);
    } else if (sec.name == "cocycle") {
      need(jets && decl.fibers >= 1, "needs an evolution or jet chart with fibers");
      std::set<Symbol> coframe;
      for (int i = 1; i <= decl.n; ++i) coframe.insert(Symbol::independent(i));
      VForm form(1, coframe);
      for (auto& b : sec.bindings) {
        Lhs l = split_lhs(b);
        if (l.base != "dx" || !l.index || !l.bracket || l.time)
          throw ParseError(b.line, 1, "expected dx<i>[alpha] or dx<i>[D<k>] on the left");
        range(b, *l.index, decl.n, "direction");
        Expr coeff = expr_of(b, decl);
        std::string dir = trim(*l.bracket);
        Derivation d;
        if (!dir.empty() && dir[0] == 'D') {
          auto k = parse_index_list(dir.substr(1), b.line, 1);
          if (k.size() != 1) throw ParseError(b.line, 1, "expected D<k> in '" + b.lhs + "'");
          range(b, k[0], decl.n, "direction");
          d = Derivation::total(k[0], coeff);
        } else {
          auto a = parse_index_list(dir, b.line, 1);
          if (a.size() != 1) throw ParseError(b.line, 1, "expected one fiber index in '" + b.lhs + "'");
          range(b, a[0], decl.fibers, "fiber");
          d = Derivation::partial(Symbol::fiber(a[0]), coeff);
        }
        form.add({Symbol::independent(*l.index)}, d);
      }
      file.cocycle = std::move(form);
    } else if (sec.name == "pullback") {
      need(jets && decl.fibers >= 1, "needs an evolution or jet chart with fibers");
      ChartDecl fc{ChartKind::Fc, decl.n, decl.fibers, 0, decl.params, {}};
      for (auto& b : sec.bindings) {
        if (b.lhs != "f") throw ParseError(b.line, 1, "expected f on the left");
        file.pullback_target = expr_of(b, fc);
      }
    } else if (sec.name == "ansatz") {
      for (auto& b : sec.bindings) {
        if (b.lhs == "degree") {
          file.degree = static_cast<unsigned>(to_int(b, 0));
        } else if (b.lhs == "order") {
          file.order = to_int(b, 0);
        } else if (b.lhs == "symbols") {
          ChartDecl ctx = decl;
          if (!jets) ctx.kind = ChartKind::Fc;
          int col = b.column;
          for (auto& part : split(b.text, ',')) {
            Expr e = parse_expression(part, ctx, b.line, col);
            if (e.size() != 1 || e.degree() != 1 || e.terms()[0].second != 1)
              throw ParseError(b.line, col, "expected a variable in the ansatz symbol list");
            file.ansatz_symbols.push_back(*e.symbols().begin());
            col += static_cast<int>(part.size()) + 1;
          }
        } else {
          throw ParseError(b.line, 1, "unknown ansatz key '" + b.lhs + "'");
        }
      }
    }
  }

  if (decl.kind == ChartKind::Evolution && !file.flatrep.empty() && file.equation.empty())
    throw ParseError(0, 0, "flat representation over an evolution chart needs an [equation] section");

  if (!file.task.empty()) {
    for (const auto& req : required_sections(file.task)) {
      bool ok = false;
      for (const auto& alt : split(req, '|')) ok = ok || file.has(alt);
      if (!ok) throw ParseError(0, 0, "task " + file.task + " needs a [" + req + "] section");
    }
    if (file.task == "bracket" && (file.f.empty() || file.g.empty()))
      throw ParseError(0, 0, "task bracket needs f and g in [symmetry]");
    if (file.task == "symmetry-from-f" && file.f.empty())
      throw ParseError(0, 0, "task symmetry-from-f needs f in [symmetry]");
    if (file.task == "lift" && file.phi.empty()) throw ParseError(0, 0, "task lift needs phi in [symmetry]");
    if (file.task == "deformation" && !file.deformation_param)
      throw ParseError(0, 0, "task deformation needs 'param' in [flatrep]");
    if (file.task == "pullback" && !file.pullback_target) throw ParseError(0, 0, "task pullback needs f in [pullback]");
  }
  return file;
}

std::string render_problem(const ProblemFile& file) {
  std::ostringstream os;
  bool first = true;
  for (const auto& sec : file.sections) {
    if (!first) os << '\n';
    first = false;
    os << '[' << sec.name << "]\n";
    for (const auto& b : sec.bindings) {
      os << b.lhs << " = ";
      if (b.value)
        os << b.value->render();
      else
        os << b.text;
      os << '\n';
    }
  }
  return os.str();
}

// ---- reports ------------------------------------------------------------------

std::string emit_report(const Report& report, ReportFormat format) {
  if (format == ReportFormat::Json) {
    nlohmann::ordered_json j;
    j["task"] = report.task;
    j["verdict"] = to_string(report.verdict);
    j["residuals"] = report.residuals;
    nlohmann::ordered_json w = nlohmann::ordered_json::object();
    for (const auto& [k, v] : report.witness) w[k] = v;
    j["witness"] = w;
    if (report.verdict == Verdict::BoundedNo) j["bound"] = report.bound;
    j["ms"] = report.ms;
    return j.dump() + "\n";
  }
  std::ostringstream os;
  os << "task: " << report.task << '\n' << "verdict: " << to_string(report.verdict) << '\n';
  for (const auto& r : report.residuals) os << "residual: " << r << '\n';
  for (const auto& [k, v] : report.witness) os << "witness " << k << ": " << v << '\n';
  if (report.verdict == Verdict::BoundedNo) os << "bound: " << report.bound << '\n';
  os << "time: " << std::fixed << std::setprecision(3) << report.ms << " ms\n";
  return os.str();
}

}  // namespace flatcalc
