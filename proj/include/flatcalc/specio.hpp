#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "flatcalc/fce.hpp"
#include "flatcalc/flatrep.hpp"
#include "flatcalc/report.hpp"

namespace flatcalc {

/// Input error with a 1-based source position (0 when not tied to a token).
class ParseError : public std::runtime_error {
 public:
  ParseError(int line, int column, const std::string& message);
  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

enum class ChartKind {
  Coordinate,  // x_i, v^alpha
  Fc,          // plus v[alpha;I;A]
  Evolution,   // x (= x1), t (= x2), u[k]
  Jet          // x_1..x_n, u<alpha>[sigma]
};

/// Variables an expression may reference.
struct ChartDecl {
  ChartKind kind = ChartKind::Coordinate;
  int n = 0;
  int m = 0;
  int fibers = 0;
  std::vector<std::string> params;
  std::vector<std::string> names;  // free-form labels, not interpreted
};

/// Parses an infix polynomial over the chart. `line`/`column` locate the
/// text inside a file for error messages.
Expr parse_expression(const std::string& text, const ChartDecl& chart, int line = 1, int column = 1);

struct Binding {
  std::string lhs;
  std::string text;  // right-hand side as written
  std::optional<Expr> value;
  int line = 0;
  int column = 0;  // of the right-hand side
};

struct Section {
  std::string name;
  int line = 0;
  std::vector<Binding> bindings;
  const Binding* find(const std::string& lhs) const;
};

struct ProblemFile {
  std::vector<Section> sections;
  ChartDecl chart;
  std::string task;  // from [task] name, or the caller's task

  std::optional<ConnectionSpec> connection;
  std::vector<Expr> equation;                  // evolution right-hand sides
  std::vector<std::vector<Expr>> flatrep;      // a_i^alpha from [flatrep] or [covering]
  bool covering = false;
  std::optional<Symbol> deformation_param;
  std::optional<Rational> deformation_at;
  std::vector<Expr> phi;                       // equation symmetry
  std::vector<Expr> f, g;                      // generating functions over the Fc chart
  std::optional<Cochain> cochain;
  std::optional<VForm> cocycle;
  std::optional<Expr> pullback_target;
  std::optional<unsigned> degree;
  std::optional<int> order;
  std::vector<Symbol> ansatz_symbols;

  const Section* section(const std::string& name) const;
  bool has(const std::string& name) const { return section(name) != nullptr; }

  FcChart fc_chart() const;
  /// Equation scheme: evolution for Evolution charts, free jets for Jet charts.
  SchemePtr base_scheme() const;
  FlatRepSpec flatrep_spec() const;
  /// Default ansatz for flat-representation tasks: params, x's, y's and jets up to `order`.
  AnsatzSpec flatrep_ansatz(unsigned degree, int order) const;
};

/// Parses and validates a problem file. When `task` is given (or the file
/// has a [task] section) the sections that task needs must be present.
ProblemFile parse_problem(const std::string& text, const std::optional<std::string>& task = {});

/// Canonical text of a parsed file: expressions re-rendered, comments dropped.
std::string render_problem(const ProblemFile& file);

/// Sections a task needs; throws std::invalid_argument for unknown tasks.
std::vector<std::string> required_sections(const std::string& task);

enum class ReportFormat { Human, Json };

std::string emit_report(const Report& report, ReportFormat format);

}  // namespace flatcalc
