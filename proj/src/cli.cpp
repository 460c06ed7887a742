#include "flatcalc/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <functional>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "flatcalc/kdv.hpp"
#include "flatcalc/sdym.hpp"
#include "flatcalc/specio.hpp"

namespace flatcalc {

namespace {

struct Options {
  std::string input;
  bool json = false;
  bool human = false;
  std::optional<unsigned> degree;
  std::optional<int> order;
  std::optional<std::string> lambda;
  int k = 2;
  std::string gauge = "constant";
};

std::string list(const std::vector<int>& v) {
  std::string out;
  for (std::size_t i = 0; i < v.size(); ++i) out += (i ? "," : "") + std::to_string(v[i]);
  return out;
}

void add_cochain(Report& r, const Cochain& c) {
  if (c.is_zero()) r.witness.emplace_back("result", "0");
  for (const auto& [key, e] : c.terms)
    r.witness.emplace_back("c[" + list(key.first) + ";" + std::to_string(key.second) + "]", e.render());
}

void add_functions(Report& r, const std::vector<Expr>& f) {
  for (std::size_t a = 0; a < f.size(); ++a)
    r.witness.emplace_back(f.size() == 1 ? "result" : "result" + std::to_string(a + 1), f[a].render());
}

void add_form(Report& r, const VForm& form) {
  for (const auto& [key, d] : form.terms()) {
    std::string dx = "dx" + std::to_string(key.at(0).index());
    for (const auto& [k, c] : d.schematic()) r.witness.emplace_back(dx + "[D" + std::to_string(k) + "]", c.render());
    for (const auto& [s, c] : d.partials()) r.witness.emplace_back(dx + "[" + s.render() + "]", c.render());
  }
}

Rational parse_rational(const std::string& text) {
  Expr e = parse_expression(text, ChartDecl{});
  if (!e.is_constant()) throw std::invalid_argument("expected a rational number, got '" + text + "'");
  return e.constant_term();
}

ProblemFile load(const Options& o, const std::string& task) {
  if (o.input.empty()) throw std::invalid_argument("task " + task + " needs a problem file");
  std::ifstream in(o.input);
  if (!in) throw std::invalid_argument("cannot read '" + o.input + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_problem(ss.str(), task);
}

AnsatzSpec recover_ansatz(const ProblemFile& p, const Options& o) {
  FcChart chart = p.fc_chart();
  AnsatzSpec spec = default_recover_ansatz(chart, *p.cochain);
  auto degree = o.degree ? o.degree : p.degree;
  auto order = o.order ? o.order : p.order;
  if (!p.ansatz_symbols.empty()) spec.symbols = p.ansatz_symbols;
  if (!degree && !order && p.ansatz_symbols.empty()) return spec;
  int max_a = 0;
  for (const auto& [k, c] : p.cochain->terms)
    for (Symbol s : c.symbols())
      if (s.is(SymbolKind::Fc)) max_a = std::max(max_a, static_cast<int>(s.upper_a().size()));
  if (order && p.ansatz_symbols.empty()) spec.symbols = fc_coordinates(chart, *order, std::max(max_a, *order));
  if (degree) spec.max_degree = *degree;
  spec.label = "degree<=" + std::to_string(spec.max_degree) + (order ? ", order<=" + std::to_string(*order) : "");
  return spec;
}

AnsatzSpec flatrep_ansatz(const ProblemFile& p, const Options& o) {
  unsigned degree = o.degree.value_or(p.degree.value_or(4));
  int order = o.order.value_or(p.order.value_or(3));
  return p.flatrep_ansatz(degree, order);
}

Matrix gauge_matrix(const MatChart& chart, const std::string& name) {
  if (name == "constant") {
    Matrix h = zero_matrix(chart.k());
    for (int p = 1; p <= chart.k(); ++p)
      for (int q = 1; q <= chart.k(); ++q) h[p - 1][q - 1] = Expr(p + 2 * q);
    return h;
  }
  if (name.size() == 2 && name[0] == 'A' && name[1] >= '1' && name[1] <= '4') return chart.field(name[1] - '0');
  throw std::invalid_argument("unknown gauge function '" + name + "' (use constant or A1..A4)");
}

Report dispatch(const std::string& task, const Options& o) {
  std::optional<Rational> lambda;
  if (o.lambda) lambda = parse_rational(*o.lambda);

  if (task == "kdv-verify") return kdv_verify(build_kdv());
  if (task == "kdv-lift") {
    if (o.input.empty()) throw std::invalid_argument("kdv-lift needs a symmetry name");
    auto r = kdv_lift(build_kdv(), o.input, lambda, o.degree.value_or(4), o.order.value_or(3)).report;
    r.task = "kdv-lift";
    return r;
  }
  if (task == "kdv-deformation") {
    auto d = kdv_deformation(build_kdv(), o.degree.value_or(4), o.order.value_or(2));
    Report r = d.exactness.report;
    r.task = "kdv-deformation";
    r.witness.clear();
    add_form(r, d.deformation.cocycle);
    r.witness.emplace_back("closed", to_string(d.deformation.closedness.verdict));
    if (d.deformation.closedness.verdict != Verdict::Pass) {
      r.verdict = Verdict::Fail;
      r.residuals = d.deformation.closedness.residuals;
    }
    return r;
  }
  if (task == "sdym-expand") {
    MatChart chart(o.k);
    Report r;
    r.task = task;
    r.verdict = Verdict::Witness;
    auto eqs = lambda_expand(chart);
    for (std::size_t e = 0; e < eqs.size(); ++e)
      for (int p = 1; p <= chart.k(); ++p)
        for (int q = 1; q <= chart.k(); ++q)
          r.witness.emplace_back("lam^" + std::to_string(e) + "[" + std::to_string(p) + "," + std::to_string(q) + "]",
                                 eqs[e][p - 1][q - 1].render());
    r.residuals = {"0"};
    return r;
  }
  if (task == "sdym-flatrep") {
    MatChart chart(o.k);
    Rational at = lambda.value_or(Rational(0));
    FlatRepSpec spec = sdym_flatrep(chart, at);
    Report r = check_flat_rep(spec);
    r.task = task;
    for (int i = 1; i <= spec.n(); ++i)
      for (int p = 1; p <= spec.m(); ++p)
        r.witness.emplace_back("a" + std::to_string(i) + "[" + std::to_string(p) + "]", spec.coeff(i, p).render());
    auto cocycle = sdym_lambda_cocycle(chart, at);
    r.witness.emplace_back("cocycle-closed", to_string(cocycle.closedness.verdict));
    auto exact = sdym_cocycle_exactness(chart, at, sdym_ansatz(chart, o.degree.value_or(2), o.order.value_or(1), true));
    r.witness.emplace_back("cocycle-exactness", to_string(exact.report.verdict));
    if (exact.report.verdict == Verdict::BoundedNo) r.witness.emplace_back("cocycle-bound", exact.report.bound);
    if (cocycle.closedness.verdict != Verdict::Pass) r.verdict = Verdict::Fail;
    return r;
  }
  if (task == "sdym-ugh") {
    MatChart chart(o.k);
    Report r = verify_ugh(chart, gauge_matrix(chart, o.gauge));
    r.task = task;
    return r;
  }

  ProblemFile p = load(o, task);
  if (task == "check-flat") return check_flat(*p.connection);
  if (task == "dfc") {
    Report r;
    r.task = task;
    r.verdict = Verdict::Witness;
    r.residuals = {"0"};
    add_cochain(r, dfc(p.fc_chart(), *p.cochain));
    return r;
  }
  if (task == "symmetry-from-f") {
    FcChart chart = p.fc_chart();
    Cochain phi = symmetry_from_f(chart, p.f);
    Report r = is_symmetry(chart, phi);
    r.task = task;
    if (r.verdict == Verdict::Pass) r.verdict = Verdict::Witness;
    add_cochain(r, phi);
    return r;
  }
  if (task == "recover-f") {
    auto r = recover_f(p.fc_chart(), *p.cochain, recover_ansatz(p, o)).report;
    r.task = task;
    return r;
  }
  if (task == "bracket") {
    Report r;
    r.task = task;
    r.verdict = Verdict::Witness;
    r.residuals = {"0"};
    add_functions(r, bracket0(p.fc_chart(), p.f, p.g));
    return r;
  }
  FlatRepSpec spec = p.flatrep_spec();
  if (task == "check-flatrep") return check_flat_rep(spec);
  if (task == "pullback") {
    Report r;
    r.task = task;
    r.verdict = Verdict::Witness;
    r.residuals = {"0"};
    r.witness.emplace_back("result", pullback(spec, *p.pullback_target).render());
    return r;
  }
  if (task == "deformation") {
    auto d = infinitesimal_deformation(spec, *p.deformation_param, p.deformation_at);
    Report r = d.closedness;
    add_form(r, d.cocycle);
    return r;
  }
  if (task == "exactness") {
    auto r = exactness_test(spec, *p.cocycle, flatrep_ansatz(p, o)).report;
    return r;
  }
  if (task == "lift") return lift_symmetry(spec, p.phi, flatrep_ansatz(p, o)).report;
  throw std::invalid_argument("unknown task '" + task + "'");
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  if (args.empty()) {
    err << "usage: flatcalc <task> [input] [--json|--human] [--degree N] [--order N] [--lambda Q] [--k N] [--gauge H]\n";
    return 2;
  }
  const std::string& task = args[0];
  try {
    required_sections(task);
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  Options o;
  CLI::App app("flatcalc " + task);
  app.add_option("input", o.input, "problem file (symmetry name for kdv-lift)");
  auto* json = app.add_flag("--json", o.json, "JSON report");
  app.add_flag("--human", o.human, "human-readable report (default)")->excludes(json);
  app.add_option("--degree", o.degree, "maximum total degree of every ansatz");
  app.add_option("--order", o.order, "maximum jet order of every ansatz");
  app.add_option("--lambda", o.lambda, "fixed value of the spectral parameter");
  app.add_option("--k", o.k, "matrix size for sdym tasks")->check(CLI::Range(1, 4));
  app.add_option("--gauge", o.gauge, "gauge function for sdym-ugh: constant or A1..A4");
  std::vector<std::string> rest(args.rbegin(), args.rend() - 1);
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }

  Report report;
  try {
    auto start = std::chrono::steady_clock::now();
    report = dispatch(task, o);
    report.ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  } catch (const ParseError& e) {
    err << "error: " << (o.input.empty() ? "" : o.input + ": ") << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 2;
  }
  out << emit_report(report, o.json ? ReportFormat::Json : ReportFormat::Human);
  return report.ok() ? 0 : 1;
}

}  // namespace flatcalc
