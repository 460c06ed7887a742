#pragma once

#include <string>
#include <utility>
#include <vector>

#include "flatcalc/expr.hpp"

namespace flatcalc {

enum class Verdict { Pass, Fail, Witness, BoundedNo };

std::string to_string(Verdict v);

/// Outcome of a verification or solve task. Exprs are stored rendered so a
/// report can be emitted without the symbol context that produced it.
struct Report {
  std::string task;
  Verdict verdict = Verdict::Pass;
  std::vector<std::string> residuals;
  std::vector<std::pair<std::string, std::string>> witness;
  double ms = 0.0;
  /// Echo of the search bound for bounded-no verdicts, e.g. "degree<=4, order<=3".
  std::string bound;

  /// pass iff every residual is zero; an empty list renders as ["0"].
  static Report from_residuals(std::string task, const std::vector<Expr>& residuals);

  bool ok() const { return verdict == Verdict::Pass || verdict == Verdict::Witness; }
};

}  // namespace flatcalc
