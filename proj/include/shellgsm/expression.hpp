#pragma once

// Closed-form radial profiles such as "5*tan(pi/(5*r))".
//
// Grammar: numbers (optionally suffixed with j for imaginary literals), the
// variable r (meters), the constants j and pi, binary + - * /, unary -,
// parentheses and the functions sin cos tan exp ln sqrt. Derivatives with
// respect to r are exact (forward-mode dual numbers).

#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "shellgsm/specfun.hpp"

namespace shellgsm {

class Expression {
public:
  /// Throws ParseError carrying the 1-based column of the offending token.
  static Expression parse(std::string_view text);

  cplx operator()(double r) const { return evaluate(r).first; }
  cplx derivative(double r) const { return evaluate(r).second; }
  /// Value and d/dr. Throws DomainError naming r for ln of a nonpositive
  /// real, division by zero or any non-finite result.
  std::pair<cplx, cplx> evaluate(double r) const;

  const std::string& text() const { return text_; }

private:
  enum class Op { constant, radius, add, sub, mul, div, neg, sin, cos, tan, exp, ln, sqrt };
  struct Instr {
    Op op;
    cplx value;
  };

  friend class ExpressionParser;
  std::string text_;
  std::vector<Instr> code_;  // postfix
};

cplx expression_eval(std::string_view text, double r);

}  // namespace shellgsm
