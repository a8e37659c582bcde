#include "shellgsm/expression.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <sstream>

#include "shellgsm/error.hpp"

namespace shellgsm {

class ExpressionParser {
public:
  explicit ExpressionParser(std::string_view text) : s_(text) {}

  Expression run() {
    Expression e;
    e.text_ = std::string(s_);
    out_ = &e.code_;
    skip();
    if (pos_ >= s_.size()) fail("empty expression");
    expr();
    skip();
    if (pos_ < s_.size()) fail("unexpected '" + std::string(1, s_[pos_]) + "'");
    return e;
  }

private:
  using Op = Expression::Op;

  std::string_view s_;
  std::size_t pos_ = 0;
  std::vector<Expression::Instr>* out_ = nullptr;

  [[noreturn]] void fail(const std::string& what) const {
    const int column = static_cast<int>(pos_) + 1;
    throw ParseError("expression '" + std::string(s_) + "': " + what + " at column " + std::to_string(column), 1,
                     column);
  }

  void emit(Op op, cplx v = 0.0) { out_->push_back({op, v}); }

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

  void expr() {
    term();
    for (;;) {
      if (accept('+')) {
        term();
        emit(Op::add);
      } else if (accept('-')) {
        term();
        emit(Op::sub);
      } else {
        return;
      }
    }
  }

  void term() {
    unary();
    for (;;) {
      if (accept('*')) {
        unary();
        emit(Op::mul);
      } else if (accept('/')) {
        unary();
        emit(Op::div);
      } else {
        return;
      }
    }
  }

  void unary() {
    if (accept('-')) {
      unary();
      emit(Op::neg);
    } else if (accept('+')) {
      unary();
    } else {
      primary();
    }
  }

  void primary() {
    skip();
    if (pos_ >= s_.size()) fail("unexpected end of expression");
    const char c = s_[pos_];
    if (c == '(') {
      ++pos_;
      expr();
      if (!accept(')')) fail("expected ')'");
      return;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
      number();
      return;
    }
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
      const std::string_view name = s_.substr(start, pos_ - start);
      if (name == "r") return emit(Op::radius);
      if (name == "j") return emit(Op::constant, cplx(0.0, 1.0));
      if (name == "pi") return emit(Op::constant, kPi);
      Op fn;
      if (name == "sin") fn = Op::sin;
      else if (name == "cos") fn = Op::cos;
      else if (name == "tan") fn = Op::tan;
      else if (name == "exp") fn = Op::exp;
      else if (name == "ln") fn = Op::ln;
      else if (name == "sqrt") fn = Op::sqrt;
      else {
        pos_ = start;
        fail("unknown name '" + std::string(name) + "'");
      }
      if (!accept('(')) fail("expected '(' after " + std::string(name));
      expr();
      if (!accept(')')) fail("expected ')'");
      emit(fn);
      return;
    }
    fail("unexpected '" + std::string(1, c) + "'");
  }

  void number() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.')) ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t p = pos_ + 1;
      if (p < s_.size() && (s_[p] == '+' || s_[p] == '-')) ++p;
      if (p < s_.size() && std::isdigit(static_cast<unsigned char>(s_[p]))) {
        pos_ = p;
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      }
    }
    double v = 0.0;
    const auto res = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (res.ec != std::errc() || res.ptr != s_.data() + pos_) {
      pos_ = start;
      fail("malformed number");
    }
    if (pos_ < s_.size() && s_[pos_] == 'j') {
      ++pos_;
      emit(Op::constant, cplx(0.0, v));
    } else {
      emit(Op::constant, v);
    }
  }
};

Expression Expression::parse(std::string_view text) { return ExpressionParser(text).run(); }

std::pair<cplx, cplx> Expression::evaluate(double r) const {
  struct Dual {
    cplx v, d;
  };
  auto singular = [&](const char* why) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "expression '" << text_ << "': " << why << " at r = " << r;
    throw DomainError(msg.str());
  };
  std::vector<Dual> st;
  st.reserve(code_.size());
  for (const auto& in : code_) {
    switch (in.op) {
      case Op::constant: st.push_back({in.value, 0.0}); continue;
      case Op::radius: st.push_back({r, 1.0}); continue;
      default: break;
    }
    if (in.op == Op::add || in.op == Op::sub || in.op == Op::mul || in.op == Op::div) {
      const Dual b = st.back();
      st.pop_back();
      Dual& a = st.back();
      switch (in.op) {
        case Op::add: a = {a.v + b.v, a.d + b.d}; break;
        case Op::sub: a = {a.v - b.v, a.d - b.d}; break;
        case Op::mul: a = {a.v * b.v, a.d * b.v + a.v * b.d}; break;
        default:
          if (b.v == cplx(0.0)) singular("division by zero");
          a = {a.v / b.v, (a.d * b.v - a.v * b.d) / (b.v * b.v)};
      }
      continue;
    }
    Dual& a = st.back();
    switch (in.op) {
      case Op::neg: a = {-a.v, -a.d}; break;
      case Op::sin: a = {std::sin(a.v), std::cos(a.v) * a.d}; break;
      case Op::cos: a = {std::cos(a.v), -std::sin(a.v) * a.d}; break;
      case Op::tan: {
        if (std::cos(a.v) == cplx(0.0)) singular("tan pole");
        const cplx t = std::tan(a.v);
        a = {t, (1.0 + t * t) * a.d};
        break;
      }
      case Op::exp: {
        const cplx e = std::exp(a.v);
        a = {e, e * a.d};
        break;
      }
      case Op::ln:
        if (a.v.imag() == 0.0 && a.v.real() <= 0.0) singular("ln of a nonpositive value");
        a = {std::log(a.v), a.d / a.v};
        break;
      case Op::sqrt: {
        const cplx s = std::sqrt(a.v);
        a = {s, s == cplx(0.0) ? cplx(0.0) : a.d / (2.0 * s)};
        break;
      }
      default: break;
    }
  }
  const Dual res = st.back();
  if (!std::isfinite(res.v.real()) || !std::isfinite(res.v.imag()) || !std::isfinite(res.d.real()) ||
      !std::isfinite(res.d.imag()))
    singular("non-finite value");
  return {res.v, res.d};
}

cplx expression_eval(std::string_view text, double r) { return Expression::parse(text)(r); }

}  // namespace shellgsm
