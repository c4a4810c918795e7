#pragma once

// Expression trees for holomorphic functions of n complex variables.
//
// An Expr is an immutable tree of Var / Const / arithmetic / exp / integer
// power nodes.  Variables are z1..z9 (index 1..9); index 0 is reserved for
// the auxiliary variable `u` used by rational-in-u coefficient algebra.
//
// Two evaluators are provided: plain complex evaluation, and log-modulus
// evaluation (LogMag) which never forms exp(g) explicitly and therefore
// survives doubly exponential growth such as exp(exp(z)).

#include <nevan/error.hpp>

#include <algorithm>
#include <array>
#include <cctype>
#include <cmath>
#include <complex>
#include <cstdio>
#include <memory>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace nevan {

using cplx = std::complex<double>;
using CVec = std::vector<cplx>;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Wraps an angle to (-pi, pi].
inline double wrap_phase(double p) {
  if (!std::isfinite(p)) return 0.0;
  double w = std::remainder(p, kTwoPi);
  if (w <= -kPi) w += kTwoPi;
  return w;
}

/// Natural log of a modulus together with a phase.  Only log_abs carries an
/// accuracy guarantee; the phase is best effort once |Im| of an exponent is huge.
struct LogMag {
  double log_abs = 0.0;
  double phase = 0.0;

  static LogMag from(cplx v) {
    double a = std::abs(v);
    if (a == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
    return {std::log(a), std::arg(v)};
  }
  bool is_zero() const { return log_abs == -std::numeric_limits<double>::infinity(); }
  cplx to_complex() const {
    if (is_zero()) return {0.0, 0.0};
    return std::polar(std::exp(log_abs), phase);
  }
};

namespace logmag {

inline LogMag mul(LogMag a, LogMag b) {
  if (a.is_zero() || b.is_zero()) return {-std::numeric_limits<double>::infinity(), 0.0};
  return {a.log_abs + b.log_abs, wrap_phase(a.phase + b.phase)};
}

inline LogMag div(LogMag a, LogMag b) {
  if (b.is_zero()) throw Error(ErrorKind::DivisionByZero, "eval_logmag: division by zero");
  if (a.is_zero()) return a;
  return {a.log_abs - b.log_abs, wrap_phase(a.phase - b.phase)};
}

inline LogMag neg(LogMag a) {
  if (a.is_zero()) return a;
  return {a.log_abs, wrap_phase(a.phase + kPi)};
}

/// a + sign*b, rescaled by the larger modulus so nothing overflows.
inline LogMag add(LogMag a, LogMag b, double sign) {
  if (a.is_zero() && b.is_zero())
    throw Error(ErrorKind::IndeterminatePhase, "eval_logmag: sum of two zero addends");
  if (a.is_zero()) return sign > 0 ? b : neg(b);
  if (b.is_zero()) return a;
  const double top = std::max(a.log_abs, b.log_abs);
  const cplx u = std::polar(std::exp(a.log_abs - top), a.phase) +
                 sign * std::polar(std::exp(b.log_abs - top), b.phase);
  const double m = std::abs(u);
  if (m == 0.0) return {-std::numeric_limits<double>::infinity(), 0.0};
  return {top + std::log(m), std::arg(u)};
}

inline LogMag pow(LogMag a, int k) {
  if (k == 0) return {0.0, 0.0};
  if (a.is_zero()) {
    if (k < 0) throw Error(ErrorKind::DivisionByZero, "eval_logmag: negative power of zero");
    return a;
  }
  return {k * a.log_abs, wrap_phase(k * a.phase)};
}

/// exp(g) where g is given in polar form.
inline LogMag exp(LogMag g) {
  const cplx v = g.to_complex();
  return {v.real(), wrap_phase(v.imag())};
}

}  // namespace logmag

class Expr {
 public:
  enum class Kind { Var, Const, Add, Sub, Mul, Div, Neg, Exp, Pow };

  Expr();  // the constant 0

  static Expr var(int index);
  static Expr constant(cplx value);
  static Expr u() { return var(0); }

  Kind kind() const;
  int index() const;     // Var
  int exponent() const;  // Pow
  cplx value() const;    // Const
  const Expr& lhs() const;
  const Expr& rhs() const;

  bool is_const() const { return kind() == Kind::Const; }
  bool is_const(cplx c) const { return is_const() && value() == c; }
  bool is_zero() const { return is_const(0.0); }
  bool is_one() const { return is_const(1.0); }

  /// Largest variable index used (0 when only constants / u appear).
  int max_var() const;
  bool depends_on(int index) const;
  /// No Div and no negative Pow anywhere.
  bool holomorphic_safe() const;
  /// Syntactically never vanishes: nonzero constants, exp(.), and products or
  /// powers of such.  A `false` answer says nothing.
  bool zero_free() const;
  std::size_t size() const;

  std::string to_string() const;

  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  friend Expr exp(const Expr& a);
  friend Expr pow(const Expr& a, int k);

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  static Expr make(Kind k, int ival, cplx cval, Expr a, Expr b);
  std::shared_ptr<const Node> node_;
};

struct Expr::Node {
  Kind kind;
  int ival;
  cplx cval;
  Expr a;
  Expr b;
  int max_var;
  std::size_t size;
};

inline Expr Expr::make(Kind k, int ival, cplx cval, Expr a, Expr b) {
  int mv = 0;
  std::size_t sz = 1;
  const bool unary = k == Kind::Neg || k == Kind::Exp || k == Kind::Pow;
  const bool binary = k == Kind::Add || k == Kind::Sub || k == Kind::Mul || k == Kind::Div;
  if (k == Kind::Var) mv = ival;
  if (unary || binary) {
    mv = std::max(mv, a.max_var());
    sz += a.size();
  }
  if (binary) {
    mv = std::max(mv, b.max_var());
    sz += b.size();
  }
  auto n = std::make_shared<Node>(Node{k, ival, cval, std::move(a), std::move(b), mv, sz});
  return Expr(std::move(n));
}

inline Expr::Expr() {
  static const std::shared_ptr<const Node> zero =
      std::make_shared<Node>(Node{Kind::Const, 0, 0.0, Expr(nullptr), Expr(nullptr), 0, 1});
  node_ = zero;
}

inline Expr Expr::var(int index) {
  if (index < 0 || index > 9) throw Error(ErrorKind::InvalidArgument, "variable index out of range");
  return make(Kind::Var, index, 0.0, Expr(), Expr());
}

inline Expr Expr::constant(cplx value) { return make(Kind::Const, 0, value, Expr(), Expr()); }

inline Expr::Kind Expr::kind() const { return node_->kind; }
inline int Expr::index() const { return node_->ival; }
inline int Expr::exponent() const { return node_->ival; }
inline cplx Expr::value() const { return node_->cval; }
inline const Expr& Expr::lhs() const { return node_->a; }
inline const Expr& Expr::rhs() const { return node_->b; }
inline int Expr::max_var() const { return node_ ? node_->max_var : 0; }
inline std::size_t Expr::size() const { return node_ ? node_->size : 0; }

inline bool Expr::depends_on(int index) const {
  switch (kind()) {
    case Kind::Var: return this->index() == index;
    case Kind::Const: return false;
    case Kind::Neg:
    case Kind::Exp:
    case Kind::Pow: return lhs().depends_on(index);
    default: return lhs().depends_on(index) || rhs().depends_on(index);
  }
}

inline bool Expr::holomorphic_safe() const {
  switch (kind()) {
    case Kind::Var:
    case Kind::Const: return true;
    case Kind::Div: return rhs().kind() == Kind::Const && rhs().value() != 0.0 && lhs().holomorphic_safe();
    case Kind::Pow: return exponent() >= 0 && lhs().holomorphic_safe();
    case Kind::Neg:
    case Kind::Exp: return lhs().holomorphic_safe();
    default: return lhs().holomorphic_safe() && rhs().holomorphic_safe();
  }
}

inline bool Expr::zero_free() const {
  switch (kind()) {
    case Kind::Const: return value() != 0.0;
    case Kind::Exp: return lhs().holomorphic_safe();
    case Kind::Neg:
    case Kind::Pow: return lhs().zero_free();
    case Kind::Mul: return lhs().zero_free() && rhs().zero_free();
    default: return false;
  }
}

// Builders fold constants and drop neutral elements so that derived trees
// (shifts, derivatives, difference maps) stay small.

inline Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() + b.value());
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  return Expr::make(Expr::Kind::Add, 0, 0.0, a, b);
}

inline Expr operator-(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() - b.value());
  if (b.is_zero()) return a;
  if (a.is_zero()) return -b;
  return Expr::make(Expr::Kind::Sub, 0, 0.0, a, b);
}

inline Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const()) return Expr::constant(a.value() * b.value());
  if (a.is_zero() || b.is_zero()) return Expr();
  if (a.is_one()) return b;
  if (b.is_one()) return a;
  if (a.is_const(-1.0)) return -b;
  if (b.is_const(-1.0)) return -a;
  return Expr::make(Expr::Kind::Mul, 0, 0.0, a, b);
}

inline Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_const() && b.is_const() && b.value() != 0.0) return Expr::constant(a.value() / b.value());
  if (b.is_one()) return a;
  if (a.is_zero() && !b.is_zero()) return Expr();
  return Expr::make(Expr::Kind::Div, 0, 0.0, a, b);
}

inline Expr operator-(const Expr& a) {
  if (a.is_const()) return Expr::constant(-a.value());
  if (a.kind() == Expr::Kind::Neg) return a.lhs();
  return Expr::make(Expr::Kind::Neg, 0, 0.0, a, Expr());
}

inline Expr exp(const Expr& a) {
  if (a.is_const()) return Expr::constant(std::exp(a.value()));
  return Expr::make(Expr::Kind::Exp, 0, 0.0, a, Expr());
}

inline Expr pow(const Expr& a, int k) {
  if (k == 0) return Expr::constant(1.0);
  if (k == 1) return a;
  if (a.is_const() && !(a.is_zero() && k < 0)) return Expr::constant(std::pow(a.value(), k));
  if (a.kind() == Expr::Kind::Pow) return pow(a.lhs(), a.exponent() * k);
  return Expr::make(Expr::Kind::Pow, k, 0.0, a, Expr());
}

namespace detail {

inline std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

inline std::string format_complex(cplx c) {
  if (c.imag() == 0.0) return format_double(c.real());
  if (c.real() == 0.0) return format_double(c.imag()) + "i";
  std::string im = format_double(std::abs(c.imag()));
  return "(" + format_double(c.real()) + (c.imag() < 0 ? "-" : "+") + im + "i)";
}

// precedence: 1 additive, 2 multiplicative, 3 unary minus, 4 power, 5 atom
inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case Expr::Kind::Add:
    case Expr::Kind::Sub: return 1;
    case Expr::Kind::Mul:
    case Expr::Kind::Div: return 2;
    case Expr::Kind::Neg: return 3;
    case Expr::Kind::Pow: return 4;
    case Expr::Kind::Const: {
      const cplx c = e.value();
      if (c.real() < 0 && c.imag() == 0) return 3;
      if (c.imag() < 0 && c.real() == 0) return 3;
      return 5;
    }
    default: return 5;
  }
}

inline void print(const Expr& e, std::string& out);

inline void print_child(const Expr& e, int min_prec, std::string& out) {
  if (precedence(e) < min_prec) {
    out += '(';
    print(e, out);
    out += ')';
  } else {
    print(e, out);
  }
}

inline void print(const Expr& e, std::string& out) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var:
      out += e.index() == 0 ? std::string("u") : "z" + std::to_string(e.index());
      break;
    case K::Const: out += format_complex(e.value()); break;
    case K::Add:
      print_child(e.lhs(), 1, out);
      out += " + ";
      print_child(e.rhs(), 2, out);
      break;
    case K::Sub:
      print_child(e.lhs(), 1, out);
      out += " - ";
      print_child(e.rhs(), 2, out);
      break;
    case K::Mul:
      print_child(e.lhs(), 2, out);
      out += "*";
      print_child(e.rhs(), 3, out);
      break;
    case K::Div:
      print_child(e.lhs(), 2, out);
      out += "/";
      print_child(e.rhs(), 3, out);
      break;
    case K::Neg:
      out += "-";
      print_child(e.lhs(), 3, out);
      break;
    case K::Exp:
      out += "exp(";
      print(e.lhs(), out);
      out += ")";
      break;
    case K::Pow:
      print_child(e.lhs(), 5, out);
      out += "^";
      out += e.exponent() < 0 ? "(" + std::to_string(e.exponent()) + ")" : std::to_string(e.exponent());
      break;
  }
}

}  // namespace detail

inline std::string Expr::to_string() const {
  std::string out;
  detail::print(*this, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

class Parser {
 public:
  Parser(std::string_view text, bool allow_u) : text_(text), allow_u_(allow_u) {}

  Expr parse() {
    Expr e = parse_sum();
    skip_ws();
    if (pos_ != text_.size()) fail("unexpected trailing input");
    return e;
  }

 private:
  [[noreturn]] void fail(const std::string& msg) const {
    throw Error(ErrorKind::Parse, msg + " at position " + std::to_string(pos_) + " in '" +
                                      std::string(text_) + "'");
  }

  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  char peek() {
    skip_ws();
    return pos_ < text_.size() ? text_[pos_] : '\0';
  }
  bool accept(char c) {
    if (peek() == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  bool starts_primary() {
    const char c = peek();
    return std::isdigit(static_cast<unsigned char>(c)) || c == '.' || c == '(' ||
           std::isalpha(static_cast<unsigned char>(c));
  }

  Expr parse_sum() {
    Expr e = parse_product();
    for (;;) {
      if (accept('+')) e = e + parse_product();
      else if (accept('-')) e = e - parse_product();
      else return e;
    }
  }

  Expr parse_product() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*')) e = e * parse_unary();
      else if (accept('/')) e = e / parse_unary();
      else if (starts_primary()) e = e * parse_power();
      else return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return -parse_unary();
    if (accept('+')) return parse_unary();
    return parse_power();
  }

  int parse_int_exponent() {
    const bool paren = accept('(');
    skip_ws();
    int sign = 1;
    if (accept('-')) sign = -1;
    else accept('+');
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    if (pos_ == start || (pos_ < text_.size() && text_[pos_] == '.'))
      fail("exponent must be an integer");
    const int k = std::stoi(std::string(text_.substr(start, pos_ - start)));
    if (paren && !accept(')')) fail("expected ')' after exponent");
    return sign * k;
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return pow(base, parse_int_exponent());
    return base;
  }

  Expr parse_number() {
    const std::size_t start = pos_;
    auto digit = [&](std::size_t i) {
      return i < text_.size() && std::isdigit(static_cast<unsigned char>(text_[i]));
    };
    while (digit(pos_)) ++pos_;
    if (pos_ < text_.size() && text_[pos_] == '.') {
      ++pos_;
      while (digit(pos_)) ++pos_;
    }
    if (pos_ < text_.size() && (text_[pos_] == 'e' || text_[pos_] == 'E')) {
      std::size_t k = pos_ + 1;
      if (k < text_.size() && (text_[k] == '+' || text_[k] == '-')) ++k;
      if (digit(k)) {
        pos_ = k;
        while (digit(pos_)) ++pos_;
      }
    }
    const std::string tok(text_.substr(start, pos_ - start));
    if (tok == ".") fail("malformed number");
    const double v = std::stod(tok);
    // imaginary suffix: "2.5i" (but not the start of an identifier like "2inf")
    if (pos_ < text_.size() && text_[pos_] == 'i' &&
        !(pos_ + 1 < text_.size() && std::isalnum(static_cast<unsigned char>(text_[pos_ + 1])))) {
      ++pos_;
      return Expr::constant(cplx(0.0, v));
    }
    return Expr::constant(v);
  }

  Expr parse_primary() {
    const char c = peek();
    if (c == '(') {
      ++pos_;
      Expr e = parse_sum();
      if (!accept(')')) fail("expected ')'");
      return e;
    }
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (std::isalpha(static_cast<unsigned char>(c))) {
      const std::size_t start = pos_;
      while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
      const std::string id(text_.substr(start, pos_ - start));
      if (id == "z") {
        if (pos_ < text_.size() && text_[pos_] >= '1' && text_[pos_] <= '9') {
          const int j = text_[pos_] - '0';
          ++pos_;
          return Expr::var(j);
        }
        fail("variable must be z1..z9");
      }
      if (id == "i") return Expr::constant(cplx(0.0, 1.0));
      if (id == "pi") return Expr::constant(kPi);
      if (id == "u" && allow_u_) return Expr::u();
      if (id == "exp") {
        if (!accept('(')) fail("expected '(' after exp");
        Expr e = parse_sum();
        if (!accept(')')) fail("expected ')'");
        return exp(e);
      }
      pos_ = start;
      fail("unknown identifier '" + id + "'");
    }
    if (c == '\0') fail("unexpected end of input");
    fail(std::string("unexpected character '") + c + "'");
  }

  std::string_view text_;
  bool allow_u_;
  std::size_t pos_ = 0;
};

}  // namespace detail

/// Parses `z1..z9`, complex literals (`3`, `2.5i`, `1+2i`), `pi`, `+ - * /`,
/// `^` with an integer exponent, `exp(...)` and parentheses.  Adjacent factors
/// multiply (`2z1`, `3(z1+1)`).  With `allow_u`, the identifier `u` is accepted.
inline Expr parse_expr(std::string_view text, bool allow_u = false) {
  return detail::Parser(text, allow_u).parse();
}

// ---------------------------------------------------------------------------
// Symbolic operations

/// Replaces every Var(j) by Var(j) + c_j.
inline Expr shift(const Expr& e, std::span<const cplx> c) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var: {
      const int j = e.index();
      if (j == 0) return e;
      if (static_cast<std::size_t>(j) > c.size())
        throw Error(ErrorKind::InvalidArgument, "shift: shift vector shorter than variable index");
      return c[j - 1] == 0.0 ? e : e + Expr::constant(c[j - 1]);
    }
    case K::Const: return e;
    case K::Add: return shift(e.lhs(), c) + shift(e.rhs(), c);
    case K::Sub: return shift(e.lhs(), c) - shift(e.rhs(), c);
    case K::Mul: return shift(e.lhs(), c) * shift(e.rhs(), c);
    case K::Div: return shift(e.lhs(), c) / shift(e.rhs(), c);
    case K::Neg: return -shift(e.lhs(), c);
    case K::Exp: return exp(shift(e.lhs(), c));
    case K::Pow: return pow(shift(e.lhs(), c), e.exponent());
  }
  return e;
}

/// Symbolic partial derivative with respect to z_j (j = 0 differentiates in u).
inline Expr derivative(const Expr& e, int j) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var: return Expr::constant(e.index() == j ? 1.0 : 0.0);
    case K::Const: return Expr();
    case K::Add: return derivative(e.lhs(), j) + derivative(e.rhs(), j);
    case K::Sub: return derivative(e.lhs(), j) - derivative(e.rhs(), j);
    case K::Mul:
      return derivative(e.lhs(), j) * e.rhs() + e.lhs() * derivative(e.rhs(), j);
    case K::Div: {
      const Expr& a = e.lhs();
      const Expr& b = e.rhs();
      return (derivative(a, j) * b - a * derivative(b, j)) / pow(b, 2);
    }
    case K::Neg: return -derivative(e.lhs(), j);
    case K::Exp: return e * derivative(e.lhs(), j);
    case K::Pow: {
      const int k = e.exponent();
      return Expr::constant(static_cast<double>(k)) * pow(e.lhs(), k - 1) * derivative(e.lhs(), j);
    }
  }
  return Expr();
}

/// Replaces Var(index) by `replacement`.
inline Expr substitute(const Expr& e, int index, const Expr& replacement) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Var: return e.index() == index ? replacement : e;
    case K::Const: return e;
    case K::Add: return substitute(e.lhs(), index, replacement) + substitute(e.rhs(), index, replacement);
    case K::Sub: return substitute(e.lhs(), index, replacement) - substitute(e.rhs(), index, replacement);
    case K::Mul: return substitute(e.lhs(), index, replacement) * substitute(e.rhs(), index, replacement);
    case K::Div: return substitute(e.lhs(), index, replacement) / substitute(e.rhs(), index, replacement);
    case K::Neg: return -substitute(e.lhs(), index, replacement);
    case K::Exp: return exp(substitute(e.lhs(), index, replacement));
    case K::Pow: return pow(substitute(e.lhs(), index, replacement), e.exponent());
  }
  return e;
}

// ---------------------------------------------------------------------------
// Compiled evaluation

/// Postfix program compiled from an Expr.  Evaluation is pure and reentrant.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e) {
    compile(e);
    int depth = 0;
    for (const auto& ins : code_) {
      switch (ins.op) {
        case Expr::Kind::Var:
        case Expr::Kind::Const: ++depth; break;
        case Expr::Kind::Add:
        case Expr::Kind::Sub:
        case Expr::Kind::Mul:
        case Expr::Kind::Div: --depth; break;
        default: break;
      }
      max_depth_ = std::max(max_depth_, depth);
    }
  }

  /// Exact recursive evaluation.  Throws DivisionByZero on an exact zero
  /// divisor and Overflow when the result is not finite.
  cplx eval(std::span<const cplx> z) const {
    cplx out;
    switch (run_complex(z, out)) {
      case Status::Ok:
      case Status::Suspect: break;
      case Status::DivZero: throw Error(ErrorKind::DivisionByZero, "eval: division by zero");
    }
    if (!std::isfinite(out.real()) || !std::isfinite(out.imag()))
      throw Error(ErrorKind::Overflow, "eval: result overflows; use eval_logmag");
    return out;
  }

  /// log|value| and phase.  Uses plain evaluation when it is safely in range
  /// and falls back to the log-domain machine otherwise.
  LogMag eval_logmag(std::span<const cplx> z) const {
    cplx out;
    if (run_complex(z, out) == Status::Ok) {
      const double a = std::abs(out);
      if (std::isfinite(a) && a > 1e-280 && a < 1e280) return {std::log(a), std::arg(out)};
    }
    return run_logmag(z);
  }

  bool empty() const { return code_.empty(); }

 private:
  enum class Status { Ok, Suspect, DivZero };

  struct Instr {
    Expr::Kind op;
    int arg;
    cplx c;
  };

  void compile(const Expr& e) {
    using K = Expr::Kind;
    switch (e.kind()) {
      case K::Var:
        if (e.index() == 0) throw Error(ErrorKind::InvalidArgument, "cannot evaluate expression containing u");
        code_.push_back({K::Var, e.index() - 1, 0.0});
        break;
      case K::Const: code_.push_back({K::Const, 0, e.value()}); break;
      case K::Neg:
      case K::Exp:
        compile(e.lhs());
        code_.push_back({e.kind(), 0, 0.0});
        break;
      case K::Pow:
        compile(e.lhs());
        code_.push_back({K::Pow, e.exponent(), 0.0});
        break;
      default:
        compile(e.lhs());
        compile(e.rhs());
        code_.push_back({e.kind(), 0, 0.0});
        break;
    }
  }

  template <class T, class F>
  auto with_stack(F&& f) const {
    if (max_depth_ <= 32) {
      std::array<T, 32> buf;
      return f(buf.data());
    }
    std::vector<T> buf(static_cast<std::size_t>(max_depth_));
    return f(buf.data());
  }

  Status run_complex(std::span<const cplx> z, cplx& out) const {
    return with_stack<cplx>([&](cplx* st) {
      using K = Expr::Kind;
      int sp = 0;
      Status status = Status::Ok;
      for (const auto& ins : code_) {
        switch (ins.op) {
          case K::Var:
            if (static_cast<std::size_t>(ins.arg) >= z.size())
              throw Error(ErrorKind::InvalidArgument, "eval: point has fewer coordinates than the expression");
            st[sp++] = z[ins.arg];
            break;
          case K::Const: st[sp++] = ins.c; break;
          case K::Add: --sp; st[sp - 1] += st[sp]; break;
          case K::Sub: --sp; st[sp - 1] -= st[sp]; break;
          case K::Mul: --sp; st[sp - 1] *= st[sp]; break;
          case K::Div:
            --sp;
            if (st[sp] == 0.0) return Status::DivZero;
            st[sp - 1] /= st[sp];
            break;
          case K::Neg: st[sp - 1] = -st[sp - 1]; break;
          case K::Exp: {
            const double re = st[sp - 1].real();
            if (!(std::abs(re) < 650.0)) status = Status::Suspect;
            st[sp - 1] = std::exp(st[sp - 1]);
            break;
          }
          case K::Pow:
            if (ins.arg < 0 && st[sp - 1] == 0.0) return Status::DivZero;
            st[sp - 1] = ipow(st[sp - 1], ins.arg);
            break;
        }
      }
      out = st[0];
      if (!std::isfinite(out.real()) || !std::isfinite(out.imag())) status = Status::Suspect;
      return status;
    });
  }

  LogMag run_logmag(std::span<const cplx> z) const {
    return with_stack<LogMag>([&](LogMag* st) {
      using K = Expr::Kind;
      int sp = 0;
      for (const auto& ins : code_) {
        switch (ins.op) {
          case K::Var:
            if (static_cast<std::size_t>(ins.arg) >= z.size())
              throw Error(ErrorKind::InvalidArgument, "eval_logmag: point has fewer coordinates than the expression");
            st[sp++] = LogMag::from(z[ins.arg]);
            break;
          case K::Const: st[sp++] = LogMag::from(ins.c); break;
          case K::Add: --sp; st[sp - 1] = logmag::add(st[sp - 1], st[sp], 1.0); break;
          case K::Sub: --sp; st[sp - 1] = logmag::add(st[sp - 1], st[sp], -1.0); break;
          case K::Mul: --sp; st[sp - 1] = logmag::mul(st[sp - 1], st[sp]); break;
          case K::Div: --sp; st[sp - 1] = logmag::div(st[sp - 1], st[sp]); break;
          case K::Neg: st[sp - 1] = logmag::neg(st[sp - 1]); break;
          case K::Exp: st[sp - 1] = logmag::exp(st[sp - 1]); break;
          case K::Pow: st[sp - 1] = logmag::pow(st[sp - 1], ins.arg); break;
        }
      }
      return st[0];
    });
  }

  static cplx ipow(cplx base, int k) {
    if (k < 0) return 1.0 / ipow(base, -k);
    cplx result = 1.0;
    while (k) {
      if (k & 1) result *= base;
      base *= base;
      k >>= 1;
    }
    return result;
  }

  std::vector<Instr> code_;
  int max_depth_ = 0;
};

inline cplx eval(const Expr& e, std::span<const cplx> z) { return Program(e).eval(z); }
inline LogMag eval_logmag(const Expr& e, std::span<const cplx> z) { return Program(e).eval_logmag(z); }

}  // namespace nevan
