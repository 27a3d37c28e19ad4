#pragma once

// Expression trees over one real variable `x`, a text parser with a
// canonical printer, and evaluation to plain values or jets.
//
// Grammar (whitespace ignored):
//
//   expr     := term (('+' | '-') term)*
//   term     := unary (('*' | '/') unary)*
//   unary    := '-' unary | power
//   power    := primary ('^' exponent)?
//   exponent := '-' exponent | number | '(' ratexpr ')'
//   ratexpr  := rational arithmetic (+ - * / unary -) over number literals
//   primary  := number | 'x' | 'pi' | 'e' | '(' expr ')'
//             | fname '(' expr ')'
//             | ('S' | 'C') '(' signed-number ';' expr ')'
//   fname    := exp | log | sin | cos | sinh | cosh | sqrt
//
// S(t; u) and C(t; u) are the sine/cosine type functions: sin(sqrt(-t) u),
// cos(sqrt(-t) u) for t < 0; u and 1 for t = 0; sinh(sqrt(t) u),
// cosh(sqrt(t) u) for t > 0.

#include <charconv>
#include <cmath>
#include <cstdint>
#include <memory>
#include <numeric>
#include <string>
#include <string_view>
#include <vector>

#include "meanlab/error.hpp"
#include "meanlab/jet.hpp"

namespace meanlab {

/// Exact exponent of a power node, kept in lowest terms with den > 0.
struct Rational {
  std::int64_t num = 0;
  std::int64_t den = 1;

  static Rational make(std::int64_t n, std::int64_t d) {
    if (d == 0) fail(ErrorKind::DomainViolation, "rational with zero denominator");
    if (d < 0) {
      n = -n;
      d = -d;
    }
    const std::int64_t g = std::gcd(n < 0 ? -n : n, d);
    return {n / (g == 0 ? 1 : g), d / (g == 0 ? 1 : g)};
  }

  double value() const { return static_cast<double>(num) / static_cast<double>(den); }
  bool is_integer() const { return den == 1; }
  friend bool operator==(const Rational&, const Rational&) = default;
};

enum class NodeKind {
  Const, Var, Add, Sub, Mul, Div, Neg, Pow,
  Exp, Log, Sin, Cos, Sinh, Cosh, Sqrt,
  SineType, CosineType,
};

class Expr;

namespace detail {
struct Node;
}

class Expr {
 public:
  Expr() = default;

  NodeKind kind() const;
  /// Constant value (Const) or the parameter t (SineType/CosineType).
  double number() const;
  const Rational& exponent() const;
  const Expr& lhs() const;
  const Expr& rhs() const;
  /// Single argument of unary nodes (Neg, Pow base, functions).
  const Expr& arg() const { return lhs(); }
  bool empty() const { return !node_; }

  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend Expr make_node(detail::Node n);
  explicit Expr(std::shared_ptr<const detail::Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const detail::Node> node_;
};

namespace detail {
struct Node {
  NodeKind kind = NodeKind::Const;
  double number = 0.0;
  Rational exponent{};
  Expr a, b;
};
}  // namespace detail

inline Expr make_node(detail::Node n) {
  return Expr(std::make_shared<const detail::Node>(std::move(n)));
}

inline NodeKind Expr::kind() const { return node_->kind; }
inline double Expr::number() const { return node_->number; }
inline const Rational& Expr::exponent() const { return node_->exponent; }
inline const Expr& Expr::lhs() const { return node_->a; }
inline const Expr& Expr::rhs() const { return node_->b; }

inline bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  const auto& x = *a.node_;
  const auto& y = *b.node_;
  if (x.kind != y.kind) return false;
  switch (x.kind) {
    case NodeKind::Const: return x.number == y.number;
    case NodeKind::Var: return true;
    case NodeKind::Pow: return x.exponent == y.exponent && x.a == y.a;
    case NodeKind::SineType:
    case NodeKind::CosineType: return x.number == y.number && x.a == y.a;
    default: return x.a == y.a && x.b == y.b;
  }
}

// ---------------------------------------------------------------------------
// Construction

namespace ex {

inline Expr constant(double v) {
  if (!std::isfinite(v)) fail(ErrorKind::DomainViolation, "non-finite constant", v);
  return make_node({NodeKind::Const, v, {}, {}, {}});
}
inline Expr var() { return make_node({NodeKind::Var, 0.0, {}, {}, {}}); }

inline Expr binary(NodeKind k, Expr a, Expr b) { return make_node({k, 0.0, {}, std::move(a), std::move(b)}); }
inline Expr unary(NodeKind k, Expr a) { return make_node({k, 0.0, {}, std::move(a), {}}); }

// Negated constants fold into the constant so that parse(print(e)) == e.
inline Expr neg(Expr a) {
  if (a.kind() == NodeKind::Const) return constant(-a.number());
  return unary(NodeKind::Neg, std::move(a));
}

inline Expr pow(Expr base, Rational e) { return make_node({NodeKind::Pow, 0.0, e, std::move(base), {}}); }
inline Expr pow(Expr base, std::int64_t num, std::int64_t den = 1) {
  return pow(std::move(base), Rational::make(num, den));
}
inline Expr exp(Expr a) { return unary(NodeKind::Exp, std::move(a)); }
inline Expr log(Expr a) { return unary(NodeKind::Log, std::move(a)); }
inline Expr sin(Expr a) { return unary(NodeKind::Sin, std::move(a)); }
inline Expr cos(Expr a) { return unary(NodeKind::Cos, std::move(a)); }
inline Expr sinh(Expr a) { return unary(NodeKind::Sinh, std::move(a)); }
inline Expr cosh(Expr a) { return unary(NodeKind::Cosh, std::move(a)); }
inline Expr sqrt(Expr a) { return unary(NodeKind::Sqrt, std::move(a)); }
inline Expr sine_type(double t, Expr a) {
  if (!std::isfinite(t)) fail(ErrorKind::DomainViolation, "non-finite S parameter", t);
  return make_node({NodeKind::SineType, t, {}, std::move(a), {}});
}
inline Expr cosine_type(double t, Expr a) {
  if (!std::isfinite(t)) fail(ErrorKind::DomainViolation, "non-finite C parameter", t);
  return make_node({NodeKind::CosineType, t, {}, std::move(a), {}});
}

}  // namespace ex

inline Expr operator+(Expr a, Expr b) { return ex::binary(NodeKind::Add, std::move(a), std::move(b)); }
inline Expr operator-(Expr a, Expr b) { return ex::binary(NodeKind::Sub, std::move(a), std::move(b)); }
inline Expr operator*(Expr a, Expr b) { return ex::binary(NodeKind::Mul, std::move(a), std::move(b)); }
inline Expr operator/(Expr a, Expr b) { return ex::binary(NodeKind::Div, std::move(a), std::move(b)); }
inline Expr operator-(Expr a) { return ex::neg(std::move(a)); }

// ---------------------------------------------------------------------------
// Symbolic derivative, with just enough folding that d/dx of a constant
// multiple of x comes out as that constant.

namespace detail {

inline bool is_const(const Expr& e, double v) { return e.kind() == NodeKind::Const && e.number() == v; }

inline Expr smul(Expr a, Expr b) {
  if (is_const(a, 0.0) || is_const(b, 0.0)) return ex::constant(0.0);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  if (a.kind() == NodeKind::Const && b.kind() == NodeKind::Const) return ex::constant(a.number() * b.number());
  return std::move(a) * std::move(b);
}
inline Expr sadd(Expr a, Expr b) {
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return std::move(a) + std::move(b);
}
inline Expr ssub(Expr a, Expr b) {
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return ex::neg(std::move(b));
  return std::move(a) - std::move(b);
}

}  // namespace detail

namespace ex {

inline Expr diff(const Expr& e) {
  using detail::sadd;
  using detail::smul;
  using detail::ssub;
  switch (e.kind()) {
    case NodeKind::Const: return constant(0.0);
    case NodeKind::Var: return constant(1.0);
    case NodeKind::Add: return sadd(diff(e.lhs()), diff(e.rhs()));
    case NodeKind::Sub: return ssub(diff(e.lhs()), diff(e.rhs()));
    case NodeKind::Mul: return sadd(smul(diff(e.lhs()), e.rhs()), smul(e.lhs(), diff(e.rhs())));
    case NodeKind::Div: {
      const Expr num = ssub(smul(diff(e.lhs()), e.rhs()), smul(e.lhs(), diff(e.rhs())));
      if (detail::is_const(num, 0.0)) return num;
      return num / pow(e.rhs(), 2);
    }
    case NodeKind::Neg: {
      const Expr d = diff(e.arg());
      return detail::is_const(d, 0.0) ? d : neg(d);
    }
    case NodeKind::Pow: {
      const Rational& r = e.exponent();
      const Rational lower = Rational::make(r.num - r.den, r.den);
      const Expr base = lower.num == 0 ? constant(1.0) : (lower == Rational{1, 1} ? e.arg() : pow(e.arg(), lower));
      return smul(smul(constant(r.value()), base), diff(e.arg()));
    }
    case NodeKind::Exp: return smul(e, diff(e.arg()));
    case NodeKind::Log: return diff(e.arg()) / e.arg();
    case NodeKind::Sin: return smul(cos(e.arg()), diff(e.arg()));
    case NodeKind::Cos: return smul(neg(sin(e.arg())), diff(e.arg()));
    case NodeKind::Sinh: return smul(cosh(e.arg()), diff(e.arg()));
    case NodeKind::Cosh: return smul(sinh(e.arg()), diff(e.arg()));
    case NodeKind::Sqrt: return diff(e.arg()) / (constant(2.0) * e);
    case NodeKind::SineType: {
      // S_t' = sqrt|t| C_t for t != 0, and S_0' = 1
      const double t = e.number();
      const Expr outer = t == 0.0 ? constant(1.0) : smul(constant(std::sqrt(std::fabs(t))), cosine_type(t, e.arg()));
      return smul(outer, diff(e.arg()));
    }
    case NodeKind::CosineType: {
      // C_t' = sign(t) sqrt|t| S_t
      const double t = e.number();
      if (t == 0.0) return constant(0.0);
      const double c = t < 0 ? -std::sqrt(-t) : std::sqrt(t);
      return smul(smul(constant(c), sine_type(t, e.arg())), diff(e.arg()));
    }
  }
  return constant(0.0);
}

}  // namespace ex

// ---------------------------------------------------------------------------
// Printing

namespace detail {

inline std::string format_number(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline int precedence(const Expr& e) {
  switch (e.kind()) {
    case NodeKind::Add:
    case NodeKind::Sub: return 1;
    case NodeKind::Mul:
    case NodeKind::Div: return 2;
    case NodeKind::Neg: return 3;
    case NodeKind::Pow: return 4;
    default: return 5;
  }
}

inline const char* function_name(NodeKind k) {
  switch (k) {
    case NodeKind::Exp: return "exp";
    case NodeKind::Log: return "log";
    case NodeKind::Sin: return "sin";
    case NodeKind::Cos: return "cos";
    case NodeKind::Sinh: return "sinh";
    case NodeKind::Cosh: return "cosh";
    case NodeKind::Sqrt: return "sqrt";
    default: return "?";
  }
}

inline void print(const Expr& e, std::string& out);

inline void print_wrapped(const Expr& e, bool wrap, std::string& out) {
  if (wrap) out += '(';
  print(e, out);
  if (wrap) out += ')';
}

inline void print(const Expr& e, std::string& out) {
  switch (e.kind()) {
    case NodeKind::Const: {
      const std::string s = format_number(e.number());
      if (e.number() < 0 || (e.number() == 0 && std::signbit(e.number())))
        out += "(" + s + ")";
      else
        out += s;
      return;
    }
    case NodeKind::Var: out += 'x'; return;
    case NodeKind::Add:
    case NodeKind::Sub:
    case NodeKind::Mul:
    case NodeKind::Div: {
      const int p = precedence(e);
      print_wrapped(e.lhs(), precedence(e.lhs()) < p, out);
      switch (e.kind()) {
        case NodeKind::Add: out += " + "; break;
        case NodeKind::Sub: out += " - "; break;
        case NodeKind::Mul: out += "*"; break;
        default: out += "/"; break;
      }
      print_wrapped(e.rhs(), precedence(e.rhs()) <= p, out);
      return;
    }
    case NodeKind::Neg:
      out += '-';
      print_wrapped(e.arg(), precedence(e.arg()) < 3, out);
      return;
    case NodeKind::Pow: {
      print_wrapped(e.arg(), precedence(e.arg()) < 5, out);
      const Rational& r = e.exponent();
      if (r.is_integer() && r.num >= 0)
        out += "^" + std::to_string(r.num);
      else if (r.is_integer())
        out += "^(" + std::to_string(r.num) + ")";
      else
        out += "^(" + std::to_string(r.num) + "/" + std::to_string(r.den) + ")";
      return;
    }
    case NodeKind::SineType:
    case NodeKind::CosineType:
      out += e.kind() == NodeKind::SineType ? "S(" : "C(";
      out += format_number(e.number());
      out += "; ";
      print(e.arg(), out);
      out += ')';
      return;
    default:
      out += function_name(e.kind());
      out += '(';
      print(e.arg(), out);
      out += ')';
      return;
  }
}

}  // namespace detail

/// Canonical text form; parse(to_string(e)) == e structurally.
inline std::string to_string(const Expr& e) {
  std::string out;
  detail::print(e, out);
  return out;
}

// ---------------------------------------------------------------------------
// Parsing

namespace detail {

// Wide enough for exact products of two int64 numerators.
__extension__ typedef __int128 i128;

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  Expr parse_all() {
    skip_ws();
    if (pos_ >= s_.size()) error({"expression"}, "empty input");
    Expr e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) error({"'+'", "'-'", "'*'", "'/'", "'^'", "end of input"}, "unexpected character");
    return e;
  }

 private:
  [[noreturn]] void error(std::vector<std::string> expected, const std::string& detail) {
    throw ParseError(pos_, std::move(expected), detail);
  }

  void skip_ws() {
    while (pos_ < s_.size() && (s_[pos_] == ' ' || s_[pos_] == '\t' || s_[pos_] == '\n' || s_[pos_] == '\r'))
      ++pos_;
  }

  bool accept(char c) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == c) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char c) {
    if (!accept(c)) error({std::string("'") + c + "'"}, "missing token");
  }

  bool at_number() {
    skip_ws();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }

  // Returns the literal text of a number token.
  std::string_view number_token() {
    skip_ws();
    const std::size_t start = pos_;
    auto digits = [&] {
      std::size_t n = 0;
      while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_, ++n;
      return n;
    };
    std::size_t n = digits();
    if (pos_ < s_.size() && s_[pos_] == '.') {
      ++pos_;
      n += digits();
    }
    if (n == 0) {
      pos_ = start;
      error({"number"}, "malformed number");
    }
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      const std::size_t save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // "2e" is 2 followed by identifier e
    }
    return s_.substr(start, pos_ - start);
  }

  double number_value() {
    const std::size_t start = pos_;
    std::string_view tok = number_token();
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc() || !std::isfinite(v)) {
      pos_ = start;
      error({"finite number"}, "number out of range");
    }
    return v;
  }

  std::string identifier() {
    skip_ws();
    const std::size_t start = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    return std::string(s_.substr(start, pos_ - start));
  }

  Expr parse_expr() {
    Expr e = parse_term();
    for (;;) {
      if (accept('+'))
        e = std::move(e) + parse_term();
      else if (accept('-'))
        e = std::move(e) - parse_term();
      else
        return e;
    }
  }

  Expr parse_term() {
    Expr e = parse_unary();
    for (;;) {
      if (accept('*'))
        e = std::move(e) * parse_unary();
      else if (accept('/'))
        e = std::move(e) / parse_unary();
      else
        return e;
    }
  }

  Expr parse_unary() {
    if (accept('-')) return ex::neg(parse_unary());
    return parse_power();
  }

  Expr parse_power() {
    Expr base = parse_primary();
    if (accept('^')) return ex::pow(std::move(base), parse_exponent());
    return base;
  }

  // --- exact rational arithmetic for exponents

  static Rational checked(i128 n, i128 d, Parser& p) {
    constexpr i128 lim = static_cast<i128>(INT64_MAX);
    if (d < 0) n = -n, d = -d;
    i128 a = n < 0 ? -n : n, b = d;
    while (b != 0) {
      i128 t = a % b;
      a = b;
      b = t;
    }
    if (a > 1) n /= a, d /= a;
    if (n > lim || n < -lim || d > lim || d == 0) p.error({"small rational"}, "exponent overflow");
    return {static_cast<std::int64_t>(n), static_cast<std::int64_t>(d)};
  }

  Rational rational_literal() {
    const std::size_t start = pos_;
    std::string_view tok = number_token();
    i128 num = 0, den = 1;
    int exp10 = 0;
    std::size_t i = 0;
    bool frac = false;
    for (; i < tok.size() && tok[i] != 'e' && tok[i] != 'E'; ++i) {
      if (tok[i] == '.') {
        frac = true;
        continue;
      }
      num = num * 10 + (tok[i] - '0');
      if (frac) den *= 10;
      if (num > static_cast<i128>(INT64_MAX) || den > static_cast<i128>(INT64_MAX)) {
        pos_ = start;
        error({"small rational"}, "exponent literal too long");
      }
    }
    if (i < tok.size()) {
      auto [p, ec] = std::from_chars(tok.data() + i + 1 + (tok[i + 1] == '+'), tok.data() + tok.size(), exp10);
      if (ec != std::errc() || exp10 > 18 || exp10 < -18) {
        pos_ = start;
        error({"small rational"}, "exponent literal out of range");
      }
    }
    for (; exp10 > 0; --exp10) num *= 10;
    for (; exp10 < 0; ++exp10) den *= 10;
    return checked(num, den, *this);
  }

  Rational rat_primary() {
    if (accept('(')) {
      Rational r = rat_sum();
      expect(')');
      return r;
    }
    if (at_number()) return rational_literal();
    error({"number", "'('", "'-'"}, "exponent must be a constant rational");
  }

  Rational rat_unary() {
    if (accept('-')) {
      Rational r = rat_unary();
      return {-r.num, r.den};
    }
    return rat_primary();
  }

  Rational rat_product() {
    Rational r = rat_unary();
    for (;;) {
      if (accept('*')) {
        Rational b = rat_unary();
        r = checked(static_cast<i128>(r.num) * b.num, static_cast<i128>(r.den) * b.den, *this);
      } else if (accept('/')) {
        const std::size_t at = pos_;
        Rational b = rat_unary();
        if (b.num == 0) {
          pos_ = at;
          error({"non-zero divisor"}, "division by zero in exponent");
        }
        r = checked(static_cast<i128>(r.num) * b.den, static_cast<i128>(r.den) * b.num, *this);
      } else {
        return r;
      }
    }
  }

  Rational rat_sum() {
    Rational r = rat_product();
    for (;;) {
      int sign = 0;
      if (accept('+'))
        sign = 1;
      else if (accept('-'))
        sign = -1;
      else
        return r;
      Rational b = rat_product();
      r = checked(static_cast<i128>(r.num) * b.den + sign * static_cast<i128>(b.num) * r.den,
                  static_cast<i128>(r.den) * b.den, *this);
    }
  }

  Rational parse_exponent() { return rat_unary(); }

  double signed_number() {
    bool negative = false;
    for (;;) {
      if (accept('-'))
        negative = !negative;
      else if (!accept('+'))
        break;
    }
    if (!at_number()) error({"number"}, "expected numeric parameter");
    const double v = number_value();
    return negative ? -v : v;
  }

  Expr parse_primary() {
    skip_ws();
    if (pos_ >= s_.size()) error({"number", "'x'", "function", "'('"}, "unexpected end of input");
    if (accept('(')) {
      Expr e = parse_expr();
      expect(')');
      return e;
    }
    if (at_number()) return ex::constant(number_value());
    const std::size_t start = pos_;
    const std::string id = identifier();
    if (id.empty()) error({"number", "'x'", "function", "'('"}, "unexpected character");
    if (id == "x") return ex::var();
    if (id == "pi") return ex::constant(3.14159265358979323846);
    if (id == "e") return ex::constant(2.71828182845904523536);
    if (id == "S" || id == "C") {
      expect('(');
      const double t = signed_number();
      expect(';');
      Expr a = parse_expr();
      expect(')');
      return id == "S" ? ex::sine_type(t, std::move(a)) : ex::cosine_type(t, std::move(a));
    }
    static constexpr std::pair<const char*, NodeKind> kFunctions[] = {
        {"exp", NodeKind::Exp}, {"log", NodeKind::Log},   {"sin", NodeKind::Sin},   {"cos", NodeKind::Cos},
        {"sinh", NodeKind::Sinh}, {"cosh", NodeKind::Cosh}, {"sqrt", NodeKind::Sqrt},
    };
    for (const auto& [name, kind] : kFunctions) {
      if (id == name) {
        expect('(');
        Expr a = parse_expr();
        expect(')');
        return ex::unary(kind, std::move(a));
      }
    }
    pos_ = start;
    error({"x", "pi", "e", "exp", "log", "sin", "cos", "sinh", "cosh", "sqrt", "S", "C"},
          "unknown identifier '" + id + "'");
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

}  // namespace detail

inline Expr parse(std::string_view text) { return detail::Parser(text).parse_all(); }

// ---------------------------------------------------------------------------
// Evaluation

namespace detail {

inline double lift(double v, double) { return v; }
inline Jet lift(double v, const Jet& like) { return Jet::constant(v, like.base_point(), like.order()); }
inline double head(double v) { return v; }
inline double head(const Jet& j) { return j[0]; }

inline double fexp(double v) { return std::exp(v); }
inline double flog(double v) {
  if (!(v > 0.0)) fail(ErrorKind::DomainViolation, "log of non-positive value", v);
  return std::log(v);
}
inline double fsin(double v) { return std::sin(v); }
inline double fcos(double v) { return std::cos(v); }
inline double fsinh(double v) { return std::sinh(v); }
inline double fcosh(double v) { return std::cosh(v); }
inline double fsqrt(double v) {
  if (v < 0.0) fail(ErrorKind::DomainViolation, "sqrt of negative value", v);
  return std::sqrt(v);
}
inline Jet fexp(const Jet& v) { return meanlab::exp(v); }
inline Jet flog(const Jet& v) { return meanlab::log(v); }
inline Jet fsin(const Jet& v) { return meanlab::sin(v); }
inline Jet fcos(const Jet& v) { return meanlab::cos(v); }
inline Jet fsinh(const Jet& v) { return meanlab::sinh(v); }
inline Jet fcosh(const Jet& v) { return meanlab::cosh(v); }
inline Jet fsqrt(const Jet& v) { return meanlab::sqrt(v); }

// Same multiplication order as the jet version, so order-0 jets agree
// with plain evaluation bit for bit.
inline double integer_power(double v, std::int64_t n) {
  if (n < 0) {
    if (v == 0.0) fail(ErrorKind::DomainViolation, "negative power of zero", v);
    return 1.0 / integer_power(v, -n);
  }
  double result = 1.0, base = v;
  while (n > 0) {
    if (n & 1) result = result * base;
    n >>= 1;
    if (n > 0) base = base * base;
  }
  return result;
}
inline Jet integer_power(const Jet& v, std::int64_t n) { return meanlab::detail::integer_pow(v, n); }
inline double positive_power(double v, double e) { return e == 0.5 ? std::sqrt(v) : std::pow(v, e); }
inline Jet positive_power(const Jet& v, double e) { return meanlab::detail::positive_pow(v, e); }

// Real power with rational exponent: odd denominators extend to negative
// bases (x^(1/3) is the real cube root).
template <class T>
T rational_power(const T& v, const Rational& r) {
  if (r.is_integer()) return integer_power(v, r.num);
  const double v0 = head(v);
  const double e = r.value();
  if (v0 > 0.0) return positive_power(v, e);
  if (v0 == 0.0) {
    if constexpr (std::is_same_v<T, double>) {
      if (e > 0.0) return 0.0;
    } else {
      if (e > 0.0 && v.order() == 0) return v;
    }
    fail(ErrorKind::DomainViolation, "fractional power at zero is not smooth", v0);
  }
  if (r.den % 2 == 0) fail(ErrorKind::DomainViolation, "even root of negative value", v0);
  T mag = positive_power(T(-v), e);
  return (r.num % 2 != 0) ? T(-mag) : mag;
}

template <class T>
T evaluate(const Expr& e, const T& x) {
  switch (e.kind()) {
    case NodeKind::Const: return lift(e.number(), x);
    case NodeKind::Var: return x;
    case NodeKind::Add: return evaluate(e.lhs(), x) + evaluate(e.rhs(), x);
    case NodeKind::Sub: return evaluate(e.lhs(), x) - evaluate(e.rhs(), x);
    case NodeKind::Mul: return evaluate(e.lhs(), x) * evaluate(e.rhs(), x);
    case NodeKind::Div: {
      T den = evaluate(e.rhs(), x);
      if (head(den) == 0.0) fail(ErrorKind::DomainViolation, "division by zero", head(x));
      return evaluate(e.lhs(), x) / den;
    }
    case NodeKind::Neg: return -evaluate(e.arg(), x);
    case NodeKind::Pow: return rational_power(evaluate(e.arg(), x), e.exponent());
    case NodeKind::Exp: return fexp(evaluate(e.arg(), x));
    case NodeKind::Log: return flog(evaluate(e.arg(), x));
    case NodeKind::Sin: return fsin(evaluate(e.arg(), x));
    case NodeKind::Cos: return fcos(evaluate(e.arg(), x));
    case NodeKind::Sinh: return fsinh(evaluate(e.arg(), x));
    case NodeKind::Cosh: return fcosh(evaluate(e.arg(), x));
    case NodeKind::Sqrt: return fsqrt(evaluate(e.arg(), x));
    case NodeKind::SineType:
    case NodeKind::CosineType: {
      const double t = e.number();
      const bool sine = e.kind() == NodeKind::SineType;
      T u = evaluate(e.arg(), x);
      if (t == 0.0) return sine ? u : lift(1.0, x);
      const T w = u * std::sqrt(std::fabs(t));
      if (t < 0.0) return sine ? fsin(w) : fcos(w);
      return sine ? fsinh(w) : fcosh(w);
    }
  }
  return x;
}

}  // namespace detail

/// Plain value of `e` at `x`.
inline double eval(const Expr& e, double x) { return detail::evaluate(e, x); }

/// Jet of `e` at `x`: coefficient k is e^(k)(x)/k!.
inline Jet eval_jet(const Expr& e, double x, int order) {
  return detail::evaluate(e, Jet::variable(x, order));
}

/// Composition: the jet of e∘u where `u` is the jet of the inner function.
inline Jet compose(const Expr& e, const Jet& u) { return detail::evaluate(e, u); }

}  // namespace meanlab
