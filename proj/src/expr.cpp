#include "symlorentz/expr.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <utility>

#include <fmt/format.h>

#include "symlorentz/dual.hpp"

namespace symlorentz {

ParseError::ParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(fmt::format("{} at offset {}", what, offset)), offset_(offset) {}

EvalError::EvalError(const std::string& what, double u, double v)
    : std::domain_error(fmt::format("{} at (u, v) = ({:.17g}, {:.17g})", what, u, v)), u_(u), v_(v) {}

struct Expr::Node {
  Kind kind;
  double number;
  Func fn;
  Expr lhs;
  Expr rhs;
};

Expr::Expr() : node_(zero_node()) {}

Expr::Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

Expr Expr::make(Kind kind, double number, Func fn, Expr lhs, Expr rhs) {
  return Expr(std::make_shared<const Node>(Node{kind, number, fn, std::move(lhs), std::move(rhs)}));
}

const std::shared_ptr<const Expr::Node>& Expr::zero_node() {
  // Children of leaf nodes are never read; null children end the recursion here.
  static const std::shared_ptr<const Node> node = std::make_shared<const Node>(
      Node{Kind::Number, 0.0, Func::Sin, Expr(nullptr), Expr(nullptr)});
  return node;
}

Expr Expr::number(double value) {
  if (value == 0.0 && !std::signbit(value)) return Expr();
  return make(Kind::Number, value, Func::Sin, Expr(), Expr());
}

Expr Expr::var(Var which) {
  return make(which == Var::U ? Kind::VarU : Kind::VarV, 0.0, Func::Sin, Expr(), Expr());
}

Expr::Kind Expr::kind() const { return node_->kind; }
double Expr::number_value() const { return node_->number; }
Func Expr::func() const { return node_->fn; }
const Expr& Expr::lhs() const { return node_->lhs; }
const Expr& Expr::rhs() const { return node_->rhs; }

bool Expr::is_number(double value) const { return kind() == Kind::Number && number_value() == value; }

std::size_t Expr::depth() const {
  switch (kind()) {
    case Kind::Number:
    case Kind::VarU:
    case Kind::VarV:
      return 1;
    case Kind::Neg:
    case Kind::Call:
    case Kind::Pow:
      return 1 + lhs().depth();
    default:
      return 1 + std::max(lhs().depth(), rhs().depth());
  }
}

bool operator==(const Expr& a, const Expr& b) {
  if (a.node_ == b.node_) return true;
  if (a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case Expr::Kind::Number:
      return a.number_value() == b.number_value();
    case Expr::Kind::VarU:
    case Expr::Kind::VarV:
      return true;
    case Expr::Kind::Neg:
      return a.lhs() == b.lhs();
    case Expr::Kind::Call:
      return a.func() == b.func() && a.lhs() == b.lhs();
    case Expr::Kind::Pow:
      return a.number_value() == b.number_value() && a.lhs() == b.lhs();
    default:
      return a.lhs() == b.lhs() && a.rhs() == b.rhs();
  }
}

Expr operator+(const Expr& a, const Expr& b) {
  if (a.is_number(0.0)) return b;
  if (b.is_number(0.0)) return a;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number)
    return Expr::number(a.number_value() + b.number_value());
  return Expr::make(Expr::Kind::Add, 0.0, Func::Sin, a, b);
}

Expr operator-(const Expr& a, const Expr& b) {
  if (b.is_number(0.0)) return a;
  if (a.is_number(0.0)) return -b;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number)
    return Expr::number(a.number_value() - b.number_value());
  return Expr::make(Expr::Kind::Sub, 0.0, Func::Sin, a, b);
}

Expr operator*(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) || b.is_number(0.0)) return Expr();
  if (a.is_number(1.0)) return b;
  if (b.is_number(1.0)) return a;
  if (a.kind() == Expr::Kind::Number && b.kind() == Expr::Kind::Number)
    return Expr::number(a.number_value() * b.number_value());
  return Expr::make(Expr::Kind::Mul, 0.0, Func::Sin, a, b);
}

Expr operator/(const Expr& a, const Expr& b) {
  if (a.is_number(0.0) && !b.is_number(0.0)) return Expr();
  if (b.is_number(1.0)) return a;
  return Expr::make(Expr::Kind::Div, 0.0, Func::Sin, a, b);
}

Expr operator-(const Expr& a) {
  if (a.kind() == Expr::Kind::Number) return Expr::number(-a.number_value());
  if (a.kind() == Expr::Kind::Neg) return a.lhs();
  return Expr::make(Expr::Kind::Neg, 0.0, Func::Sin, a, Expr());
}

Expr Expr::pow(const Expr& base, double exponent) {
  if (exponent == 0.0) return number(1.0);
  if (exponent == 1.0) return base;
  return make(Kind::Pow, exponent, Func::Sin, base, Expr());
}

Expr Expr::call(Func fn, const Expr& arg) { return make(Kind::Call, 0.0, fn, arg, Expr()); }

std::string_view func_name(Func fn) {
  switch (fn) {
    case Func::Sin: return "sin";
    case Func::Cos: return "cos";
    case Func::Tan: return "tan";
    case Func::Exp: return "exp";
    case Func::Ln: return "ln";
    case Func::Sqrt: return "sqrt";
    case Func::Atan: return "atan";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Parser. Builds the tree verbatim (no folding) so that printing and
// re-parsing reproduces it.

class ExprParser {
 public:
  explicit ExprParser(std::string_view text) : s_(text) {}

  Expr run() {
    Expr e = expr();
    skip_ws();
    if (pos_ != s_.size()) throw ParseError(fmt::format("unexpected '{}'", s_[pos_]), pos_);
    return e;
  }

 private:
  using K = Expr::Kind;

  static Expr node(K kind, Expr lhs, Expr rhs = Expr(), double number = 0.0, Func fn = Func::Sin) {
    return Expr::make(kind, number, fn, std::move(lhs), std::move(rhs));
  }

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }

  bool accept(char ch) {
    skip_ws();
    if (pos_ < s_.size() && s_[pos_] == ch) {
      ++pos_;
      return true;
    }
    return false;
  }

  void expect(char ch) {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError(fmt::format("expected '{}' but input ended", ch), pos_);
    if (s_[pos_] != ch) throw ParseError(fmt::format("expected '{}'", ch), pos_);
    ++pos_;
  }

  Expr expr() {
    Expr e = term();
    for (;;) {
      if (accept('+')) {
        e = node(K::Add, e, term());
      } else if (accept('-')) {
        e = node(K::Sub, e, term());
      } else {
        return e;
      }
    }
  }

  Expr term() {
    Expr e = factor();
    for (;;) {
      if (accept('*')) {
        e = node(K::Mul, e, factor());
      } else if (accept('/')) {
        e = node(K::Div, e, factor());
      } else {
        return e;
      }
    }
  }

  Expr factor() {
    Expr b = base();
    if (!accept('^')) return b;
    Expr p = base();
    if (p.kind() == K::Number) return node(K::Pow, b, Expr(), p.number_value());
    // a^b = exp(b * ln(a))
    return node(K::Call, node(K::Mul, p, node(K::Call, b, Expr(), 0.0, Func::Ln)), Expr(), 0.0,
                Func::Exp);
  }

  Expr base() {
    skip_ws();
    if (pos_ >= s_.size()) throw ParseError("unexpected end of input", pos_);
    const char ch = s_[pos_];
    if (std::isdigit(static_cast<unsigned char>(ch)) || ch == '.') return number();
    if (std::isalpha(static_cast<unsigned char>(ch))) return identifier();
    if (ch == '(') {
      ++pos_;
      Expr e = expr();
      expect(')');
      return e;
    }
    if (ch == '-') {
      ++pos_;
      Expr b = base();
      if (b.kind() == K::Number) return Expr::number(-b.number_value());  // signed literal
      return node(K::Neg, b);
    }
    throw ParseError(fmt::format("unexpected '{}'", ch), pos_);
  }

  Expr number() {
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
    if (n == 0) throw ParseError("malformed number", start);
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      std::size_t save = pos_++;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (digits() == 0) pos_ = save;  // 'e' belongs to something else
    }
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, value);
    if (ec != std::errc() || ptr != s_.data() + pos_) throw ParseError("malformed number", start);
    return node(K::Number, Expr(), Expr(), value);
  }

  Expr identifier() {
    const std::size_t start = pos_;
    while (pos_ < s_.size() && std::isalpha(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    const std::string_view name = s_.substr(start, pos_ - start);
    if (name == "u") return node(K::VarU, Expr());
    if (name == "v") return node(K::VarV, Expr());
    static constexpr Func funcs[] = {Func::Sin, Func::Cos, Func::Tan, Func::Exp,
                                     Func::Ln,  Func::Sqrt, Func::Atan};
    for (Func fn : funcs) {
      if (name == func_name(fn)) {
        expect('(');
        Expr arg = expr();
        expect(')');
        return node(K::Call, arg, Expr(), 0.0, fn);
      }
    }
    throw ParseError(fmt::format("unknown identifier '{}'", name), start);
  }

  std::string_view s_;
  std::size_t pos_ = 0;
};

Expr parse(std::string_view text) { return ExprParser(text).run(); }

namespace {

std::string number_text(double x) {
  std::string s = fmt::format("{:.17g}", x);
  return x < 0 ? "(" + s + ")" : s;
}

}  // namespace

std::string to_string(const Expr& e) {
  using K = Expr::Kind;
  switch (e.kind()) {
    case K::Number: return number_text(e.number_value());
    case K::VarU: return "u";
    case K::VarV: return "v";
    case K::Neg: return "-(" + to_string(e.lhs()) + ")";
    case K::Add: return "(" + to_string(e.lhs()) + " + " + to_string(e.rhs()) + ")";
    case K::Sub: return "(" + to_string(e.lhs()) + " - " + to_string(e.rhs()) + ")";
    case K::Mul: return "(" + to_string(e.lhs()) + " * " + to_string(e.rhs()) + ")";
    case K::Div: return "(" + to_string(e.lhs()) + " / " + to_string(e.rhs()) + ")";
    case K::Pow: return "(" + to_string(e.lhs()) + ")^" + number_text(e.number_value());
    case K::Call: return std::string(func_name(e.func())) + "(" + to_string(e.lhs()) + ")";
  }
  return {};
}

Expr diff(const Expr& e, Var var) {
  using K = Expr::Kind;
  const Expr& a = e.lhs();
  const Expr& b = e.rhs();
  switch (e.kind()) {
    case K::Number: return Expr();
    case K::VarU: return Expr::number(var == Var::U ? 1.0 : 0.0);
    case K::VarV: return Expr::number(var == Var::V ? 1.0 : 0.0);
    case K::Neg: return -diff(a, var);
    case K::Add: return diff(a, var) + diff(b, var);
    case K::Sub: return diff(a, var) - diff(b, var);
    case K::Mul: return diff(a, var) * b + a * diff(b, var);
    case K::Div: return diff(a, var) / b - a * diff(b, var) / Expr::pow(b, 2.0);
    case K::Pow: {
      const double p = e.number_value();
      return Expr::number(p) * Expr::pow(a, p - 1.0) * diff(a, var);
    }
    case K::Call: {
      const Expr da = diff(a, var);
      if (da.is_number(0.0)) return Expr();
      switch (e.func()) {
        case Func::Sin: return Expr::call(Func::Cos, a) * da;
        case Func::Cos: return -(Expr::call(Func::Sin, a) * da);
        case Func::Tan: return da / Expr::pow(Expr::call(Func::Cos, a), 2.0);
        case Func::Exp: return e * da;
        case Func::Ln: return da / a;
        case Func::Sqrt: return da / (Expr::number(2.0) * e);
        case Func::Atan: return da / (Expr::number(1.0) + Expr::pow(a, 2.0));
      }
    }
  }
  return Expr();
}

namespace {

template <class T>
struct Evaluator {
  const T& u;
  const T& v;

  [[noreturn]] void fail(const std::string& what) const {
    throw EvalError(what, value_of(u), value_of(v));
  }

  T operator()(const Expr& e) const {
    using K = Expr::Kind;
    using std::atan, std::cos, std::exp, std::log, std::pow, std::sin, std::sqrt, std::tan;
    switch (e.kind()) {
      case K::Number: return T(e.number_value());
      case K::VarU: return u;
      case K::VarV: return v;
      case K::Neg: return -(*this)(e.lhs());
      case K::Add: return (*this)(e.lhs()) + (*this)(e.rhs());
      case K::Sub: return (*this)(e.lhs()) - (*this)(e.rhs());
      case K::Mul: return (*this)(e.lhs()) * (*this)(e.rhs());
      case K::Div: {
        const T den = (*this)(e.rhs());
        if (value_of(den) == 0.0) fail("division by zero");
        return (*this)(e.lhs()) / den;
      }
      case K::Pow: {
        const T b = (*this)(e.lhs());
        const double p = e.number_value();
        const double bv = value_of(b);
        const bool integral = std::floor(p) == p;
        if (bv == 0.0 && (p < 0.0 || !integral)) fail("power of zero base");
        if (bv < 0.0 && !integral) fail("fractional power of negative base");
        return pow(b, p);
      }
      case K::Call: {
        const T a = (*this)(e.lhs());
        switch (e.func()) {
          case Func::Sin: return sin(a);
          case Func::Cos: return cos(a);
          case Func::Tan: return tan(a);
          case Func::Exp: return exp(a);
          case Func::Atan: return atan(a);
          case Func::Ln:
            if (value_of(a) <= 0.0) fail("ln of non-positive argument");
            return log(a);
          case Func::Sqrt:
            if (value_of(a) <= 0.0) fail("sqrt of non-positive argument");
            return sqrt(a);
        }
      }
    }
    return T(0.0);
  }
};

}  // namespace

template <class T>
T eval(const Expr& e, const T& u, const T& v) {
  return Evaluator<T>{u, v}(e);
}

template double eval<double>(const Expr&, const double&, const double&);
template Dual3 eval<Dual3>(const Expr&, const Dual3&, const Dual3&);
template Dual3x2 eval<Dual3x2>(const Expr&, const Dual3x2&, const Dual3x2&);

}  // namespace symlorentz
