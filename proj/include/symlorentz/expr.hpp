#pragma once

// User functions of the two characteristic variables u and v.
//
//   expr   := term (('+'|'-') term)*
//   term   := factor (('*'|'/') factor)*
//   factor := base ('^' base)?
//   base   := number | 'u' | 'v' | func '(' expr ')' | '(' expr ')' | '-' base
//   func   := sin | cos | tan | exp | ln | sqrt | atan
//
// A '^' whose exponent is not a literal is rewritten to exp(b * ln(a)).

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>

namespace symlorentz {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::size_t offset);
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

/// Evaluation outside an operation's domain (ln/sqrt of non-positive,
/// division by zero, fractional power of a negative base).
class EvalError : public std::domain_error {
 public:
  EvalError(const std::string& what, double u, double v);
  double u() const noexcept { return u_; }
  double v() const noexcept { return v_; }

 private:
  double u_, v_;
};

enum class Var { U, V };

enum class Func { Sin, Cos, Tan, Exp, Ln, Sqrt, Atan };

class Expr {
 public:
  enum class Kind { Number, VarU, VarV, Neg, Add, Sub, Mul, Div, Pow, Call };

  /// Zero constant.
  Expr();

  static Expr number(double value);
  static Expr var(Var which);

  // Builders fold constants and the identities 0 + a, 1 * a, a ^ 1, - - a.
  friend Expr operator+(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a, const Expr& b);
  friend Expr operator*(const Expr& a, const Expr& b);
  friend Expr operator/(const Expr& a, const Expr& b);
  friend Expr operator-(const Expr& a);
  static Expr pow(const Expr& base, double exponent);
  static Expr call(Func fn, const Expr& arg);

  Kind kind() const;
  double number_value() const;  // Number, or the literal exponent of Pow
  Func func() const;
  const Expr& lhs() const;  // operand of Neg/Call/Pow, left of binary ops
  const Expr& rhs() const;

  bool is_number(double value) const;
  std::size_t depth() const;

  /// Structural equality.
  friend bool operator==(const Expr& a, const Expr& b);

 private:
  friend class ExprParser;
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node);
  static const std::shared_ptr<const Node>& zero_node();
  static Expr make(Kind kind, double number, Func fn, Expr lhs, Expr rhs);

  std::shared_ptr<const Node> node_;
};

Expr parse(std::string_view text);

/// Fully parenthesized; parse(to_string(e)) reproduces e.
std::string to_string(const Expr& e);

Expr diff(const Expr& e, Var var);

/// Evaluates with u and v of any scalar type (double, Dual3, Dual3x2).
template <class T>
T eval(const Expr& e, const T& u, const T& v);

std::string_view func_name(Func fn);

}  // namespace symlorentz
