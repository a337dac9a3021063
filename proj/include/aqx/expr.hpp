#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace aqx {

/// Small expression language for coefficients a(x), matrices A^i(x) and
/// integrands f(x, y, xi).
///
///   expr   := term (('+'|'-') term)*
///   term   := factor (('*'|'/') factor)*
///   factor := '-' factor | power
///   power  := base ('^' ['-'] integer)*      (right associative)
///   base   := number | ident | ident '(' expr (',' expr)* ')' | '(' expr ')'
///
/// Identifiers: x1..x3, y1..y3, xi1..xiD, the constant `pi`, and the
/// functions sin, cos, exp, abs (one argument) and min, max (two or more).
/// Exponents are integers only.
namespace expr {

enum class Op { constant, variable, neg, add, sub, mul, div, pow, call };
enum class Fn { sin, cos, exp, abs, min, max };
enum class VarKind { x, y, xi };

struct Var {
  VarKind kind = VarKind::x;
  int index = 0;  // zero-based
  friend bool operator==(const Var&, const Var&) = default;
};

struct Node;
using NodePtr = std::shared_ptr<const Node>;

struct Node {
  Op op = Op::constant;
  double value = 0.0;         // constant
  Var var;                    // variable
  int exponent = 0;           // pow
  Fn fn = Fn::sin;            // call
  std::vector<NodePtr> args;  // operands
  std::size_t offset = 0;     // byte offset in the source text
};

}  // namespace expr

/// Values bound to the free variables during evaluation.
struct Bindings {
  std::span<const double> x;
  std::span<const double> y;
  std::span<const double> xi;
};

class Expr {
 public:
  Expr() = default;
  explicit Expr(expr::NodePtr root) : root_(std::move(root)) {}

  /// Throws SyntaxError (with byte offset) or ConfigError("UnknownIdentifier").
  static Expr parse(std::string_view text);
  static Expr constant(double v);

  /// Throws ConfigError("UnboundVariable") or NumericalError("DivisionByZero").
  double eval(const Bindings& b) const;

  /// Canonical, fully parenthesized text; parse(print()) reproduces the tree.
  std::string print() const;

  /// Symbolic partial derivative. abs/min/max subtrees that depend on `v`
  /// raise NumericalError("NonDifferentiable") naming the subtree offset.
  Expr derivative(expr::Var v) const;
  /// Partials with respect to xi1..xi{d}.
  std::vector<Expr> grad_xi(int d) const;

  bool depends_on(expr::VarKind kind) const;
  bool depends_on(expr::Var v) const;
  /// Largest one-based index used for a variable kind (0 when absent).
  int max_index(expr::VarKind kind) const;
  bool is_constant() const;

  /// Conservative bound on the highest y-frequency (cycles per unit cell) of
  /// the expression; nullopt when the y-dependence is not a trigonometric
  /// polynomial.
  std::optional<double> y_bandwidth() const;

  const expr::NodePtr& root() const noexcept { return root_; }
  explicit operator bool() const noexcept { return static_cast<bool>(root_); }

 private:
  expr::NodePtr root_;
};

}  // namespace aqx
