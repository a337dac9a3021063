#include "aqx/expr.hpp"

#include <algorithm>
#include <charconv>
#include <cctype>
#include <cmath>
#include <limits>
#include <numbers>

#include "aqx/errors.hpp"

namespace aqx {

using expr::Fn;
using expr::Node;
using expr::NodePtr;
using expr::Op;
using expr::Var;
using expr::VarKind;

namespace {

// ---------------------------------------------------------------------------
// Node construction with light constant folding.

NodePtr make_const(double v, std::size_t off = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::constant;
  n->value = v;
  n->offset = off;
  return n;
}

NodePtr make_var(Var v, std::size_t off = 0) {
  auto n = std::make_shared<Node>();
  n->op = Op::variable;
  n->var = v;
  n->offset = off;
  return n;
}

bool is_const(const NodePtr& n, double v) { return n->op == Op::constant && n->value == v; }
bool is_const(const NodePtr& n) { return n->op == Op::constant; }

NodePtr make_node(Op op, std::vector<NodePtr> args, std::size_t off) {
  auto n = std::make_shared<Node>();
  n->op = op;
  n->args = std::move(args);
  n->offset = off;
  return n;
}

NodePtr make_neg(NodePtr a, std::size_t off = 0) {
  if (is_const(a)) return make_const(-a->value, off);
  if (a->op == Op::neg) return a->args[0];
  return make_node(Op::neg, {std::move(a)}, off);
}

NodePtr make_add(NodePtr a, NodePtr b, std::size_t off = 0) {
  if (is_const(a) && is_const(b)) return make_const(a->value + b->value, off);
  if (is_const(a, 0.0)) return b;
  if (is_const(b, 0.0)) return a;
  return make_node(Op::add, {std::move(a), std::move(b)}, off);
}

NodePtr make_sub(NodePtr a, NodePtr b, std::size_t off = 0) {
  if (is_const(a) && is_const(b)) return make_const(a->value - b->value, off);
  if (is_const(b, 0.0)) return a;
  if (is_const(a, 0.0)) return make_neg(std::move(b), off);
  return make_node(Op::sub, {std::move(a), std::move(b)}, off);
}

NodePtr make_mul(NodePtr a, NodePtr b, std::size_t off = 0) {
  if (is_const(a) && is_const(b)) return make_const(a->value * b->value, off);
  if (is_const(a, 0.0) || is_const(b, 0.0)) return make_const(0.0, off);
  if (is_const(a, 1.0)) return b;
  if (is_const(b, 1.0)) return a;
  return make_node(Op::mul, {std::move(a), std::move(b)}, off);
}

NodePtr make_div(NodePtr a, NodePtr b, std::size_t off = 0) {
  if (is_const(a) && is_const(b) && b->value != 0.0) return make_const(a->value / b->value, off);
  if (is_const(a, 0.0)) return make_const(0.0, off);
  if (is_const(b, 1.0)) return a;
  return make_node(Op::div, {std::move(a), std::move(b)}, off);
}

double ipow(double base, int k) {
  if (k < 0) return 1.0 / ipow(base, -k);
  double r = 1.0;
  while (k > 0) {
    if (k & 1) r *= base;
    base *= base;
    k >>= 1;
  }
  return r;
}

NodePtr make_pow(NodePtr a, int k, std::size_t off = 0) {
  if (k == 0) return make_const(1.0, off);
  if (k == 1) return a;
  if (is_const(a) && !(a->value == 0.0 && k < 0)) return make_const(ipow(a->value, k), off);
  auto n = make_node(Op::pow, {std::move(a)}, off);
  std::const_pointer_cast<Node>(n)->exponent = k;
  return n;
}

NodePtr make_call(Fn fn, std::vector<NodePtr> args, std::size_t off = 0) {
  auto n = make_node(Op::call, std::move(args), off);
  std::const_pointer_cast<Node>(n)->fn = fn;
  return n;
}

// ---------------------------------------------------------------------------
// Parser

class Parser {
 public:
  explicit Parser(std::string_view text) : s_(text) {}

  NodePtr parse_all() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "expr/parse: empty expression");
    auto e = parse_expr();
    skip_ws();
    if (pos_ != s_.size()) throw SyntaxError(pos_, "expr/parse: unexpected trailing input");
    return e;
  }

 private:
  std::string_view s_;
  std::size_t pos_ = 0;

  void skip_ws() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
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
    if (!accept(c)) throw SyntaxError(pos_, std::string("expr/parse: expected '") + c + "'");
  }

  NodePtr parse_expr() {
    auto lhs = parse_term();
    for (;;) {
      skip_ws();
      const auto off = pos_;
      if (accept('+'))
        lhs = make_node(Op::add, {lhs, parse_term()}, off);
      else if (accept('-'))
        lhs = make_node(Op::sub, {lhs, parse_term()}, off);
      else
        return lhs;
    }
  }

  NodePtr parse_term() {
    auto lhs = parse_factor();
    for (;;) {
      skip_ws();
      const auto off = pos_;
      if (accept('*'))
        lhs = make_node(Op::mul, {lhs, parse_factor()}, off);
      else if (accept('/'))
        lhs = make_node(Op::div, {lhs, parse_factor()}, off);
      else
        return lhs;
    }
  }

  NodePtr parse_factor() {
    skip_ws();
    const auto off = pos_;
    if (accept('-')) {
      auto operand = parse_factor();
      // Negated literals fold so that printed negative constants round-trip.
      if (operand->op == Op::constant) return make_const(-operand->value, off);
      return make_node(Op::neg, {operand}, off);
    }
    return parse_power();
  }

  int parse_integer() {
    skip_ws();
    const auto start = pos_;
    bool negative = false;
    if (pos_ < s_.size() && s_[pos_] == '-') {
      negative = true;
      ++pos_;
    }
    const auto digits = pos_;
    while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    if (pos_ == digits) throw SyntaxError(start, "expr/parse: expected integer exponent");
    if (pos_ < s_.size() && (s_[pos_] == '.' || s_[pos_] == 'e' || s_[pos_] == 'E'))
      throw SyntaxError(start, "expr/parse: exponents must be integers");
    int v = 0;
    std::from_chars(s_.data() + digits, s_.data() + pos_, v);
    return negative ? -v : v;
  }

  NodePtr parse_power() {
    auto base = parse_base();
    skip_ws();
    const auto off = pos_;
    if (!accept('^')) return base;
    // Right associative: a^b^c = a^(b^c), folded since exponents are integers.
    std::vector<int> exps{parse_integer()};
    while (accept('^')) exps.push_back(parse_integer());
    int e = exps.back();
    for (auto it = exps.rbegin() + 1; it != exps.rend(); ++it) {
      const double folded = ipow(static_cast<double>(*it), e);
      if (std::abs(folded) > 1e6) throw SyntaxError(off, "expr/parse: exponent too large");
      e = static_cast<int>(folded);
    }
    auto n = make_node(Op::pow, {base}, off);
    std::const_pointer_cast<Node>(n)->exponent = e;
    return n;
  }

  NodePtr parse_number() {
    const auto start = pos_;
    while (pos_ < s_.size() &&
           (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.'))
      ++pos_;
    if (pos_ < s_.size() && (s_[pos_] == 'e' || s_[pos_] == 'E')) {
      auto save = pos_;
      ++pos_;
      if (pos_ < s_.size() && (s_[pos_] == '+' || s_[pos_] == '-')) ++pos_;
      if (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) {
        while (pos_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[pos_]))) ++pos_;
      } else {
        pos_ = save;
      }
    }
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s_.data() + start, s_.data() + pos_, v);
    if (ec != std::errc() || ptr != s_.data() + pos_)
      throw SyntaxError(start, "expr/parse: malformed number");
    return make_const(v, start);
  }

  NodePtr parse_base() {
    skip_ws();
    if (pos_ >= s_.size()) throw SyntaxError(pos_, "expr/parse: unexpected end of input");
    const char c = s_[pos_];
    const auto off = pos_;
    if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') return parse_number();
    if (c == '(') {
      ++pos_;
      auto e = parse_expr();
      expect(')');
      return e;
    }
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (pos_ < s_.size() &&
             (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_'))
        ++pos_;
      const std::string_view ident = s_.substr(off, pos_ - off);
      skip_ws();
      if (pos_ < s_.size() && s_[pos_] == '(') return parse_call(ident, off);
      return identifier(ident, off);
    }
    throw SyntaxError(off, std::string("expr/parse: unexpected character '") + c + "'");
  }

  NodePtr parse_call(std::string_view name, std::size_t off) {
    Fn fn;
    std::size_t min_args = 1, max_args = 1;
    if (name == "sin") fn = Fn::sin;
    else if (name == "cos") fn = Fn::cos;
    else if (name == "exp") fn = Fn::exp;
    else if (name == "abs") fn = Fn::abs;
    else if (name == "min" || name == "max") {
      fn = name == "min" ? Fn::min : Fn::max;
      min_args = 2;
      max_args = std::numeric_limits<std::size_t>::max();
    } else {
      throw ConfigError("UnknownIdentifier", "expr/parse: unknown function '" + std::string(name) +
                                                 "' at offset " + std::to_string(off));
    }
    expect('(');
    std::vector<NodePtr> args{parse_expr()};
    while (accept(',')) args.push_back(parse_expr());
    expect(')');
    if (args.size() < min_args || args.size() > max_args)
      throw SyntaxError(off, "expr/parse: wrong number of arguments to " + std::string(name));
    // min/max with many arguments fold into nested binary calls.
    while (args.size() > 2) {
      auto last = args.back();
      args.pop_back();
      auto prev = args.back();
      args.pop_back();
      args.push_back(make_call(fn, {prev, last}, off));
    }
    return make_call(fn, std::move(args), off);
  }

  static NodePtr identifier(std::string_view id, std::size_t off) {
    if (id == "pi") return make_const(std::numbers::pi, off);
    auto indexed = [&](std::string_view prefix, VarKind kind, int max_index) -> NodePtr {
      if (id.size() <= prefix.size() || id.substr(0, prefix.size()) != prefix) return nullptr;
      const auto digits = id.substr(prefix.size());
      if (!std::all_of(digits.begin(), digits.end(),
                       [](char ch) { return std::isdigit(static_cast<unsigned char>(ch)); }))
        return nullptr;
      int k = 0;
      std::from_chars(digits.data(), digits.data() + digits.size(), k);
      if (k < 1 || k > max_index || digits[0] == '0') return nullptr;
      return make_var(Var{kind, k - 1}, off);
    };
    if (auto n = indexed("xi", VarKind::xi, 64)) return n;
    if (auto n = indexed("x", VarKind::x, 3)) return n;
    if (auto n = indexed("y", VarKind::y, 3)) return n;
    throw ConfigError("UnknownIdentifier", "expr/parse: unknown identifier '" + std::string(id) +
                                               "' at offset " + std::to_string(off));
  }
};

// ---------------------------------------------------------------------------
// Evaluation

double eval_node(const Node& n, const Bindings& b) {
  switch (n.op) {
    case Op::constant:
      return n.value;
    case Op::variable: {
      std::span<const double> src = n.var.kind == VarKind::x   ? b.x
                                    : n.var.kind == VarKind::y ? b.y
                                                               : b.xi;
      if (static_cast<std::size_t>(n.var.index) >= src.size()) {
        const char* name = n.var.kind == VarKind::x ? "x" : n.var.kind == VarKind::y ? "y" : "xi";
        throw ConfigError("UnboundVariable", std::string("expr/eval: variable ") + name +
                                                 std::to_string(n.var.index + 1) + " is unbound");
      }
      return src[static_cast<std::size_t>(n.var.index)];
    }
    case Op::neg:
      return -eval_node(*n.args[0], b);
    case Op::add:
      return eval_node(*n.args[0], b) + eval_node(*n.args[1], b);
    case Op::sub:
      return eval_node(*n.args[0], b) - eval_node(*n.args[1], b);
    case Op::mul:
      return eval_node(*n.args[0], b) * eval_node(*n.args[1], b);
    case Op::div: {
      const double den = eval_node(*n.args[1], b);
      if (den == 0.0)
        throw NumericalError("DivisionByZero", "expr/eval: division by zero (offset " +
                                                   std::to_string(n.offset) + ")");
      return eval_node(*n.args[0], b) / den;
    }
    case Op::pow: {
      const double base = eval_node(*n.args[0], b);
      if (base == 0.0 && n.exponent < 0)
        throw NumericalError("DivisionByZero", "expr/eval: zero to a negative power");
      return ipow(base, n.exponent);
    }
    case Op::call: {
      const double a = eval_node(*n.args[0], b);
      switch (n.fn) {
        case Fn::sin: return std::sin(a);
        case Fn::cos: return std::cos(a);
        case Fn::exp: return std::exp(a);
        case Fn::abs: return std::abs(a);
        case Fn::min: return std::min(a, eval_node(*n.args[1], b));
        case Fn::max: return std::max(a, eval_node(*n.args[1], b));
      }
    }
  }
  return 0.0;
}

// ---------------------------------------------------------------------------
// Printing

std::string format_number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, ptr);
  if (v < 0) return "(" + s + ")";
  return s;
}

const char* fn_name(Fn fn) {
  switch (fn) {
    case Fn::sin: return "sin";
    case Fn::cos: return "cos";
    case Fn::exp: return "exp";
    case Fn::abs: return "abs";
    case Fn::min: return "min";
    case Fn::max: return "max";
  }
  return "?";
}

void print_node(const Node& n, std::string& out) {
  switch (n.op) {
    case Op::constant:
      out += format_number(n.value);
      return;
    case Op::variable:
      out += n.var.kind == VarKind::x ? "x" : n.var.kind == VarKind::y ? "y" : "xi";
      out += std::to_string(n.var.index + 1);
      return;
    case Op::neg:
      out += "(-";
      print_node(*n.args[0], out);
      out += ")";
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      const char sym = n.op == Op::add ? '+' : n.op == Op::sub ? '-' : n.op == Op::mul ? '*' : '/';
      out += "(";
      print_node(*n.args[0], out);
      out += ' ';
      out += sym;
      out += ' ';
      print_node(*n.args[1], out);
      out += ")";
      return;
    }
    case Op::pow:
      out += "(";
      print_node(*n.args[0], out);
      out += ")^";
      out += std::to_string(n.exponent);
      return;
    case Op::call:
      out += fn_name(n.fn);
      out += "(";
      for (std::size_t i = 0; i < n.args.size(); ++i) {
        if (i) out += ", ";
        print_node(*n.args[i], out);
      }
      out += ")";
      return;
  }
}

// ---------------------------------------------------------------------------
// Dependency queries and differentiation

bool depends(const Node& n, const Var& v) {
  if (n.op == Op::variable) return n.var == v;
  return std::any_of(n.args.begin(), n.args.end(), [&](const NodePtr& a) { return depends(*a, v); });
}

bool depends_kind(const Node& n, VarKind k) {
  if (n.op == Op::variable) return n.var.kind == k;
  return std::any_of(n.args.begin(), n.args.end(),
                     [&](const NodePtr& a) { return depends_kind(*a, k); });
}

int max_idx(const Node& n, VarKind k) {
  int m = n.op == Op::variable && n.var.kind == k ? n.var.index + 1 : 0;
  for (const auto& a : n.args) m = std::max(m, max_idx(*a, k));
  return m;
}

NodePtr derive(const NodePtr& n, const Var& v) {
  if (!depends(*n, v)) return make_const(0.0);
  switch (n->op) {
    case Op::constant:
      return make_const(0.0);
    case Op::variable:
      return make_const(1.0);
    case Op::neg:
      return make_neg(derive(n->args[0], v));
    case Op::add:
      return make_add(derive(n->args[0], v), derive(n->args[1], v));
    case Op::sub:
      return make_sub(derive(n->args[0], v), derive(n->args[1], v));
    case Op::mul: {
      const auto& a = n->args[0];
      const auto& b = n->args[1];
      return make_add(make_mul(derive(a, v), b), make_mul(a, derive(b, v)));
    }
    case Op::div: {
      const auto& a = n->args[0];
      const auto& b = n->args[1];
      return make_div(make_sub(make_mul(derive(a, v), b), make_mul(a, derive(b, v))),
                      make_pow(b, 2));
    }
    case Op::pow: {
      const auto& a = n->args[0];
      const int k = n->exponent;
      return make_mul(make_mul(make_const(k), make_pow(a, k - 1)), derive(a, v));
    }
    case Op::call: {
      const auto& a = n->args[0];
      switch (n->fn) {
        case Fn::sin:
          return make_mul(make_call(Fn::cos, {a}), derive(a, v));
        case Fn::cos:
          return make_mul(make_neg(make_call(Fn::sin, {a})), derive(a, v));
        case Fn::exp:
          return make_mul(make_call(Fn::exp, {a}), derive(a, v));
        case Fn::abs:
        case Fn::min:
        case Fn::max:
          throw NumericalError("NonDifferentiable",
                               std::string("expr/grad: ") + fn_name(n->fn) +
                                   " of a differentiated variable at offset " +
                                   std::to_string(n->offset));
      }
    }
  }
  return make_const(0.0);
}

constexpr double kUnbounded = std::numeric_limits<double>::infinity();

// Bandwidth in y (cycles per cell); +inf marks non-trigonometric dependence.
double bandwidth(const NodePtr& n) {
  if (!depends_kind(*n, VarKind::y)) return 0.0;
  switch (n->op) {
    case Op::variable:
      return kUnbounded;  // a bare y is not periodic
    case Op::neg:
      return bandwidth(n->args[0]);
    case Op::add:
    case Op::sub:
      return std::max(bandwidth(n->args[0]), bandwidth(n->args[1]));
    case Op::mul:
      return bandwidth(n->args[0]) + bandwidth(n->args[1]);
    case Op::div:
      return depends_kind(*n->args[1], VarKind::y) ? kUnbounded : bandwidth(n->args[0]);
    case Op::pow:
      return n->exponent < 0 ? kUnbounded : n->exponent * bandwidth(n->args[0]);
    case Op::call: {
      if (n->fn != Fn::sin && n->fn != Fn::cos) return kUnbounded;
      // The argument must be affine in y with constant slopes.
      const auto& arg = n->args[0];
      double freq2 = 0.0;
      for (int i = 0; i < 3; ++i) {
        auto slope = derive(arg, Var{VarKind::y, i});
        if (depends_kind(*slope, VarKind::y) || depends_kind(*slope, VarKind::xi) ||
            depends_kind(*slope, VarKind::x))
          return kUnbounded;
        const double s = eval_node(*slope, Bindings{}) / (2.0 * std::numbers::pi);
        freq2 += s * s;
      }
      return std::sqrt(freq2);
    }
    case Op::constant:
      return 0.0;
  }
  return kUnbounded;
}

}  // namespace

Expr Expr::parse(std::string_view text) { return Expr(Parser(text).parse_all()); }

Expr Expr::constant(double v) { return Expr(make_const(v)); }

double Expr::eval(const Bindings& b) const { return eval_node(*root_, b); }

std::string Expr::print() const {
  std::string out;
  print_node(*root_, out);
  return out;
}

Expr Expr::derivative(Var v) const { return Expr(derive(root_, v)); }

std::vector<Expr> Expr::grad_xi(int d) const {
  std::vector<Expr> g;
  g.reserve(static_cast<std::size_t>(d));
  for (int i = 0; i < d; ++i) g.push_back(derivative(Var{VarKind::xi, i}));
  return g;
}

bool Expr::depends_on(VarKind kind) const { return depends_kind(*root_, kind); }
bool Expr::depends_on(Var v) const { return depends(*root_, v); }
int Expr::max_index(VarKind kind) const { return max_idx(*root_, kind); }
bool Expr::is_constant() const {
  return !depends_on(VarKind::x) && !depends_on(VarKind::y) && !depends_on(VarKind::xi);
}

std::optional<double> Expr::y_bandwidth() const {
  const double b = bandwidth(root_);
  if (std::isinf(b)) return std::nullopt;
  return b;
}

}  // namespace aqx
