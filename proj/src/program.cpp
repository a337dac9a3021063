#include "aqx/program.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "aqx/errors.hpp"

namespace aqx {

namespace {
constexpr std::size_t kBlock = 256;
}

Program::Program(const Expr& e) {
  emit(*e.root());
}

void Program::emit(const expr::Node& n) {
  using expr::Op;
  auto push = [&](Instr i) {
    code_.push_back(i);
    max_depth_ = std::max(max_depth_, ++depth_);
  };
  switch (n.op) {
    case Op::constant:
      push({Code::push_const, 0, n.value});
      return;
    case Op::variable: {
      const Code c = n.var.kind == expr::VarKind::x   ? Code::push_x
                     : n.var.kind == expr::VarKind::y ? Code::push_y
                                                      : Code::push_xi;
      push({c, n.var.index, 0.0});
      return;
    }
    case Op::neg:
      emit(*n.args[0]);
      code_.push_back({Code::neg});
      return;
    case Op::pow:
      emit(*n.args[0]);
      code_.push_back({Code::pow, n.exponent});
      return;
    case Op::add:
    case Op::sub:
    case Op::mul:
    case Op::div: {
      emit(*n.args[0]);
      emit(*n.args[1]);
      const Code c = n.op == Op::add   ? Code::add
                     : n.op == Op::sub ? Code::sub
                     : n.op == Op::mul ? Code::mul
                                       : Code::div;
      code_.push_back({c});
      --depth_;
      return;
    }
    case Op::call: {
      for (const auto& a : n.args) emit(*a);
      switch (n.fn) {
        case expr::Fn::sin: code_.push_back({Code::sin}); break;
        case expr::Fn::cos: code_.push_back({Code::cos}); break;
        case expr::Fn::exp: code_.push_back({Code::exp}); break;
        case expr::Fn::abs: code_.push_back({Code::abs}); break;
        case expr::Fn::min: code_.push_back({Code::min}); --depth_; break;
        case expr::Fn::max: code_.push_back({Code::max}); --depth_; break;
      }
      return;
    }
  }
}

void Program::run(const BatchInputs& in, std::span<double> out) const {
  std::vector<double> stack(static_cast<std::size_t>(std::max(max_depth_, 1)) * kBlock);
  auto reg = [&](int k) { return stack.data() + static_cast<std::size_t>(k) * kBlock; };

  for (std::size_t start = 0; start < in.count; start += kBlock) {
    const std::size_t n = std::min(kBlock, in.count - start);
    int top = -1;
    for (const Instr& ins : code_) {
      switch (ins.code) {
        case Code::push_const: {
          double* r = reg(++top);
          std::fill(r, r + n, ins.value);
          break;
        }
        case Code::push_x: {
          if (static_cast<std::size_t>(ins.arg) >= in.x.size())
            throw ConfigError("UnboundVariable",
                              "expr/eval: variable x" + std::to_string(ins.arg + 1) + " is unbound");
          double* r = reg(++top);
          std::fill(r, r + n, in.x[static_cast<std::size_t>(ins.arg)]);
          break;
        }
        case Code::push_y: {
          if (ins.arg >= in.y_count)
            throw ConfigError("UnboundVariable",
                              "expr/eval: variable y" + std::to_string(ins.arg + 1) + " is unbound");
          double* r = reg(++top);
          const double* src = in.y + start * static_cast<std::size_t>(in.y_stride) + ins.arg;
          for (std::size_t i = 0; i < n; ++i) r[i] = src[i * static_cast<std::size_t>(in.y_stride)];
          break;
        }
        case Code::push_xi: {
          if (ins.arg >= in.xi_count)
            throw ConfigError("UnboundVariable",
                              "expr/eval: variable xi" + std::to_string(ins.arg + 1) + " is unbound");
          double* r = reg(++top);
          const double* src = in.xi + start * static_cast<std::size_t>(in.xi_stride) + ins.arg;
          for (std::size_t i = 0; i < n; ++i) r[i] = src[i * static_cast<std::size_t>(in.xi_stride)];
          break;
        }
        case Code::neg: {
          double* a = reg(top);
          for (std::size_t i = 0; i < n; ++i) a[i] = -a[i];
          break;
        }
        case Code::add: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i) a[i] += b[i];
          break;
        }
        case Code::sub: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i) a[i] -= b[i];
          break;
        }
        case Code::mul: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i) a[i] *= b[i];
          break;
        }
        case Code::div: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i)
            if (b[i] == 0.0) throw NumericalError("DivisionByZero", "expr/eval: division by zero");
          for (std::size_t i = 0; i < n; ++i) a[i] /= b[i];
          break;
        }
        case Code::pow: {
          double* a = reg(top);
          int k = ins.arg;
          const bool invert = k < 0;
          if (invert) {
            k = -k;
            for (std::size_t i = 0; i < n; ++i)
              if (a[i] == 0.0)
                throw NumericalError("DivisionByZero", "expr/eval: zero to a negative power");
          }
          if (k == 2) {
            for (std::size_t i = 0; i < n; ++i) a[i] *= a[i];
          } else {
            for (std::size_t i = 0; i < n; ++i) {
              double base = a[i], r = 1.0;
              for (int e = k; e > 0; e >>= 1) {
                if (e & 1) r *= base;
                base *= base;
              }
              a[i] = r;
            }
          }
          if (invert)
            for (std::size_t i = 0; i < n; ++i) a[i] = 1.0 / a[i];
          break;
        }
        case Code::sin: {
          double* a = reg(top);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::sin(a[i]);
          break;
        }
        case Code::cos: {
          double* a = reg(top);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::cos(a[i]);
          break;
        }
        case Code::exp: {
          double* a = reg(top);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::exp(a[i]);
          break;
        }
        case Code::abs: {
          double* a = reg(top);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::abs(a[i]);
          break;
        }
        case Code::min: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::min(a[i], b[i]);
          break;
        }
        case Code::max: {
          double* a = reg(top - 1);
          const double* b = reg(top--);
          for (std::size_t i = 0; i < n; ++i) a[i] = std::max(a[i], b[i]);
          break;
        }
      }
    }
    std::copy(reg(0), reg(0) + n, out.begin() + static_cast<std::ptrdiff_t>(start));
  }
}

}  // namespace aqx
