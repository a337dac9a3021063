#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "aqx/expr.hpp"

namespace aqx {

/// Columnar inputs for batch evaluation over `count` points. x is shared by
/// all points (a frozen macro point); y and xi are per-point rows addressed as
/// data[i * stride + k].
struct BatchInputs {
  std::span<const double> x;
  const double* y = nullptr;
  int y_stride = 0;
  int y_count = 0;
  const double* xi = nullptr;
  int xi_stride = 0;
  int xi_count = 0;
  std::size_t count = 0;
};

/// Postfix program compiled from an Expr and evaluated one instruction at a
/// time over blocks of points.
class Program {
 public:
  Program() = default;
  explicit Program(const Expr& e);

  /// out[i] = e(x, y_i, xi_i). Throws like Expr::eval.
  void run(const BatchInputs& in, std::span<double> out) const;

  std::size_t size() const noexcept { return code_.size(); }

 private:
  enum class Code : unsigned char {
    push_const, push_x, push_y, push_xi, neg, add, sub, mul, div, pow,
    sin, cos, exp, abs, min, max
  };
  struct Instr {
    Code code;
    int arg = 0;       // variable index or exponent
    double value = 0;  // constant
  };
  void emit(const expr::Node& n);

  std::vector<Instr> code_;
  int max_depth_ = 0;
  int depth_ = 0;
};

}  // namespace aqx
