#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqx/exec.hpp"
#include "aqx/expr.hpp"
#include "aqx/spectral.hpp"

namespace aqx {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankCutoff = 1e-8;

/// First-order operator sum_i A^i(x) d/dx_i acting on d-vector fields with
/// values in R^l. Coefficients are expressions in x1..xN.
struct OperatorSpec {
  std::string name = "custom";
  int N = 2;
  int d = 2;
  int l = 1;
  /// coeffs[i] holds A^{i+1}(x) as l*d row-major expressions.
  std::vector<std::vector<Expr>> coeffs;
  std::optional<int> declared_rank;
};

/// Perturbed divergence: a(x) du1/dx1 + du2/dx2.
OperatorSpec divergence_perturbed(const std::string& a_expr);
/// Perturbed curl with l = 4: rows (j,k) carry a_j lambda_j xi_k - a_k lambda_k xi_j,
/// a_1 given, a_2 = 1.
OperatorSpec curl_perturbed(const std::string& a1_expr);
/// m(x) * A_c with constant base matrices (row-major, one list per axis).
OperatorSpec scaled_constant(const std::string& m_expr, int l, int d,
                             const std::vector<std::vector<double>>& base);
/// Injective scalar gradient (d = 1, l = N): symbol lambda.
OperatorSpec full_gradient(int N);

/// Coefficients frozen at one point.
class FrozenOperator {
 public:
  FrozenOperator() = default;
  FrozenOperator(std::vector<double> x, std::vector<Matrix> coeffs)
      : x_(std::move(x)), coeffs_(std::move(coeffs)) {}

  const std::vector<double>& x() const noexcept { return x_; }
  const std::vector<Matrix>& coeffs() const noexcept { return coeffs_; }
  int N() const noexcept { return static_cast<int>(coeffs_.size()); }
  int l() const { return static_cast<int>(coeffs_.front().rows()); }
  int d() const { return static_cast<int>(coeffs_.front().cols()); }

  /// sqrt(sum_i |A^i|_F^2), an upper bound for |symbol(lambda)| at |lambda| = 1.
  double scale() const;

  /// sum_i A^i lambda_i; throws ConfigError("ZeroFrequency") for lambda = 0.
  Matrix symbol(std::span<const double> lambda) const;

 private:
  std::vector<double> x_;
  std::vector<Matrix> coeffs_;
};

/// Kernel projector and pseudo-inverse of the symbol at one (x, lambda).
struct SymbolSplit {
  Matrix P;  // d x d orthogonal projector onto ker symbol
  Matrix Q;  // d x l with Q * symbol = I - P, Q = 0 on range(symbol)^perp
  int rank = 0;
};

/// Numerical rank: singular values above kRankCutoff times the larger of
/// `scale` and the largest singular value. The one-argument form is
/// relative to the matrix itself; symbols pass the coefficient scale so a
/// symbol that nearly vanishes counts as rank deficient.
int numerical_rank(const Matrix& m);
int numerical_rank(const Matrix& m, double scale);

class Operator {
 public:
  /// Compiles coefficients and fixes the reference rank from the first
  /// sample (x = 0, lambda = e_1).
  explicit Operator(OperatorSpec spec);

  const OperatorSpec& spec() const noexcept { return spec_; }
  int N() const noexcept { return spec_.N; }
  int d() const noexcept { return spec_.d; }
  int l() const noexcept { return spec_.l; }
  int reference_rank() const noexcept { return rank_; }

  Matrix coefficient(int i, std::span<const double> x) const;
  FrozenOperator freeze(std::span<const double> x) const;
  Matrix symbol(std::span<const double> x, std::span<const double> lambda) const;

  /// P(x, lambda); throws ConstantRankViolation("RankDeficiencyDrift") when the
  /// numerical rank differs from the reference rank.
  Matrix kernel_projector(std::span<const double> x, std::span<const double> lambda) const;
  /// Q(x, lambda), (-1)-homogeneous in lambda.
  Matrix pseudo_q(std::span<const double> x, std::span<const double> lambda) const;
  SymbolSplit split(const FrozenOperator& frozen, std::span<const double> lambda) const;

  /// Largest |A^i(x + e_j) - A^i(x)| over the sample points.
  double periodicity_defect(const std::vector<std::vector<double>>& samples) const;

 private:
  OperatorSpec spec_;
  int rank_ = 0;
};

/// Verifies rank symbol(x, lambda) = r at every sample pair and returns r.
/// Throws ConstantRankViolation("ConstantRankViolation") with the offending pair.
int check_constant_rank(const Operator& op, const std::vector<std::vector<double>>& x_samples,
                        const std::vector<std::vector<double>>& lambda_samples);

/// Unit directions: normalized lattice vectors with |lambda_i| <= 4 followed by
/// `random_count` seeded random directions.
std::vector<std::vector<double>> default_directions(int N, int random_count, std::uint64_t seed);

/// Tables of P(x, lambda) and Q(x, lambda) for every spectral slot of a grid.
/// The zero mode and Nyquist slots hold zero matrices. P(x, -lambda) and
/// P(x, lambda) are the same table entry, so projected real fields stay real.
class PointProjector {
 public:
  PointProjector(const Operator& op, std::span<const double> x, const Grid& grid);

  const Grid& grid() const noexcept { return grid_; }
  const FrozenOperator& frozen() const noexcept { return frozen_; }
  int rank() const noexcept { return rank_; }
  const Matrix& P(std::size_t slot) const { return P_[slot]; }
  const Matrix& Q(std::size_t slot) const { return Q_[slot]; }
  bool active(std::size_t slot) const { return active_[slot] != 0; }

 private:
  Grid grid_;
  FrozenOperator frozen_;
  int rank_ = 0;
  std::vector<Matrix> P_;
  std::vector<Matrix> Q_;
  std::vector<char> active_;
};

/// A_y w: spectral derivative, output spectrum 2 pi i symbol(x, lambda) w^(lambda).
PeriodicField apply_Ay(const FrozenOperator& op, const PeriodicField& w);
PeriodicField apply_Ay(const Operator& op, std::span<const double> x, const PeriodicField& w);

/// sum_i A^i(x) du/dx_i on a macro grid: coefficients in physical space,
/// derivatives spectrally.
PeriodicField apply_A_macro(const Operator& op, const PeriodicField& u);

/// Spectral partial derivative along `axis` (Nyquist slots dropped).
PeriodicField spectral_derivative(const PeriodicField& u, int axis);

}  // namespace aqx
