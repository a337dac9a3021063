#pragma once

#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "aqx/exec.hpp"
#include "aqx/operator.hpp"
#include "aqx/twoscale_field.hpp"

namespace aqx {

/// Checks that eps = 1/k fits the macro grid (k divides every axis count)
/// and that the micro grid m divides the cell width M/k. Throws
/// ConfigError("IncompatibleEpsilon") otherwise.
void check_epsilon(const Grid& macro, int k, int micro);

/// T_eps u(x, y) = u(eps floor(x / eps) + eps (y - floor y)) on the product
/// of u's macro grid and a cell grid with `micro` points per axis
/// (0 means M / k, the choice that makes T_eps an isometry).
TwoScaleField unfold(const PeriodicField& u, int k, int micro = 0);

/// The same formula for a function of x, with u extended by zero outside
/// Omega = [0, 1)^N.
double unfold_point(const std::function<double(std::span<const double>)>& u, double eps,
                    std::span<const double> x, std::span<const double> y);

/// |u - T_eps u|_{L^2(Omega x Q)} for each k in k_list (eps = 1/k).
std::vector<double> unfold_convergence(const PeriodicField& u, const std::vector<int>& k_list,
                                       int micro = 0);

struct SequenceBundle {
  std::vector<int> k_list;  // eps = 1 / k, k increasing
  std::vector<PeriodicField> fields;
  std::map<std::string, std::string> provenance;
};

/// u_eps(x) = mean(x) + w(x, x/eps mod 1) with w(x_j, .) = Pi(x_j)(v(x_j, .) -
/// mean(x_j)). Micro values are trigonometric interpolants in y; when the
/// output grid is finer than v's macro grid the macro mean is zero-padded
/// and the fluctuation spectra are interpolated multilinearly in x.
/// Throws ConfigError("NotAFreeField") when v fails the F membership test.
SequenceBundle generate_sequence(const Operator& op, const TwoScaleField& v,
                                 const std::vector<int>& k_list,
                                 std::optional<Grid> output = std::nullopt,
                                 double membership_tol = 1e-7, Exec exec = Exec::parallel);

/// Separable test function phi(x, y) = X(x) Y(y) e_c with X, Y real Fourier
/// modes cos or sin of 2 pi mu.x and 2 pi lambda.y.
struct TestFunction {
  std::vector<int> mu;
  bool mu_sin = false;
  std::vector<int> lambda;
  bool lambda_sin = false;
  int component = 0;

  double x_part(std::span<const double> x) const;
  double y_part(std::span<const double> y) const;
};

/// All products of real Fourier modes with |mu| <= radius in x and
/// |lambda| <= radius in y, one per component.
std::vector<TestFunction> default_test_bank(int N, int d, int radius = 2);

/// Midpoint value of int_Omega u_eps(x) . phi(x, x/eps) dx, phi sampled
/// with trigonometric interpolation in y; phi's macro grid must match.
double twoscale_pairing(const PeriodicField& u_eps, const TwoScaleField& phi, int k);
/// Same pairing against an analytic separable test function.
double twoscale_pairing(const PeriodicField& u_eps, const TestFunction& phi, int k);
/// int_Omega int_Q v . phi by quadrature on v's product grid.
double limit_pairing(const TwoScaleField& v, const TestFunction& phi);

struct ResidualRow {
  int k = 0;
  double weak_gap = 0.0;                 // max over the bank
  std::optional<double> strong_gap;      // |T_eps u_eps - v|_2 when grids align
};

std::vector<ResidualRow> twoscale_residual(const SequenceBundle& bundle, const TwoScaleField& v,
                                           const std::vector<TestFunction>& bank,
                                           Exec exec = Exec::parallel);

}  // namespace aqx
