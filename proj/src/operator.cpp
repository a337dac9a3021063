#include "aqx/operator.hpp"

#include <Eigen/SVD>

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "aqx/errors.hpp"

namespace aqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string fmt_vec(std::span<const double> v) {
  std::ostringstream os;
  os << "(";
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? "," : "") << v[i];
  os << ")";
  return os.str();
}

std::vector<Expr> row_major(const std::vector<std::string>& entries) {
  std::vector<Expr> out;
  out.reserve(entries.size());
  for (const auto& e : entries) out.push_back(Expr::parse(e));
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Presets

OperatorSpec divergence_perturbed(const std::string& a_expr) {
  OperatorSpec s;
  s.name = "divergence_perturbed";
  s.N = 2;
  s.d = 2;
  s.l = 1;
  s.coeffs = {row_major({a_expr, "0"}), row_major({"0", "1"})};
  return s;
}

OperatorSpec curl_perturbed(const std::string& a1_expr) {
  OperatorSpec s;
  s.name = "curl_perturbed";
  s.N = 2;
  s.d = 2;
  s.l = 4;
  // A^i_{(j,k),q} = a_i (delta_ij delta_qk - delta_ik delta_qj), rows ordered
  // (1,1), (1,2), (2,1), (2,2).
  const std::string a[2] = {"(" + a1_expr + ")", "1"};
  for (int i = 0; i < 2; ++i) {
    std::vector<std::string> entries;
    for (int j = 0; j < 2; ++j)
      for (int k = 0; k < 2; ++k)
        for (int q = 0; q < 2; ++q) {
          const int coeff = (i == j && q == k ? 1 : 0) - (i == k && q == j ? 1 : 0);
          entries.push_back(coeff == 0 ? "0" : coeff > 0 ? a[i] : "-" + a[i]);
        }
    s.coeffs.push_back(row_major(entries));
  }
  return s;
}

OperatorSpec scaled_constant(const std::string& m_expr, int l, int d,
                             const std::vector<std::vector<double>>& base) {
  OperatorSpec s;
  s.name = "scaled_constant";
  s.N = static_cast<int>(base.size());
  s.l = l;
  s.d = d;
  for (const auto& mat : base) {
    if (mat.size() != static_cast<std::size_t>(l * d))
      throw ConfigError("InvalidOperator", "operator: base matrix has wrong size");
    std::vector<std::string> entries;
    for (double v : mat) {
      std::ostringstream os;
      os.precision(17);
      os << "(" << m_expr << ")*(" << v << ")";
      entries.push_back(os.str());
    }
    s.coeffs.push_back(row_major(entries));
  }
  return s;
}

OperatorSpec full_gradient(int N) {
  OperatorSpec s;
  s.name = "full_gradient";
  s.N = N;
  s.d = 1;
  s.l = N;
  for (int i = 0; i < N; ++i) {
    std::vector<std::string> entries(static_cast<std::size_t>(N), "0");
    entries[static_cast<std::size_t>(i)] = "1";
    s.coeffs.push_back(row_major(entries));
  }
  return s;
}

// ---------------------------------------------------------------------------

Matrix FrozenOperator::symbol(std::span<const double> lambda) const {
  bool nonzero = false;
  for (double v : lambda) nonzero = nonzero || v != 0.0;
  if (!nonzero) throw ConfigError("ZeroFrequency", "operator/symbol: lambda must be nonzero");
  Matrix s = Matrix::Zero(coeffs_.front().rows(), coeffs_.front().cols());
  for (std::size_t i = 0; i < coeffs_.size(); ++i) s += lambda[i] * coeffs_[i];
  return s;
}

double FrozenOperator::scale() const {
  double s = 0.0;
  for (const auto& a : coeffs_) s += a.squaredNorm();
  return std::sqrt(s);
}

int numerical_rank(const Matrix& m) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  if (sv.size() == 0) return 0;
  return numerical_rank(m, sv(0));
}

int numerical_rank(const Matrix& m, double scale) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& sv = svd.singularValues();
  const double floor = kRankCutoff * std::max(scale, sv.size() ? sv(0) : 0.0);
  if (floor == 0.0) return 0;
  int r = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > floor) ++r;
  return r;
}

Operator::Operator(OperatorSpec spec) : spec_(std::move(spec)) {
  if (spec_.N < 1 || spec_.N > 3 || spec_.d < 1 || spec_.l < 1)
    throw ConfigError("InvalidOperator", "operator: invalid dimensions");
  if (static_cast<int>(spec_.coeffs.size()) != spec_.N)
    throw ConfigError("InvalidOperator", "operator: need one coefficient matrix per axis");
  for (const auto& m : spec_.coeffs) {
    if (static_cast<int>(m.size()) != spec_.l * spec_.d)
      throw ConfigError("InvalidOperator", "operator: coefficient matrix must have l*d entries");
    for (const auto& e : m) {
      if (e.depends_on(expr::VarKind::y) || e.depends_on(expr::VarKind::xi))
        throw ConfigError("InvalidOperator", "operator: coefficients may depend on x only");
      if (e.max_index(expr::VarKind::x) > spec_.N)
        throw ConfigError("InvalidOperator", "operator: coefficient uses x beyond N");
    }
  }
  const std::vector<double> x0(static_cast<std::size_t>(spec_.N), 0.0);
  std::vector<double> e1(static_cast<std::size_t>(spec_.N), 0.0);
  e1[0] = 1.0;
  const auto frozen = freeze(x0);
  rank_ = numerical_rank(frozen.symbol(e1), frozen.scale());
}

Matrix Operator::coefficient(int i, std::span<const double> x) const {
  Matrix a(spec_.l, spec_.d);
  const auto& entries = spec_.coeffs.at(static_cast<std::size_t>(i));
  const Bindings b{x, {}, {}};
  for (int r = 0; r < spec_.l; ++r)
    for (int c = 0; c < spec_.d; ++c)
      a(r, c) = entries[static_cast<std::size_t>(r * spec_.d + c)].eval(b);
  return a;
}

FrozenOperator Operator::freeze(std::span<const double> x) const {
  std::vector<Matrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(spec_.N));
  for (int i = 0; i < spec_.N; ++i) coeffs.push_back(coefficient(i, x));
  return FrozenOperator(std::vector<double>(x.begin(), x.end()), std::move(coeffs));
}

Matrix Operator::symbol(std::span<const double> x, std::span<const double> lambda) const {
  return freeze(x).symbol(lambda);
}

SymbolSplit Operator::split(const FrozenOperator& frozen, std::span<const double> lambda) const {
  double n2 = 0.0;
  for (double v : lambda) n2 += v * v;
  if (n2 == 0.0) throw ConfigError("ZeroFrequency", "operator: lambda must be nonzero");
  const double norm = std::sqrt(n2);
  std::vector<double> unit(lambda.begin(), lambda.end());
  for (auto& v : unit) v /= norm;

  const Matrix s = frozen.symbol(unit);
  Eigen::JacobiSVD<Matrix> svd(s, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  const double floor = kRankCutoff * std::max(frozen.scale(), sv.size() ? sv(0) : 0.0);
  int r = 0;
  if (floor > 0.0)
    for (Eigen::Index i = 0; i < sv.size(); ++i)
      if (sv(i) > floor) ++r;
  if (r != rank_)
    throw ConstantRankViolation(
        "RankDeficiencyDrift",
        "operator/kernel_projector: numerical rank " + std::to_string(r) + " at x=" +
            fmt_vec(frozen.x()) + ", lambda=" + fmt_vec(lambda) + " differs from reference rank " +
            std::to_string(rank_),
        frozen.x(), std::vector<double>(lambda.begin(), lambda.end()), r, rank_);

  const Matrix& V = svd.matrixV();
  const Matrix& U = svd.matrixU();
  SymbolSplit out;
  out.rank = r;
  const Matrix null = V.rightCols(spec_.d - r);
  out.P = null * null.transpose();
  out.Q = Matrix::Zero(spec_.d, spec_.l);
  for (int k = 0; k < r; ++k) out.Q += V.col(k) * (U.col(k).transpose() / sv(k));
  out.Q /= norm;
  return out;
}

Matrix Operator::kernel_projector(std::span<const double> x, std::span<const double> lambda) const {
  return split(freeze(x), lambda).P;
}

Matrix Operator::pseudo_q(std::span<const double> x, std::span<const double> lambda) const {
  return split(freeze(x), lambda).Q;
}

double Operator::periodicity_defect(const std::vector<std::vector<double>>& samples) const {
  double worst = 0.0;
  for (const auto& x : samples) {
    const auto base = freeze(x);
    for (int j = 0; j < spec_.N; ++j) {
      auto shifted = x;
      shifted[static_cast<std::size_t>(j)] += 1.0;
      const auto moved = freeze(shifted);
      for (int i = 0; i < spec_.N; ++i)
        worst = std::max(worst, (moved.coeffs()[static_cast<std::size_t>(i)] -
                                 base.coeffs()[static_cast<std::size_t>(i)])
                                    .cwiseAbs()
                                    .maxCoeff());
    }
  }
  return worst;
}

int check_constant_rank(const Operator& op, const std::vector<std::vector<double>>& x_samples,
                        const std::vector<std::vector<double>>& lambda_samples) {
  if (x_samples.empty() || lambda_samples.empty())
    throw ConfigError("EmptySamples", "operator/check_constant_rank: sample sets must be nonempty");
  const int r = op.reference_rank();
  for (const auto& x : x_samples) {
    const auto frozen = op.freeze(x);
    const double scale = frozen.scale();
    for (const auto& lambda : lambda_samples) {
      double n2 = 0.0;
      for (double v : lambda) n2 += v * v;
      const int observed = numerical_rank(frozen.symbol(lambda), scale * std::sqrt(n2));
      if (observed != r)
        throw ConstantRankViolation("ConstantRankViolation",
                                    "operator/check_constant_rank: rank " +
                                        std::to_string(observed) + " at x=" + fmt_vec(x) +
                                        ", lambda=" + fmt_vec(lambda) + " (reference rank " +
                                        std::to_string(r) + ")",
                                    x, lambda, observed, r);
    }
  }
  return r;
}

std::vector<std::vector<double>> default_directions(int N, int random_count, std::uint64_t seed) {
  std::vector<std::vector<double>> dirs;
  const int K = 4;
  std::vector<int> idx(static_cast<std::size_t>(N), -K);
  for (;;) {
    double n2 = 0.0;
    for (int v : idx) n2 += static_cast<double>(v) * v;
    if (n2 > 0.0) {
      std::vector<double> u(idx.begin(), idx.end());
      for (auto& v : u) v /= std::sqrt(n2);
      dirs.push_back(std::move(u));
    }
    int a = N - 1;
    while (a >= 0 && idx[static_cast<std::size_t>(a)] == K) idx[static_cast<std::size_t>(a--)] = -K;
    if (a < 0) break;
    ++idx[static_cast<std::size_t>(a)];
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss;
  for (int k = 0; k < random_count; ++k) {
    std::vector<double> u(static_cast<std::size_t>(N));
    double n2 = 0.0;
    do {
      n2 = 0.0;
      for (auto& v : u) {
        v = gauss(rng);
        n2 += v * v;
      }
    } while (n2 == 0.0);
    for (auto& v : u) v /= std::sqrt(n2);
    dirs.push_back(std::move(u));
  }
  return dirs;
}

// ---------------------------------------------------------------------------
// PointProjector

PointProjector::PointProjector(const Operator& op, std::span<const double> x, const Grid& grid)
    : grid_(grid), frozen_(op.freeze(x)), rank_(op.reference_rank()) {
  if (grid.dim() != op.N())
    throw ConfigError("ShapeMismatch", "operator: grid dimension differs from N");
  const std::size_t n = grid.size();
  P_.assign(n, Matrix::Zero(op.d(), op.d()));
  Q_.assign(n, Matrix::Zero(op.d(), op.l()));
  active_.assign(n, 0);
  const auto N = static_cast<std::size_t>(grid.dim());
  int f[3];
  double lambda[3];
  for (std::size_t slot = 1; slot < n; ++slot) {
    if (grid.is_nyquist(slot)) continue;
    grid.frequency(slot, std::span<int>(f, N));
    // Canonical sign: first nonzero component positive, so +lambda and
    // -lambda share one decomposition.
    int sign = 0;
    for (std::size_t a = 0; a < N && sign == 0; ++a) sign = f[a] > 0 ? 1 : f[a] < 0 ? -1 : 0;
    for (std::size_t a = 0; a < N; ++a) lambda[a] = static_cast<double>(sign * f[a]);
    auto s = op.split(frozen_, std::span<const double>(lambda, N));
    P_[slot] = std::move(s.P);
    Q_[slot] = sign * s.Q;
    active_[slot] = 1;
  }
}

// ---------------------------------------------------------------------------
// Differential operators

PeriodicField apply_Ay(const FrozenOperator& op, const PeriodicField& w) {
  const Grid& grid = w.grid();
  if (w.components() != op.d() || grid.dim() != op.N())
    throw ConfigError("ShapeMismatch", "operator/apply_Ay: field shape does not match operator");
  const auto spec = forward_transform(w);
  Spectrum out(grid, op.l());
  const auto N = static_cast<std::size_t>(grid.dim());
  int f[3];
  double lambda[3];
  Eigen::VectorXcd in(op.d());
  for (std::size_t slot = 1; slot < grid.size(); ++slot) {
    if (grid.is_nyquist(slot)) continue;
    grid.frequency(slot, std::span<int>(f, N));
    for (std::size_t a = 0; a < N; ++a) lambda[a] = f[a];
    const Matrix s = op.symbol(std::span<const double>(lambda, N));
    for (int c = 0; c < op.d(); ++c) in(c) = spec.at(slot, c);
    const Eigen::VectorXcd r = Complex(0.0, kTwoPi) * (s.cast<Complex>() * in);
    for (int c = 0; c < op.l(); ++c) out.at(slot, c) = r(c);
  }
  return inverse_transform(out);
}

PeriodicField apply_Ay(const Operator& op, std::span<const double> x, const PeriodicField& w) {
  return apply_Ay(op.freeze(x), w);
}

PeriodicField spectral_derivative(const PeriodicField& u, int axis) {
  const Grid& grid = u.grid();
  auto spec = forward_transform(u);
  const auto N = static_cast<std::size_t>(grid.dim());
  int f[3];
  for (std::size_t slot = 0; slot < grid.size(); ++slot) {
    grid.frequency(slot, std::span<int>(f, N));
    const bool drop = grid.is_nyquist(slot);
    const Complex factor = drop ? Complex{} : Complex(0.0, kTwoPi * f[axis]);
    for (int c = 0; c < u.components(); ++c) spec.at(slot, c) *= factor;
  }
  return inverse_transform(spec);
}

PeriodicField apply_A_macro(const Operator& op, const PeriodicField& u) {
  const Grid& grid = u.grid();
  if (u.components() != op.d() || grid.dim() != op.N())
    throw ConfigError("ShapeMismatch", "operator/apply_A_macro: field shape does not match operator");
  std::vector<PeriodicField> grads;
  for (int i = 0; i < op.N(); ++i) grads.push_back(spectral_derivative(u, i));
  PeriodicField out(grid, op.l());
  const auto N = static_cast<std::size_t>(grid.dim());
  double x[3];
  Vector du(op.d());
  for (std::size_t node = 0; node < grid.size(); ++node) {
    grid.coords(node, std::span<double>(x, N));
    const auto frozen = op.freeze(std::span<const double>(x, N));
    Vector acc = Vector::Zero(op.l());
    for (int i = 0; i < op.N(); ++i) {
      for (int c = 0; c < op.d(); ++c) du(c) = grads[static_cast<std::size_t>(i)].at(node, c);
      acc += frozen.coeffs()[static_cast<std::size_t>(i)] * du;
    }
    for (int c = 0; c < op.l(); ++c) out.at(node, c) = acc(c);
  }
  return out;
}

}  // namespace aqx
