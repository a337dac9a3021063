#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace aqx {

using Complex = std::complex<double>;

/// Which box a grid discretizes. Cell grids cover Q = [-1/2, 1/2)^N, macro
/// grids cover the periodically identified Omega = [0, 1)^N. Nodes sit at the
/// cell corners origin + j / M, so quadrature is the equal-weight rectangle
/// rule (identical weights to the midpoint rule on the torus).
enum class Domain { cell, macro };

/// Uniform periodic grid with even per-axis counts (>= 4), 1 <= N <= 3.
/// Nodes are stored node-major with the last axis fastest.
class Grid {
 public:
  Grid() = default;
  explicit Grid(std::vector<int> dims, Domain domain = Domain::cell);

  /// Uniform grid with `m` points along each of `n` axes.
  static Grid cube(int n, int m, Domain domain = Domain::cell);

  int dim() const noexcept { return static_cast<int>(dims_.size()); }
  const std::vector<int>& dims() const noexcept { return dims_; }
  int dims(int axis) const { return dims_.at(static_cast<std::size_t>(axis)); }
  std::size_t size() const noexcept { return size_; }
  Domain domain() const noexcept { return domain_; }
  double origin() const noexcept { return domain_ == Domain::cell ? -0.5 : 0.0; }

  /// Coordinate of grid index `j` along `axis`.
  double coord(int axis, int j) const;
  /// Multi-index of a node (length N).
  void multi_index(std::size_t node, std::span<int> out) const;
  std::size_t flat_index(std::span<const int> idx) const;
  void coords(std::size_t node, std::span<double> out) const;

  /// Lattice frequency of a spectral slot, per axis in [-M/2, M/2).
  void frequency(std::size_t node, std::span<int> out) const;
  /// Slot holding lattice frequency `lambda` (taken modulo the grid).
  std::size_t slot_of(std::span<const int> lambda) const;
  /// True when some component of the slot's frequency equals -M/2.
  bool is_nyquist(std::size_t node) const;
  /// |lambda|^2 of a spectral slot.
  double frequency_norm2(std::size_t node) const;

  Grid refined(int factor) const;

  friend bool operator==(const Grid& a, const Grid& b) {
    return a.dims_ == b.dims_ && a.domain_ == b.domain_;
  }

 private:
  std::vector<int> dims_;
  Domain domain_ = Domain::cell;
  std::size_t size_ = 0;
};

/// Real d-component field sampled on a grid; component index fastest.
class PeriodicField {
 public:
  PeriodicField() = default;
  PeriodicField(Grid grid, int components);
  PeriodicField(Grid grid, int components, std::vector<double> values);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::size_t nodes() const noexcept { return grid_.size(); }

  std::span<double> values() noexcept { return values_; }
  std::span<const double> values() const noexcept { return values_; }
  double& at(std::size_t node, int c) { return values_[node * components_ + c]; }
  double at(std::size_t node, int c) const { return values_[node * components_ + c]; }

  /// Node average of each component.
  std::vector<double> mean() const;

  PeriodicField& operator+=(const PeriodicField& other);
  PeriodicField& operator-=(const PeriodicField& other);
  PeriodicField& operator*=(double s);
  /// this += s * other
  void axpy(double s, const PeriodicField& other);

 private:
  Grid grid_;
  int components_ = 0;
  std::vector<double> values_;
};

PeriodicField operator+(PeriodicField a, const PeriodicField& b);
PeriodicField operator-(PeriodicField a, const PeriodicField& b);
PeriodicField operator*(double s, PeriodicField a);

/// Fourier coefficients w^(lambda) = (1/|grid|) sum_y w(y) exp(-2 pi i y.lambda)
/// with y the true node coordinates. Slot layout matches PeriodicField.
class Spectrum {
 public:
  Spectrum() = default;
  Spectrum(Grid grid, int components);

  const Grid& grid() const noexcept { return grid_; }
  int components() const noexcept { return components_; }
  std::span<Complex> coeffs() noexcept { return coeffs_; }
  std::span<const Complex> coeffs() const noexcept { return coeffs_; }
  Complex& at(std::size_t slot, int c) { return coeffs_[slot * components_ + c]; }
  Complex at(std::size_t slot, int c) const { return coeffs_[slot * components_ + c]; }

  /// Coefficient at a lattice frequency.
  Complex at(std::span<const int> lambda, int c) const {
    return at(grid_.slot_of(lambda), c);
  }

 private:
  Grid grid_;
  int components_ = 0;
  std::vector<Complex> coeffs_;
};

Spectrum forward_transform(const PeriodicField& field);

enum class ImagPolicy {
  strict,   // throw NonSymmetricSpectrum if the reconstruction is not real
  discard,  // keep the real part
};

PeriodicField inverse_transform(const Spectrum& spectrum,
                                ImagPolicy policy = ImagPolicy::strict);

/// (sum_nodes |w|^p / |grid|)^(1/p), |.| the Euclidean norm over components.
double lp_norm(const PeriodicField& field, double p);

/// Periodic H^-1 multiplier norm (sum_lambda |g^|^2 / (1 + 4 pi^2 |lambda|^2))^(1/2).
double hneg_norm(const PeriodicField& field);
double hneg_norm(const Spectrum& spectrum);

PeriodicField remove_mean(PeriodicField field);

/// Evaluates the trigonometric interpolant of a spectrum at a point.
/// Nyquist slots contribute only their real part.
void trig_interpolate(const Spectrum& spectrum, std::span<const double> point,
                      std::span<double> out);

/// Zero-pads (or truncates) a spectrum onto another grid of the same domain.
Spectrum resample_spectrum(const Spectrum& spectrum, const Grid& target);

}  // namespace aqx
