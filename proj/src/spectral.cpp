#include "aqx/spectral.hpp"

#include <fftw3.h>

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <tuple>

#include "aqx/errors.hpp"

namespace aqx {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// FFTW planning is not thread-safe; execution with the new-array interface is.
// Plans are created once per (dims, components, sign) and kept for the process
// lifetime.
fftw_plan cached_plan(const std::vector<int>& dims, int components, int sign) {
  static std::mutex mutex;
  static std::map<std::tuple<std::vector<int>, int, int>, fftw_plan> plans;
  std::lock_guard<std::mutex> lock(mutex);
  auto key = std::make_tuple(dims, components, sign);
  if (auto it = plans.find(key); it != plans.end()) return it->second;

  std::size_t total = static_cast<std::size_t>(components);
  for (int m : dims) total *= static_cast<std::size_t>(m);
  auto* in = fftw_alloc_complex(total);
  auto* out = fftw_alloc_complex(total);
  fftw_plan plan = fftw_plan_many_dft(static_cast<int>(dims.size()), dims.data(), components,
                                      in, nullptr, components, 1, out, nullptr, components, 1,
                                      sign, FFTW_ESTIMATE | FFTW_UNALIGNED);
  fftw_free(in);
  fftw_free(out);
  if (plan == nullptr) throw NumericalError("FftPlan", "spectral: FFTW could not create a plan");
  plans.emplace(std::move(key), plan);
  return plan;
}

// Cell grids start at -1/2, so the phase exp(-+2 pi i origin . lambda) that
// turns index-based DFT coefficients into coefficients with respect to true
// node coordinates is (-1)^(lambda_1 + ... + lambda_N), applied exactly.
void apply_phases(const Grid& grid, int components, std::span<Complex> data) {
  if (grid.origin() == 0.0) return;
  std::vector<int> idx(static_cast<std::size_t>(grid.dim()));
  for (std::size_t node = 0; node < grid.size(); ++node) {
    grid.multi_index(node, idx);
    int parity = 0;
    for (int a = 0; a < grid.dim(); ++a) {
      const int m = grid.dims(a);
      const int lambda = idx[static_cast<std::size_t>(a)] < m / 2 ? idx[static_cast<std::size_t>(a)]
                                                                  : idx[static_cast<std::size_t>(a)] - m;
      parity += lambda;
    }
    if (parity % 2 == 0) continue;
    for (int c = 0; c < components; ++c) data[node * components + c] = -data[node * components + c];
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid

Grid::Grid(std::vector<int> dims, Domain domain) : dims_(std::move(dims)), domain_(domain) {
  if (dims_.empty() || dims_.size() > 3)
    throw ConfigError("InvalidGrid", "spectral: grid dimension must be 1, 2 or 3");
  size_ = 1;
  for (int m : dims_) {
    if (m < 4 || m % 2 != 0)
      throw ConfigError("InvalidGrid",
                        "spectral: grid sizes must be even and >= 4, got " + std::to_string(m));
    size_ *= static_cast<std::size_t>(m);
  }
}

Grid Grid::cube(int n, int m, Domain domain) {
  return Grid(std::vector<int>(static_cast<std::size_t>(n), m), domain);
}

double Grid::coord(int axis, int j) const {
  return origin() + static_cast<double>(j) / dims_[static_cast<std::size_t>(axis)];
}

void Grid::multi_index(std::size_t node, std::span<int> out) const {
  for (int a = dim() - 1; a >= 0; --a) {
    const auto m = static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]);
    out[static_cast<std::size_t>(a)] = static_cast<int>(node % m);
    node /= m;
  }
}

std::size_t Grid::flat_index(std::span<const int> idx) const {
  std::size_t node = 0;
  for (int a = 0; a < dim(); ++a)
    node = node * static_cast<std::size_t>(dims_[static_cast<std::size_t>(a)]) +
           static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
  return node;
}

void Grid::coords(std::size_t node, std::span<double> out) const {
  int idx[3];
  multi_index(node, std::span<int>(idx, static_cast<std::size_t>(dim())));
  for (int a = 0; a < dim(); ++a) out[static_cast<std::size_t>(a)] = coord(a, idx[a]);
}

void Grid::frequency(std::size_t node, std::span<int> out) const {
  multi_index(node, out);
  for (int a = 0; a < dim(); ++a) {
    const int m = dims_[static_cast<std::size_t>(a)];
    auto& k = out[static_cast<std::size_t>(a)];
    if (k >= m / 2) k -= m;
  }
}

std::size_t Grid::slot_of(std::span<const int> lambda) const {
  int idx[3];
  for (int a = 0; a < dim(); ++a) {
    const int m = dims_[static_cast<std::size_t>(a)];
    idx[a] = ((lambda[static_cast<std::size_t>(a)] % m) + m) % m;
  }
  return flat_index(std::span<const int>(idx, static_cast<std::size_t>(dim())));
}

bool Grid::is_nyquist(std::size_t node) const {
  int f[3];
  frequency(node, std::span<int>(f, static_cast<std::size_t>(dim())));
  for (int a = 0; a < dim(); ++a)
    if (f[a] == -dims_[static_cast<std::size_t>(a)] / 2) return true;
  return false;
}

double Grid::frequency_norm2(std::size_t node) const {
  int f[3];
  frequency(node, std::span<int>(f, static_cast<std::size_t>(dim())));
  double s = 0.0;
  for (int a = 0; a < dim(); ++a) s += static_cast<double>(f[a]) * f[a];
  return s;
}

Grid Grid::refined(int factor) const {
  auto dims = dims_;
  for (auto& m : dims) m *= factor;
  return Grid(std::move(dims), domain_);
}

// ---------------------------------------------------------------------------
// PeriodicField

PeriodicField::PeriodicField(Grid grid, int components)
    : grid_(std::move(grid)),
      components_(components),
      values_(grid_.size() * static_cast<std::size_t>(components), 0.0) {}

PeriodicField::PeriodicField(Grid grid, int components, std::vector<double> values)
    : grid_(std::move(grid)), components_(components), values_(std::move(values)) {
  if (values_.size() != grid_.size() * static_cast<std::size_t>(components_))
    throw ConfigError("ShapeMismatch", "spectral: value count does not match grid * components");
}

std::vector<double> PeriodicField::mean() const {
  std::vector<double> m(static_cast<std::size_t>(components_), 0.0);
  for (std::size_t node = 0; node < nodes(); ++node)
    for (int c = 0; c < components_; ++c) m[static_cast<std::size_t>(c)] += at(node, c);
  for (auto& v : m) v /= static_cast<double>(nodes());
  return m;
}

PeriodicField& PeriodicField::operator+=(const PeriodicField& other) {
  axpy(1.0, other);
  return *this;
}

PeriodicField& PeriodicField::operator-=(const PeriodicField& other) {
  axpy(-1.0, other);
  return *this;
}

PeriodicField& PeriodicField::operator*=(double s) {
  for (auto& v : values_) v *= s;
  return *this;
}

void PeriodicField::axpy(double s, const PeriodicField& other) {
  if (!(other.grid_ == grid_) || other.components_ != components_)
    throw ConfigError("ShapeMismatch", "spectral: field shapes differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += s * other.values_[i];
}

PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
PeriodicField operator*(double s, PeriodicField a) { return a *= s; }

// ---------------------------------------------------------------------------
// Spectrum and transforms

Spectrum::Spectrum(Grid grid, int components)
    : grid_(std::move(grid)),
      components_(components),
      coeffs_(grid_.size() * static_cast<std::size_t>(components), Complex{}) {}

Spectrum forward_transform(const PeriodicField& field) {
  const Grid& grid = field.grid();
  const int d = field.components();
  std::vector<Complex> in(field.values().begin(), field.values().end());
  Spectrum out(grid, d);
  fftw_plan plan = cached_plan(grid.dims(), d, FFTW_FORWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.coeffs().data()));
  const double scale = 1.0 / static_cast<double>(grid.size());
  for (auto& c : out.coeffs()) c *= scale;
  apply_phases(grid, d, out.coeffs());
  return out;
}

PeriodicField inverse_transform(const Spectrum& spectrum, ImagPolicy policy) {
  const Grid& grid = spectrum.grid();
  const int d = spectrum.components();
  std::vector<Complex> in(spectrum.coeffs().begin(), spectrum.coeffs().end());
  apply_phases(grid, d, in);
  std::vector<Complex> out(in.size());
  fftw_plan plan = cached_plan(grid.dims(), d, FFTW_BACKWARD);
  fftw_execute_dft(plan, reinterpret_cast<fftw_complex*>(in.data()),
                   reinterpret_cast<fftw_complex*>(out.data()));

  PeriodicField field(grid, d);
  double re2 = 0.0;
  double im2 = 0.0;
  auto vals = field.values();
  for (std::size_t i = 0; i < out.size(); ++i) {
    vals[i] = out[i].real();
    re2 += out[i].real() * out[i].real();
    im2 += out[i].imag() * out[i].imag();
  }
  if (policy == ImagPolicy::strict && std::sqrt(im2) > 1e-9 * std::max(std::sqrt(re2), 1e-300) &&
      im2 > 0.0)
    throw NumericalError("NonSymmetricSpectrum",
                         "spectral/inverse_transform: reconstruction has a non-negligible "
                         "imaginary part");
  return field;
}

double lp_norm(const PeriodicField& field, double p) {
  const int d = field.components();
  double s = 0.0;
  for (std::size_t node = 0; node < field.nodes(); ++node) {
    double n2 = 0.0;
    for (int c = 0; c < d; ++c) n2 += field.at(node, c) * field.at(node, c);
    s += p == 2.0 ? n2 : std::pow(std::sqrt(n2), p);
  }
  s /= static_cast<double>(field.nodes());
  return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p);
}

double hneg_norm(const Spectrum& spectrum) {
  const Grid& grid = spectrum.grid();
  const int d = spectrum.components();
  double s = 0.0;
  for (std::size_t slot = 0; slot < grid.size(); ++slot) {
    double a2 = 0.0;
    for (int c = 0; c < d; ++c) a2 += std::norm(spectrum.at(slot, c));
    s += a2 / (1.0 + kTwoPi * kTwoPi * grid.frequency_norm2(slot));
  }
  return std::sqrt(s);
}

double hneg_norm(const PeriodicField& field) { return hneg_norm(forward_transform(field)); }

PeriodicField remove_mean(PeriodicField field) {
  const auto m = field.mean();
  for (std::size_t node = 0; node < field.nodes(); ++node)
    for (int c = 0; c < field.components(); ++c) field.at(node, c) -= m[static_cast<std::size_t>(c)];
  return field;
}

void trig_interpolate(const Spectrum& spectrum, std::span<const double> point,
                      std::span<double> out) {
  const Grid& grid = spectrum.grid();
  const int n = grid.dim();
  const int d = spectrum.components();
  // Per-axis basis values; Nyquist frequencies use cosines so the interpolant
  // stays real and reproduces node values.
  std::vector<std::vector<Complex>> basis(static_cast<std::size_t>(n));
  for (int a = 0; a < n; ++a) {
    const int m = grid.dims(a);
    auto& b = basis[static_cast<std::size_t>(a)];
    b.resize(static_cast<std::size_t>(m));
    for (int k = 0; k < m; ++k) {
      const int lambda = k < m / 2 ? k : k - m;
      const double arg = kTwoPi * point[static_cast<std::size_t>(a)] * lambda;
      b[static_cast<std::size_t>(k)] = lambda == -m / 2 ? Complex(std::cos(arg), 0.0)
                                                        : std::polar(1.0, arg);
    }
  }
  std::vector<Complex> acc(static_cast<std::size_t>(d), Complex{});
  int idx[3];
  for (std::size_t slot = 0; slot < grid.size(); ++slot) {
    grid.multi_index(slot, std::span<int>(idx, static_cast<std::size_t>(n)));
    Complex e{1.0, 0.0};
    for (int a = 0; a < n; ++a) e *= basis[static_cast<std::size_t>(a)][static_cast<std::size_t>(idx[a])];
    for (int c = 0; c < d; ++c) acc[static_cast<std::size_t>(c)] += spectrum.at(slot, c) * e;
  }
  for (int c = 0; c < d; ++c) out[static_cast<std::size_t>(c)] = acc[static_cast<std::size_t>(c)].real();
}

Spectrum resample_spectrum(const Spectrum& spectrum, const Grid& target) {
  const Grid& source = spectrum.grid();
  if (source.dim() != target.dim())
    throw ConfigError("ShapeMismatch", "spectral/resample: dimension mismatch");
  const int d = spectrum.components();
  Spectrum out(target, d);
  int f[3];
  for (std::size_t slot = 0; slot < source.size(); ++slot) {
    source.frequency(slot, std::span<int>(f, static_cast<std::size_t>(source.dim())));
    bool fits = true;
    for (int a = 0; a < target.dim(); ++a) {
      const int m = target.dims(a);
      if (f[a] < -m / 2 || f[a] >= m / 2) fits = false;
      // A source Nyquist slot has no partner on a finer grid.
      if (f[a] == -source.dims(a) / 2 && source.dims(a) != m) fits = false;
    }
    if (!fits) continue;
    const std::size_t t = target.slot_of(std::span<const int>(f, static_cast<std::size_t>(target.dim())));
    for (int c = 0; c < d; ++c) out.at(t, c) = spectrum.at(slot, c);
  }
  return out;
}

}  // namespace aqx
