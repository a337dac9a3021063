#include "aqx/convex_oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "aqx/errors.hpp"

namespace aqx {

namespace {

struct Axis {
  double lo;
  double h;
  double at(int i) const { return lo + h * i; }
};

std::size_t power(int n, int d) {
  std::size_t s = 1;
  for (int k = 0; k < d; ++k) s *= static_cast<std::size_t>(n);
  return s;
}

// One sweep of out(b) = max_a [a_k b_k + in(a)] along axis k, where `in`
// already carries the conjugate variable on axes < k. argmax records the
// maximizing index along axis k.
void sweep(const std::vector<double>& in, std::vector<double>& out, std::vector<int>& argmax,
           int n, int d, int k, const Axis& src, const Axis& dst) {
  const std::size_t inner = power(n, d - k - 1);
  const std::size_t outer = power(n, k);
  out.assign(in.size(), -std::numeric_limits<double>::infinity());
  argmax.assign(in.size(), 0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t base = o * static_cast<std::size_t>(n) * inner + r;
      for (int j = 0; j < n; ++j) {
        const double b = dst.at(j);
        double best = -std::numeric_limits<double>::infinity();
        int arg = 0;
        for (int i = 0; i < n; ++i) {
          const double v = src.at(i) * b + in[base + static_cast<std::size_t>(i) * inner];
          if (v > best) {
            best = v;
            arg = i;
          }
        }
        out[base + static_cast<std::size_t>(j) * inner] = best;
        argmax[base + static_cast<std::size_t>(j) * inner] = arg;
      }
    }
}

}  // namespace

double ConvexTable::spacing(int axis) const {
  const auto a = static_cast<std::size_t>(axis);
  return (hi[a] - lo[a]) / (resolution - 1);
}

double ConvexTable::at(std::span<const double> xi) const {
  const int d = static_cast<int>(lo.size());
  std::vector<int> base(static_cast<std::size_t>(d));
  std::vector<double> frac(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const auto k = static_cast<std::size_t>(a);
    const double t = (xi[k] - lo[k]) / spacing(a);
    if (t < -1e-9 || t > resolution - 1 + 1e-9)
      throw ConfigError("OutOfBox", "envelope/convex_envelope_oracle: point outside the box");
    int i = std::clamp(static_cast<int>(std::floor(t)), 0, resolution - 2);
    base[k] = i;
    frac[k] = std::clamp(t - i, 0.0, 1.0);
  }
  double acc = 0.0;
  for (int corner = 0; corner < (1 << d); ++corner) {
    double w = 1.0;
    std::size_t flat = 0;
    for (int a = 0; a < d; ++a) {
      const auto k = static_cast<std::size_t>(a);
      const int bit = (corner >> a) & 1;
      w *= bit ? frac[k] : 1.0 - frac[k];
      flat = flat * static_cast<std::size_t>(resolution) + static_cast<std::size_t>(base[k] + bit);
    }
    if (w != 0.0) acc += w * values[flat];
  }
  return acc;
}

ConvexTable convex_envelope_oracle(const std::function<double(std::span<const double>)>& f,
                                   std::span<const double> lo, std::span<const double> hi,
                                   int resolution) {
  const int d = static_cast<int>(lo.size());
  const int n = resolution;
  if (d < 1 || d > 3 || hi.size() != lo.size() || n < 5)
    throw ConfigError("InvalidBox", "envelope/convex_envelope_oracle: invalid box or resolution");
  std::vector<Axis> primal(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const auto k = static_cast<std::size_t>(a);
    if (!(hi[k] > lo[k])) throw ConfigError("InvalidBox", "envelope/convex_envelope_oracle: empty box");
    primal[k] = Axis{lo[k], (hi[k] - lo[k]) / (n - 1)};
  }

  const std::size_t total = power(n, d);
  std::vector<double> fv(total);
  std::vector<int> idx(static_cast<std::size_t>(d));
  std::vector<double> pt(static_cast<std::size_t>(d));
  auto unflatten = [&](std::size_t flat) {
    for (int a = d - 1; a >= 0; --a) {
      idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % static_cast<std::size_t>(n));
      flat /= static_cast<std::size_t>(n);
    }
  };
  for (std::size_t i = 0; i < total; ++i) {
    unflatten(i);
    for (int a = 0; a < d; ++a)
      pt[static_cast<std::size_t>(a)] = primal[static_cast<std::size_t>(a)].at(idx[static_cast<std::size_t>(a)]);
    fv[i] = f(pt);
    if (!std::isfinite(fv[i]))
      throw NumericalError("NonFiniteValue", "envelope/convex_envelope_oracle: f is not finite");
  }

  // Dual box: range of the one-sided difference quotients on the middle half.
  std::vector<Axis> dual(static_cast<std::size_t>(d));
  std::vector<double> slo(static_cast<std::size_t>(d), std::numeric_limits<double>::infinity());
  std::vector<double> shi(static_cast<std::size_t>(d), -std::numeric_limits<double>::infinity());
  for (std::size_t i = 0; i < total; ++i) {
    unflatten(i);
    bool middle = true;
    for (int a = 0; a < d; ++a) {
      const int j = idx[static_cast<std::size_t>(a)];
      middle = middle && 4 * j >= n - 1 && 4 * j <= 3 * (n - 1);
    }
    if (!middle) continue;
    std::size_t stride = 1;
    for (int a = d - 1; a >= 0; --a) {
      const auto k = static_cast<std::size_t>(a);
      const double fwd = (fv[i + stride] - fv[i]) / primal[k].h;
      const double bwd = (fv[i] - fv[i - stride]) / primal[k].h;
      slo[k] = std::min({slo[k], fwd, bwd});
      shi[k] = std::max({shi[k], fwd, bwd});
      stride *= static_cast<std::size_t>(n);
    }
  }
  std::vector<double> range(static_cast<std::size_t>(d));
  for (int a = 0; a < d; ++a) {
    const auto k = static_cast<std::size_t>(a);
    if (!(shi[k] > slo[k])) {
      slo[k] -= 0.5;
      shi[k] += 0.5;
    }
    range[k] = 0.5 * (shi[k] - slo[k]);
    dual[k] = Axis{slo[k], (shi[k] - slo[k]) / (n - 1)};
  }

  // f*(s) = max_xi s.xi - f(xi), then f**(xi) = max_s s.xi - f*(s).
  std::vector<double> cur(fv.size());
  for (std::size_t i = 0; i < total; ++i) cur[i] = -fv[i];
  std::vector<std::vector<int>> args(static_cast<std::size_t>(d));
  std::vector<double> next;
  for (int a = 0; a < d; ++a) {
    sweep(cur, next, args[static_cast<std::size_t>(a)], n, d, a, primal[static_cast<std::size_t>(a)],
          dual[static_cast<std::size_t>(a)]);
    cur.swap(next);
  }
  // Recover the full argmax of the first transform for interior dual points.
  for (std::size_t i = 0; i < total; ++i) {
    unflatten(i);
    bool interior = true;
    for (int a = 0; a < d; ++a)
      interior = interior && idx[static_cast<std::size_t>(a)] > 0 && idx[static_cast<std::size_t>(a)] < n - 1;
    if (!interior) continue;
    std::vector<int> m = idx;  // s indices, replaced by xi indices from the last axis down
    for (int a = d - 1; a >= 0; --a) {
      std::size_t flat = 0;
      for (int b = 0; b < d; ++b) flat = flat * static_cast<std::size_t>(n) + static_cast<std::size_t>(m[static_cast<std::size_t>(b)]);
      m[static_cast<std::size_t>(a)] = args[static_cast<std::size_t>(a)][flat];
    }
    for (int a = 0; a < d; ++a)
      if (m[static_cast<std::size_t>(a)] == 0 || m[static_cast<std::size_t>(a)] == n - 1)
        throw NumericalError("BoxTooSmall",
                             "envelope/convex_envelope_oracle: conjugate attained on the box "
                             "boundary; enlarge the box");
  }

  for (auto& v : cur) v = -v;
  for (int a = 0; a < d; ++a) {
    sweep(cur, next, args[static_cast<std::size_t>(a)], n, d, a, dual[static_cast<std::size_t>(a)],
          primal[static_cast<std::size_t>(a)]);
    cur.swap(next);
  }

  ConvexTable t;
  t.lo.assign(lo.begin(), lo.end());
  t.hi.assign(hi.begin(), hi.end());
  t.resolution = n;
  t.values = std::move(cur);
  t.slope_range = range;
  return t;
}

}  // namespace aqx
