#pragma once

// Test-only oracles, independent of the implementation paths they check:
// finite differences, golden-section scalar minimization, sign-change root
// sweeps, a naive DCT-II, and a direct (non-separable) reflective convolution.

#include <cmath>
#include <functional>
#include <random>
#include <vector>

namespace oracle {

inline double central_diff(const std::function<double(double)>& f, double x,
                           double h) {
  return (f(x + h) - f(x - h)) / (2.0 * h);
}

// golden-section minimizer on [a, b]
inline double golden_min(const std::function<double(double)>& f, double a, double b,
                         int iters = 220) {
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int i = 0; i < iters; ++i) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = f(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = f(x2);
    }
  }
  return 0.5 * (a + b);
}

// All sign-change roots of f on [lo, hi] over `cells` uniform subdivisions,
// bisected to ~1e-13 relative.
inline std::vector<double> bisection_sweep(const std::function<double(double)>& f,
                                           double lo, double hi, int cells) {
  std::vector<double> roots;
  const double step = (hi - lo) / cells;
  double a = lo, fa = f(a);
  for (int i = 0; i < cells; ++i) {
    const double b = (i + 1 == cells) ? hi : a + step;
    const double fb = f(b);
    if (fa == 0.0) roots.push_back(a);
    if (fa * fb < 0.0) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (x0 + x1);
        const double fm = f(mid);
        if (f0 * fm <= 0.0)
          x1 = mid;
        else {
          x0 = mid;
          f0 = fm;
        }
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  if (fa == 0.0) roots.push_back(hi);
  return roots;
}

// Naive O(n^2 m^2) orthonormal DCT-II for small grids.
inline std::vector<double> dct2_reference(const std::vector<double>& img, int h,
                                          int w) {
  std::vector<double> out(img.size(), 0.0);
  for (int ky = 0; ky < h; ++ky) {
    const double sy = ky == 0 ? std::sqrt(1.0 / h) : std::sqrt(2.0 / h);
    for (int kx = 0; kx < w; ++kx) {
      const double sx = kx == 0 ? std::sqrt(1.0 / w) : std::sqrt(2.0 / w);
      double acc = 0.0;
      for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c)
          acc += img[static_cast<std::size_t>(r) * w + c] *
                 std::cos(M_PI * (2.0 * r + 1.0) * ky / (2.0 * h)) *
                 std::cos(M_PI * (2.0 * c + 1.0) * kx / (2.0 * w));
      out[static_cast<std::size_t>(ky) * w + kx] = sy * sx * acc;
    }
  }
  return out;
}

// Direct 2-D convolution with the outer-product kernel under half-sample
// symmetric extension; deliberately not separable.
inline std::vector<double> convolve2d_reference(const std::vector<double>& img, int h,
                                                int w, const std::vector<double>& k1d) {
  const int radius = static_cast<int>(k1d.size()) / 2;
  auto reflect = [](int j, int n) {
    while (j < 0 || j >= n) {
      if (j < 0) j = -j - 1;
      if (j >= n) j = 2 * n - 1 - j;
    }
    return j;
  };
  std::vector<double> out(img.size(), 0.0);
  for (int r = 0; r < h; ++r)
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int dr = -radius; dr <= radius; ++dr)
        for (int dc = -radius; dc <= radius; ++dc)
          acc += k1d[dr + radius] * k1d[dc + radius] *
                 img[static_cast<std::size_t>(reflect(r + dr, h)) * w +
                     reflect(c + dc, w)];
      out[static_cast<std::size_t>(r) * w + c] = acc;
    }
  return out;
}

struct Rng {
  std::mt19937_64 eng;
  explicit Rng(std::uint64_t seed) : eng(seed) {}
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(eng);
  }
  double log_uniform(double lo, double hi) {
    return std::exp(uniform(std::log(lo), std::log(hi)));
  }
  double gaussian() { return std::normal_distribution<double>(0.0, 1.0)(eng); }
  int integer(int lo, int hi) {
    return std::uniform_int_distribution<int>(lo, hi)(eng);
  }
};

}  // namespace oracle
