#pragma once

// The DCT-diagonalized forward model. With symmetric (half-sample reflective)
// boundaries the Gaussian blur K satisfies R K R' = diag(lambda), so every
// S(gamma)-dependent quantity reduces to elementwise work on the spectrum.

#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "ebf/dct.hpp"
#include "ebf/hyperprior.hpp"
#include "ebf/image.hpp"

namespace ebf {

struct GammaState {
  std::vector<double> gamma;
  std::vector<int> active;  // indices with gamma[i] > 0

  GammaState() = default;
  explicit GammaState(std::vector<double> g) : gamma(std::move(g)) { rebuild_active(); }

  void rebuild_active() {
    active.clear();
    for (std::size_t i = 0; i < gamma.size(); ++i)
      if (gamma[i] > 0.0) active.push_back(static_cast<int>(i));
  }

  int active_count() const { return static_cast<int>(active.size()); }
};

struct SpectralOperator {
  int height = 0;
  int width = 0;
  double sigma = 1.0;          // noise precision
  std::vector<double> lambda;  // DCT eigenvalues of the blur, length height*width

  int size() const { return height * width; }

  void validate() const {
    if (height <= 0 || width <= 0 || !(sigma > 0.0) ||
        lambda.size() != static_cast<std::size_t>(height) * width)
      throw std::invalid_argument("SpectralOperator: inconsistent fields");
  }
};

// Normalized Gaussian taps, truncated at radius ceil(4 sigma_ker).
inline std::vector<double> gaussian_kernel(double sigma_ker) {
  if (!(sigma_ker > 0.0))
    throw std::invalid_argument("gaussian_kernel: sigma_ker must be > 0");
  const int radius = static_cast<int>(std::ceil(4.0 * sigma_ker));
  std::vector<double> k(2 * radius + 1);
  double sum = 0.0;
  for (int t = -radius; t <= radius; ++t) {
    const double v = std::exp(-0.5 * (t / sigma_ker) * (t / sigma_ker));
    k[t + radius] = v;
    sum += v;
  }
  for (double& v : k) v /= sum;
  return k;
}

namespace detail {

// half-sample symmetric index: ... 1 0 | 0 1 2 ... n-1 | n-1 n-2 ...
inline int reflect_index(int j, int n) {
  while (j < 0 || j >= n) {
    if (j < 0) j = -j - 1;
    if (j >= n) j = 2 * n - 1 - j;
  }
  return j;
}

inline void conv1d_rows(const std::vector<double>& in, std::vector<double>& out, int h,
                        int w, const std::vector<double>& ker) {
  const int radius = static_cast<int>(ker.size()) / 2;
  for (int r = 0; r < h; ++r) {
    const double* row = in.data() + static_cast<std::size_t>(r) * w;
    double* orow = out.data() + static_cast<std::size_t>(r) * w;
    for (int c = 0; c < w; ++c) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += ker[t + radius] * row[reflect_index(c + t, w)];
      orow[c] = acc;
    }
  }
}

inline void conv1d_cols(const std::vector<double>& in, std::vector<double>& out, int h,
                        int w, const std::vector<double>& ker) {
  const int radius = static_cast<int>(ker.size()) / 2;
  for (int c = 0; c < w; ++c) {
    for (int r = 0; r < h; ++r) {
      double acc = 0.0;
      for (int t = -radius; t <= radius; ++t)
        acc += ker[t + radius] *
               in[static_cast<std::size_t>(reflect_index(r + t, h)) * w + c];
      out[static_cast<std::size_t>(r) * w + c] = acc;
    }
  }
}

}  // namespace detail

// One application of the blur under symmetric boundaries (separable).
inline ImageGrid blur_apply(const ImageGrid& img, double sigma_ker) {
  const auto ker = gaussian_kernel(sigma_ker);
  ImageGrid tmp(img.height, img.width), out(img.height, img.width);
  detail::conv1d_rows(img.pixels, tmp.pixels, img.height, img.width, ker);
  detail::conv1d_cols(tmp.pixels, out.pixels, img.height, img.width, ker);
  return out;
}

// Eigenvalues of the blur in the DCT basis via the impulse ratio
// DCT2(K e1) / DCT2(e1); the DC entry is 1 for a normalized kernel.
inline std::vector<double> blur_eigenvalues(double sigma_ker, int height, int width) {
  ImageGrid impulse(height, width);
  impulse.at(0, 0) = 1.0;
  const Dct2 dct(height, width);
  const auto num = dct.forward(blur_apply(impulse, sigma_ker).pixels);
  const auto den = dct.forward(impulse.pixels);
  std::vector<double> lambda(num.size());
  for (std::size_t i = 0; i < num.size(); ++i) lambda[i] = num[i] / den[i];
  return lambda;
}

// F'y = Lambda .* DCT2(y)   (F = K R', K symmetric under reflective boundaries)
inline std::vector<double> ft_y(const SpectralOperator& op, const ImageGrid& y) {
  op.validate();
  if (y.height != op.height || y.width != op.width)
    throw std::invalid_argument("ft_y: shape mismatch");
  auto coeffs = Dct2(op.height, op.width).forward(y.pixels);
  for (std::size_t i = 0; i < coeffs.size(); ++i) coeffs[i] *= op.lambda[i];
  return coeffs;
}

// diag(F' S^-1 F)_i = sigma l^2 - sigma^2 l^4 g / (1 + sigma l^2 g)
//                   = sigma l^2 / (1 + sigma l^2 g); no Gamma^{-1} anywhere.
inline std::vector<double> q_diag(const SpectralOperator& op, const GammaState& state) {
  std::vector<double> out(state.gamma.size());
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double sl2 = op.sigma * op.lambda[i] * op.lambda[i];
    out[i] = sl2 / (1.0 + sl2 * state.gamma[i]);
  }
  return out;
}

// x*(gamma)_i = g_i sigma fty_i / (1 + sigma l_i^2 g_i); exactly 0 when g_i = 0.
inline std::vector<double> x_update(const SpectralOperator& op, const GammaState& state,
                                    const std::vector<double>& fty) {
  std::vector<double> x(state.gamma.size(), 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double g = state.gamma[i];
    if (g == 0.0) continue;
    x[i] = g * op.sigma * fty[i] / (1.0 + op.sigma * op.lambda[i] * op.lambda[i] * g);
  }
  return x;
}

// log det S = -m log sigma + sum log(1 + sigma l_i^2 g_i)
inline double log_det_S(const SpectralOperator& op, const GammaState& state) {
  double acc = -static_cast<double>(op.size()) * std::log(op.sigma);
  for (std::size_t i = 0; i < state.gamma.size(); ++i)
    acc += std::log1p(op.sigma * op.lambda[i] * op.lambda[i] * state.gamma[i]);
  return acc;
}

namespace detail {

inline double quad_form_fty(const SpectralOperator& op, const GammaState& state,
                            const std::vector<double>& fty, double y_norm_sq) {
  double acc = 0.0;
  for (std::size_t i = 0; i < fty.size(); ++i) {
    const double g = state.gamma[i];
    if (g == 0.0) continue;
    acc += g * fty[i] * fty[i] / (1.0 + op.sigma * op.lambda[i] * op.lambda[i] * g);
  }
  return op.sigma * y_norm_sq - op.sigma * op.sigma * acc;
}

}  // namespace detail

// y' S^-1 y = sigma |y|^2 - sigma^2 sum g_i fty_i^2 / (1 + sigma l_i^2 g_i)
inline double quad_form(const SpectralOperator& op, const GammaState& state,
                        const ImageGrid& y) {
  const auto fty = ft_y(op, y);
  const double ynorm2 =
      std::inner_product(y.pixels.begin(), y.pixels.end(), y.pixels.begin(), 0.0);
  return detail::quad_form_fty(op, state, fty, ynorm2);
}

// J(gamma) = y'S^-1 y / 2 + log det S / 2 + sum H(gamma_i); +inf if any H is
// not finite at the given gamma.
inline double objective_J(const SpectralOperator& op, const GammaState& state,
                          const ImageGrid& y, const HyperpriorSpec& prior) {
  double h_sum = 0.0;
  for (double g : state.gamma) {
    const double h = h_value(prior, g);
    if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
    h_sum += h;
  }
  return 0.5 * quad_form(op, state, y) + 0.5 * log_det_S(op, state) + h_sum;
}

}  // namespace ebf
