#pragma once

// Orthonormal type-II 2-D DCT as separable matrix products. Plenty at the
// sizes this project runs (<= 256^2); no fast transform needed.

#include <cmath>
#include <stdexcept>
#include <vector>

#include "ebf/image.hpp"

namespace ebf {

class Dct2 {
 public:
  Dct2(int height, int width) : h_(height), w_(width) {
    if (height <= 0 || width <= 0) throw std::invalid_argument("Dct2: bad shape");
    ch_ = basis(height);
    cw_ = basis(width);
  }

  int height() const { return h_; }
  int width() const { return w_; }

  // coefficients = C_h * Z * C_w'
  std::vector<double> forward(const std::vector<double>& img) const {
    return apply(img, false);
  }

  // image = C_h' * X * C_w
  std::vector<double> inverse(const std::vector<double>& coeffs) const {
    return apply(coeffs, true);
  }

 private:
  // row k of the orthonormal DCT-II matrix: s_k cos(pi (2j+1) k / (2N))
  static std::vector<double> basis(int n) {
    std::vector<double> c(static_cast<std::size_t>(n) * n);
    for (int k = 0; k < n; ++k) {
      const double s = k == 0 ? std::sqrt(1.0 / n) : std::sqrt(2.0 / n);
      for (int j = 0; j < n; ++j)
        c[static_cast<std::size_t>(k) * n + j] =
            s * std::cos(M_PI * (2.0 * j + 1.0) * k / (2.0 * n));
    }
    return c;
  }

  std::vector<double> apply(const std::vector<double>& a, bool transpose) const {
    if (a.size() != static_cast<std::size_t>(h_) * w_)
      throw std::invalid_argument("Dct2: input length does not match shape");
    // rows pass: tmp(r, k) = sum_j a(r, j) * Cw(k, j)   (or Cw(j, k) if transposed)
    std::vector<double> tmp(a.size(), 0.0);
    for (int r = 0; r < h_; ++r) {
      const double* row = a.data() + static_cast<std::size_t>(r) * w_;
      for (int k = 0; k < w_; ++k) {
        double acc = 0.0;
        if (!transpose) {
          const double* ck = cw_.data() + static_cast<std::size_t>(k) * w_;
          for (int j = 0; j < w_; ++j) acc += row[j] * ck[j];
        } else {
          for (int j = 0; j < w_; ++j)
            acc += row[j] * cw_[static_cast<std::size_t>(j) * w_ + k];
        }
        tmp[static_cast<std::size_t>(r) * w_ + k] = acc;
      }
    }
    // columns pass
    std::vector<double> out(a.size(), 0.0);
    for (int k = 0; k < h_; ++k) {
      for (int r = 0; r < h_; ++r) {
        const double c = !transpose ? ch_[static_cast<std::size_t>(k) * h_ + r]
                                    : ch_[static_cast<std::size_t>(r) * h_ + k];
        if (c == 0.0) continue;
        const double* trow = tmp.data() + static_cast<std::size_t>(r) * w_;
        double* orow = out.data() + static_cast<std::size_t>(k) * w_;
        for (int j = 0; j < w_; ++j) orow[j] += c * trow[j];
      }
    }
    return out;
  }

  int h_, w_;
  std::vector<double> ch_, cw_;
};

inline std::vector<double> dct2_forward(const ImageGrid& img) {
  return Dct2(img.height, img.width).forward(img.pixels);
}

inline ImageGrid dct2_inverse(const std::vector<double>& coeffs, int height, int width) {
  ImageGrid img(height, width);
  img.pixels = Dct2(height, width).inverse(coeffs);
  return img;
}

}  // namespace ebf
