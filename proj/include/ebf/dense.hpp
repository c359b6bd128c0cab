#pragma once

// Dense small-scale route: forms S(gamma) = sigma^{-1} I + F Gamma F' explicitly
// and works through an SPD factorization. This is the verification side of the
// spectral/dense pair; keep it dumb and direct.

#include <Eigen/Cholesky>
#include <Eigen/Dense>
#include <stdexcept>
#include <utility>

#include "ebf/dct.hpp"
#include "ebf/hyperprior.hpp"
#include "ebf/spectral.hpp"

namespace ebf {

struct DenseProblem {
  Eigen::MatrixXd F;  // m x n, m <= n permitted
  Eigen::VectorXd y;  // m
  double sigma = 1.0;

  int m() const { return static_cast<int>(F.rows()); }
  int n() const { return static_cast<int>(F.cols()); }

  void validate() const {
    if (F.rows() == 0 || F.cols() == 0 || y.size() != F.rows() || !(sigma > 0.0))
      throw std::invalid_argument("DenseProblem: inconsistent fields");
  }
};

namespace detail {

inline Eigen::MatrixXd dense_S(const DenseProblem& dp, const GammaState& state) {
  const int m = dp.m(), n = dp.n();
  if (state.gamma.size() != static_cast<std::size_t>(n))
    throw std::invalid_argument("dense_S: gamma length mismatch");
  Eigen::MatrixXd S = Eigen::MatrixXd::Identity(m, m) / dp.sigma;
  for (int i = 0; i < n; ++i) {
    const double g = state.gamma[i];
    if (g != 0.0) S.noalias() += g * dp.F.col(i) * dp.F.col(i).transpose();
  }
  return S;
}

struct DenseSolve {
  Eigen::LLT<Eigen::MatrixXd> llt;
  Eigen::MatrixXd w;        // S^{-1} F  (m x n)
  Eigen::VectorXd siy;      // S^{-1} y
  double log_det = 0.0;

  DenseSolve(const DenseProblem& dp, const GammaState& state)
      : llt(dense_S(dp, state)) {
    if (llt.info() != Eigen::Success)
      throw std::runtime_error("dense oracle: S factorization failed");
    w = llt.solve(dp.F);
    siy = llt.solve(dp.y);
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < l.rows(); ++i) log_det += 2.0 * std::log(l(i, i));
  }
};

}  // namespace detail

inline double dense_log_det_S(const DenseProblem& dp, const GammaState& state) {
  return detail::DenseSolve(dp, state).log_det;
}

inline double dense_quad_form(const DenseProblem& dp, const GammaState& state) {
  return dp.y.dot(detail::DenseSolve(dp, state).siy);
}

// p~_i = f_i' S^-1 y
inline Eigen::VectorXd dense_p_tilde(const DenseProblem& dp, const GammaState& state) {
  return dp.F.transpose() * detail::DenseSolve(dp, state).siy;
}

// q~_ii = f_i' S^-1 f_i
inline Eigen::VectorXd dense_q_diag(const DenseProblem& dp, const GammaState& state) {
  const detail::DenseSolve ds(dp, state);
  Eigen::VectorXd q(dp.n());
  for (int i = 0; i < dp.n(); ++i) q(i) = dp.F.col(i).dot(ds.w.col(i));
  return q;
}

// x*(gamma) = Gamma F' S^-1 y
inline Eigen::VectorXd dense_x_update(const DenseProblem& dp, const GammaState& state) {
  Eigen::VectorXd x = dense_p_tilde(dp, state);
  for (int i = 0; i < dp.n(); ++i) x(i) *= state.gamma[i];
  return x;
}

inline double dense_objective(const DenseProblem& dp, const GammaState& state,
                              const HyperpriorSpec& prior) {
  const detail::DenseSolve ds(dp, state);
  double h_sum = 0.0;
  for (double g : state.gamma) {
    const double h = h_value(prior, g);
    if (!std::isfinite(h)) return std::numeric_limits<double>::infinity();
    h_sum += h;
  }
  return 0.5 * dp.y.dot(ds.siy) + 0.5 * ds.log_det + h_sum;
}

// dJ/dg_i = q~_ii/2 - p~_i^2/2 + H'(g_i); needs gamma > 0 coordinatewise.
inline Eigen::VectorXd dense_gradient(const DenseProblem& dp, const GammaState& state,
                                      const HyperpriorSpec& prior) {
  const detail::DenseSolve ds(dp, state);
  Eigen::VectorXd grad(dp.n());
  for (int i = 0; i < dp.n(); ++i) {
    const double p = dp.F.col(i).dot(ds.siy);
    const double q = dp.F.col(i).dot(ds.w.col(i));
    grad(i) = 0.5 * q - 0.5 * p * p + h_prime(prior, state.gamma[i]);
  }
  return grad;
}

// d2J/dg_i dg_j = -q~_ij^2/2 + p~_i q~_ij p~_j + delta_ij H''(g_i)
inline Eigen::MatrixXd dense_hessian(const DenseProblem& dp, const GammaState& state,
                                     const HyperpriorSpec& prior) {
  const detail::DenseSolve ds(dp, state);
  const Eigen::MatrixXd qt = dp.F.transpose() * ds.w;   // q~_ij
  const Eigen::VectorXd pt = dp.F.transpose() * ds.siy; // p~_i
  Eigen::MatrixXd hess(dp.n(), dp.n());
  for (int i = 0; i < dp.n(); ++i)
    for (int j = 0; j < dp.n(); ++j)
      hess(i, j) = -0.5 * qt(i, j) * qt(i, j) + pt(i) * qt(i, j) * pt(j);
  for (int i = 0; i < dp.n(); ++i) hess(i, i) += h_second(prior, state.gamma[i]);
  return hess;
}

// Conditional posterior of x given gamma: mean Gamma F'S^-1 y,
// covariance Gamma - Gamma F'S^-1 F Gamma.
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> posterior_moments_dense(
    const DenseProblem& dp, const GammaState& state) {
  const detail::DenseSolve ds(dp, state);
  const int n = dp.n();
  Eigen::VectorXd mean = dp.F.transpose() * ds.siy;
  Eigen::MatrixXd cov = -dp.F.transpose() * ds.w;  // -F'S^-1F
  for (int i = 0; i < n; ++i) {
    mean(i) *= state.gamma[i];
    for (int j = 0; j < n; ++j) cov(i, j) *= state.gamma[i] * state.gamma[j];
    cov(i, i) += state.gamma[i];
  }
  return {std::move(mean), std::move(cov)};
}

// Dense twin of a spectral operator: F = K R' built column by column from
// impulses, for cross-checking the diagonalized path at small sizes.
inline DenseProblem dense_from_spectral(const SpectralOperator& op, const ImageGrid& y,
                                        double sigma_ker) {
  op.validate();
  const int n = op.size();
  const Dct2 dct(op.height, op.width);
  Eigen::MatrixXd F(n, n);
  for (int j = 0; j < n; ++j) {
    std::vector<double> e(n, 0.0);
    e[j] = 1.0;
    ImageGrid col(op.height, op.width);
    col.pixels = dct.inverse(e);  // R' e_j
    const ImageGrid blurred = blur_apply(col, sigma_ker);
    for (int i = 0; i < n; ++i) F(i, j) = blurred.pixels[i];
  }
  DenseProblem dp;
  dp.F = std::move(F);
  dp.y = Eigen::Map<const Eigen::VectorXd>(y.pixels.data(), n);
  dp.sigma = op.sigma;
  return dp;
}

}  // namespace ebf
