#pragma once

// Univariate analysis of the marginal-posterior coordinate objective
//   L(gamma) = -p^2 gamma / (2(1+q gamma)) + log(1+q gamma)/2 + H(gamma)
// over gamma >= 0: KKT enumeration per hyperprior, closed-form minimizers,
// local-minimizer certification, and an independent grid minimizer.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "ebf/hyperprior.hpp"
#include "ebf/polyroots.hpp"

namespace ebf {

struct ScalarProblem {
  double p2;  // p^2 >= 0 with p = f' S_{-i}^{-1} y
  double q;   // q = f' S_{-i}^{-1} f > 0
  HyperpriorSpec prior;

  ScalarProblem(double p2_in, double q_in, HyperpriorSpec prior_in)
      : p2(p2_in), q(q_in), prior(std::move(prior_in)) {
    if (!(p2 >= 0.0)) throw std::invalid_argument("ScalarProblem: p2 must be >= 0");
    if (!(q > 0.0)) throw std::invalid_argument("ScalarProblem: q must be > 0");
  }
};

enum class KktClass { ZeroGlobal, ZeroLocal, PositiveLocal, PositiveStationary };

inline const char* to_string(KktClass c) {
  switch (c) {
    case KktClass::ZeroGlobal: return "zero-global";
    case KktClass::ZeroLocal: return "zero-local";
    case KktClass::PositiveLocal: return "positive-local";
    case KktClass::PositiveStationary: return "positive-stationary";
  }
  return "?";
}

struct KktPoint {
  double gamma = 0.0;
  double multiplier = 0.0;  // Lagrange multiplier; exactly 0 for positive points
  KktClass classification = KktClass::ZeroGlobal;
};

inline double scalar_objective(const ScalarProblem& prob, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("scalar_objective: gamma must be >= 0");
  const double h = h_value(prob.prior, gamma);
  if (gamma == 0.0) return h;  // data terms vanish at the origin
  return -0.5 * prob.p2 * gamma / (1.0 + prob.q * gamma) +
         0.5 * std::log1p(prob.q * gamma) + h;
}

// L'(gamma) = (q^2 gamma + (q - p^2)) / (2 (1+q gamma)^2) + H'(gamma)
inline double scalar_derivative(const ScalarProblem& prob, double gamma) {
  double hp;
  if (gamma == 0.0) {
    hp = h_prime_at_zero(prob.prior);
    if (!std::isfinite(hp))
      throw std::invalid_argument("scalar_derivative: H'(0+) is not finite");
  } else if (gamma > 0.0) {
    hp = h_prime(prob.prior, gamma);
  } else {
    throw std::invalid_argument("scalar_derivative: gamma must be >= 0");
  }
  const double u = 1.0 + prob.q * gamma;
  return 0.5 * (prob.q * prob.q * gamma + (prob.q - prob.p2)) / (u * u) + hp;
}

// L''(gamma) = q/(1+q gamma)^2 (p^2/(1+q gamma) - q/2) + H''(gamma)
inline double scalar_second_derivative(const ScalarProblem& prob, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("scalar_second_derivative: gamma must be > 0");
  const double u = 1.0 + prob.q * gamma;
  return prob.q / (u * u) * (prob.p2 / u - 0.5 * prob.q) + h_second(prob.prior, gamma);
}

// No-hyperprior (SBL) closed form: 0 when q - p^2 >= 0, else (p^2 - q)/q^2.
inline double sbl_minimizer(double p2, double q) {
  if (!(q > 0.0)) throw std::invalid_argument("sbl_minimizer: q must be > 0");
  if (q - p2 >= 0.0) return 0.0;
  return (p2 - q) / (q * q);
}

// Half-Laplace closed form; positive branch is the unique positive root of
// 2 q^2 g^2 + (4q + beta q^2) g + 2 + beta (q - p2) = 0.
inline double half_laplace_minimizer(double p2, double q, double beta) {
  if (!(q > 0.0) || !(beta > 0.0))
    throw std::invalid_argument("half_laplace_minimizer: need q > 0 and beta > 0");
  if (q - p2 >= -2.0 / beta) return 0.0;
  return (-(4.0 + beta * q) + std::sqrt(beta * beta * q * q + 8.0 * beta * p2)) /
         (4.0 * q);
}

// Half-Gaussian: 0 when q - p2 >= 0, else the unique positive root of
// 4 q^2 g^3 + 8 q g^2 + (4 + beta^2 q^2) g + beta^2 (q - p2) = 0, beta = sqrt(2) theta.
inline double half_gaussian_minimizer(double p2, double q, double theta) {
  if (!(q > 0.0) || !(theta > 0.0))
    throw std::invalid_argument("half_gaussian_minimizer: need q > 0 and theta > 0");
  if (q - p2 >= 0.0) return 0.0;
  const double b2 = 2.0 * theta * theta;
  const auto roots = poly::real_roots_cubic(4.0 * q * q, 8.0 * q, 4.0 + b2 * q * q,
                                            b2 * (q - p2));
  double best = -1.0;
  for (double r : roots)
    if (r > 0.0 && (best < 0.0 || r < best)) best = r;
  if (best < 0.0)
    throw std::runtime_error("half_gaussian_minimizer: positive cubic root not found");
  return best;
}

namespace detail {

// Sign-change sweep of L' over (lo, hi) on a log grid; bisection in each cell.
inline std::vector<double> bracketed_stationary_points(
    const std::function<double(double)>& dL, double lo, double hi, int cells = 256) {
  std::vector<double> roots;
  if (!(hi > lo) || !(lo > 0.0)) return roots;
  const double ratio = std::pow(hi / lo, 1.0 / cells);
  double a = lo;
  double fa = dL(a);
  for (int i = 0; i < cells; ++i) {
    double b = (i + 1 == cells) ? hi : a * ratio;
    double fb = dL(b);
    if (std::isfinite(fa) && std::isfinite(fb) && fa * fb <= 0.0 && fa != fb) {
      double x0 = a, x1 = b, f0 = fa;
      for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(x0 * x1);
        const double fm = dL(mid);
        if (f0 * fm <= 0.0) {
          x1 = mid;
        } else {
          x0 = mid;
          f0 = fm;
        }
        if (x1 - x0 <= 1e-14 * x1) break;
      }
      roots.push_back(0.5 * (x0 + x1));
    }
    a = b;
    fa = fb;
  }
  return roots;
}

// Gamma(alpha, beta): L'(g) * g (1+qg)^2 expands to a cubic in g.
inline std::vector<double> gamma_prior_stationary(double p2, double q, double alpha,
                                                  double beta) {
  const double c1 = 1.0 - alpha;
  const auto roots = poly::real_roots_cubic(
      q * q / beta, 0.5 * q * q + 2.0 * q / beta + c1 * q * q,
      0.5 * (q - p2) + 1.0 / beta + 2.0 * c1 * q, c1);
  std::vector<double> pos;
  for (double r : roots)
    if (r > 0.0) pos.push_back(r);
  return pos;
}

// InverseGamma(alpha, beta): L'(g) * g^2 (1+qg)^2 expands to a cubic in g.
inline std::vector<double> inverse_gamma_stationary(double p2, double q, double alpha,
                                                    double beta) {
  const double a1 = alpha + 1.0;
  const auto roots = poly::real_roots_cubic(
      (0.5 + a1) * q * q, 0.5 * (q - p2) + 2.0 * a1 * q - beta * q * q,
      a1 - 2.0 * beta * q, -beta);
  std::vector<double> pos;
  for (double r : roots)
    if (r > 0.0) pos.push_back(r);
  return pos;
}

// A couple of Newton steps on L' to tighten closed-form roots.
inline double polish_stationary(const ScalarProblem& prob, double g) {
  for (int it = 0; it < 3; ++it) {
    if (!(g > 0.0)) break;
    const double d1 = scalar_derivative(prob, g);
    const double d2 = scalar_second_derivative(prob, g);
    if (d2 == 0.0 || !std::isfinite(d2)) break;
    const double next = g - d1 / d2;
    if (!(next > 0.0) || !std::isfinite(next)) break;
    if (std::abs(scalar_derivative(prob, next)) >= std::abs(d1)) break;
    g = next;
  }
  return g;
}

}  // namespace detail

// All KKT points of min_{gamma >= 0} L(gamma), global minimizer first
// (objective-sorted, ties toward gamma = 0).
inline std::vector<KktPoint> gamma_family_kkt_points(const ScalarProblem& prob) {
  const double p2 = prob.p2, q = prob.q;
  const HyperpriorSpec& prior = prob.prior;
  const double hp0 = h_prime_at_zero(prior);

  std::vector<double> positive;
  switch (prior.kind()) {
    case PriorKind::None: {
      const double g = sbl_minimizer(p2, q);
      if (g > 0.0) positive.push_back(g);
      break;
    }
    case PriorKind::HalfLaplace: {
      const double g = half_laplace_minimizer(p2, q, prior.beta());
      if (g > 0.0) positive.push_back(g);
      break;
    }
    case PriorKind::HalfGaussian: {
      const double g = half_gaussian_minimizer(p2, q, prior.theta());
      if (g > 0.0) positive.push_back(g);
      break;
    }
    case PriorKind::HalfGeneralizedGaussian: {
      if (p2 > q) {
        const double upper = (p2 - q) / (q * q);
        if (std::abs(prior.zeta() - 0.5) < 1e-12) {
          // quartic in s with gamma = s^2:
          // q^2 s^4 + sqrt(b) q^2 s^3 + 2 q s^2 + sqrt(b) (q - p2) s + 1 = 0
          const double sb = std::sqrt(prior.beta());
          const auto ss = poly::real_roots_quartic(q * q, sb * q * q, 2.0 * q,
                                                   sb * (q - p2), 1.0);
          for (double s : ss)
            if (s > 0.0) positive.push_back(s * s);
        } else {
          auto dL = [&](double g) { return scalar_derivative(prob, g); };
          positive = detail::bracketed_stationary_points(dL, upper * 1e-12, upper);
        }
      }
      break;
    }
    case PriorKind::Gamma:
      positive = detail::gamma_prior_stationary(p2, q, prior.alpha(), prior.beta());
      break;
    case PriorKind::InverseGamma:
      positive =
          detail::inverse_gamma_stationary(p2, q, prior.alpha(), prior.beta());
      break;
  }

  for (double& g : positive) g = detail::polish_stationary(prob, g);
  // drop spurious candidates: stationarity residual must be small
  {
    std::vector<double> kept;
    for (double g : positive) {
      const double u = 1.0 + q * g;
      const double scale =
          1.0 + std::abs(0.5 * (q * q * g + (q - p2)) / (u * u)) +
          std::abs(h_prime(prior, g));
      if (std::abs(scalar_derivative(prob, g)) <= 1e-7 * scale) kept.push_back(g);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end(),
                           [](double a, double b) {
                             return std::abs(a - b) <= 1e-9 * std::max(1.0, b);
                           }),
               kept.end());
    positive.swap(kept);
  }

  // Table-1 regimes with H'(0+) = -inf never admit gamma* = 0
  if (positive.empty() && hp0 == -std::numeric_limits<double>::infinity()) {
    std::ostringstream msg;
    msg << "gamma_family_kkt_points: no stationary point located for "
        << to_string(prior.kind()) << " (p2=" << p2 << ", q=" << q
        << "); searched positive axis, H'(0+) = -inf so gamma = 0 is infeasible";
    throw std::runtime_error(msg.str());
  }

  std::vector<KktPoint> points;
  for (double g : positive)
    points.push_back(
        {g, 0.0,
         scalar_second_derivative(prob, g) > 1e-12 ? KktClass::PositiveLocal
                                                    : KktClass::PositiveStationary});

  // gamma = 0 satisfies KKT iff q - p2 >= -2 H'(0+); multiplier H'(0+) + (q-p2)/2
  if (q - p2 >= -2.0 * hp0) {
    const double mu = (hp0 == std::numeric_limits<double>::infinity())
                          ? hp0
                          : hp0 + 0.5 * (q - p2);
    points.push_back({0.0, mu, KktClass::ZeroLocal});
  }

  std::stable_sort(points.begin(), points.end(),
                   [&](const KktPoint& a, const KktPoint& b) {
                     const double fa = scalar_objective(prob, a.gamma);
                     const double fb = scalar_objective(prob, b.gamma);
                     if (fa < fb - 1e-12 * (1.0 + std::abs(fb))) return true;
                     if (fb < fa - 1e-12 * (1.0 + std::abs(fa))) return false;
                     return a.gamma < b.gamma;  // tie toward sparsity
                   });
  if (!points.empty() && points.front().gamma == 0.0)
    points.front().classification = KktClass::ZeroGlobal;
  return points;
}

// Subset of KKT points for the half-generalized-Gaussian prior.
inline std::vector<KktPoint> half_gg_kkt_points(double p2, double q, double beta,
                                                double zeta) {
  return gamma_family_kkt_points(
      {p2, q, HyperpriorSpec::half_generalized_gaussian(zeta, beta)});
}

enum class LocalMinCert { CertifiedLocalMin, NotLocalMin, Inconclusive };

inline const char* to_string(LocalMinCert c) {
  switch (c) {
    case LocalMinCert::CertifiedLocalMin: return "certified-local-min";
    case LocalMinCert::NotLocalMin: return "not-local-min";
    case LocalMinCert::Inconclusive: return "inconclusive";
  }
  return "?";
}

// Second-order test: L''(gamma*) for positive points, L'(0+) sign at the origin.
inline LocalMinCert certify_local_min(const ScalarProblem& prob, const KktPoint& point) {
  if (point.gamma == 0.0) {
    const double d = 0.5 * (prob.q - prob.p2) + h_prime_at_zero(prob.prior);
    if (d >= 0.0) return LocalMinCert::CertifiedLocalMin;
    return LocalMinCert::NotLocalMin;
  }
  const double d2 = scalar_second_derivative(prob, point.gamma);
  if (d2 > 1e-12) return LocalMinCert::CertifiedLocalMin;
  if (d2 < -1e-12) return LocalMinCert::NotLocalMin;
  return LocalMinCert::Inconclusive;
}

// Independent global minimizer: {0} plus a log grid with golden-section
// refinement around the best cell. The grid upper end covers the region where
// L' can still be negative (beyond max(1, (p2-q)/q^2) only the decreasing-H
// priors need more room: (alpha-1) beta for Gamma alpha>1, beta/(alpha+1) for
// inverse Gamma).
inline double grid_oracle(const ScalarProblem& prob, int resolution) {
  if (resolution < 1000)
    throw std::invalid_argument("grid_oracle: resolution must be >= 1000");
  double tail = 0.0;
  if (prob.prior.kind() == PriorKind::Gamma && prob.prior.alpha() > 1.0)
    tail = (prob.prior.alpha() - 1.0) * prob.prior.beta();
  else if (prob.prior.kind() == PriorKind::InverseGamma)
    tail = prob.prior.beta() / (prob.prior.alpha() + 1.0);
  const double upper = (prob.p2 - prob.q) / (prob.q * prob.q);
  const double hi = 10.0 * std::max({1.0, upper, tail});
  const double lo = 1e-12;

  const double f0 = scalar_objective(prob, 0.0);
  if (f0 == -std::numeric_limits<double>::infinity()) return 0.0;

  double best_g = 0.0, best_f = f0;
  const double ratio = std::pow(hi / lo, 1.0 / (resolution - 1));
  std::vector<double> grid(resolution);
  double g = lo;
  int best_i = -1;
  for (int i = 0; i < resolution; ++i) {
    grid[i] = g;
    const double f = scalar_objective(prob, g);
    if (f < best_f) {
      best_f = f;
      best_g = g;
      best_i = i;
    }
    g *= ratio;
  }
  if (best_i < 0) return 0.0;

  double a = best_i > 0 ? grid[best_i - 1] : 0.0;
  double b = best_i + 1 < resolution ? grid[best_i + 1] : hi;
  const double phi = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
  double f1 = scalar_objective(prob, x1), f2 = scalar_objective(prob, x2);
  for (int it = 0; it < 200 && (b - a) > 1e-10 * std::max(1e-12, b); ++it) {
    if (f1 < f2) {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - phi * (b - a);
      f1 = scalar_objective(prob, x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + phi * (b - a);
      f2 = scalar_objective(prob, x2);
    }
  }
  const double refined = 0.5 * (a + b);
  if (scalar_objective(prob, refined) < best_f) best_g = refined;
  return scalar_objective(prob, best_g) <= f0 ? best_g : 0.0;
}

}  // namespace ebf
