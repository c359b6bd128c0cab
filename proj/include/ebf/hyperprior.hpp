#pragma once

// Generalized-Gamma hyperprior family: per-coordinate pi(gamma) ∝ exp(-H(gamma))
// with H(gamma) = -(zeta*alpha - 1) log(gamma) + (gamma/beta)^zeta.

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace ebf {

enum class PriorKind {
  None,
  Gamma,
  InverseGamma,
  HalfGaussian,
  HalfLaplace,
  HalfGeneralizedGaussian,
};

enum class Curvature { Convex, Concave, Neither };

inline const char* to_string(PriorKind k) {
  switch (k) {
    case PriorKind::None: return "none";
    case PriorKind::Gamma: return "gamma";
    case PriorKind::InverseGamma: return "inv-gamma";
    case PriorKind::HalfGaussian: return "half-gaussian";
    case PriorKind::HalfLaplace: return "half-laplace";
    case PriorKind::HalfGeneralizedGaussian: return "half-gg";
  }
  return "?";
}

// Immutable after construction; all evaluations are pure.
class HyperpriorSpec {
 public:
  HyperpriorSpec() : kind_(PriorKind::None), alpha_(1.0), beta_(1.0), zeta_(1.0) {}

  static HyperpriorSpec none() { return HyperpriorSpec(); }

  // Gamma(alpha, beta); alpha = 1 reduces to the half-Laplace case.
  static HyperpriorSpec gamma(double alpha, double beta) {
    require(alpha > 0.0, "gamma prior: alpha must be > 0");
    require(beta > 0.0, "gamma prior: beta must be > 0");
    if (alpha == 1.0) return half_laplace(beta);
    return HyperpriorSpec(PriorKind::Gamma, alpha, beta, 1.0);
  }

  static HyperpriorSpec inverse_gamma(double alpha, double beta) {
    require(alpha > 0.0, "inverse-gamma prior: alpha must be > 0");
    require(beta > 0.0, "inverse-gamma prior: beta must be > 0");
    return HyperpriorSpec(PriorKind::InverseGamma, alpha, beta, -1.0);
  }

  // Half-Gaussian N+(0, theta^2): zeta = 2, alpha = 1/2, beta = sqrt(2)*theta,
  // so H(gamma) = gamma^2 / (2 theta^2).
  static HyperpriorSpec half_gaussian(double theta) {
    require(theta > 0.0, "half-gaussian prior: theta must be > 0");
    return HyperpriorSpec(PriorKind::HalfGaussian, 0.5, std::sqrt(2.0) * theta, 2.0);
  }

  static HyperpriorSpec half_laplace(double beta) {
    require(beta > 0.0, "half-laplace prior: beta must be > 0");
    return HyperpriorSpec(PriorKind::HalfLaplace, 1.0, beta, 1.0);
  }

  // zeta in (0,1); zeta*alpha = 1 so H(gamma) = (gamma/beta)^zeta.
  static HyperpriorSpec half_generalized_gaussian(double zeta, double beta) {
    require(zeta > 0.0 && zeta < 1.0, "half-gg prior: zeta must lie in (0,1)");
    require(beta > 0.0, "half-gg prior: beta must be > 0");
    return HyperpriorSpec(PriorKind::HalfGeneralizedGaussian, 1.0 / zeta, beta, zeta);
  }

  // General (alpha, beta, zeta) entry point; normalizes to the named member.
  static HyperpriorSpec generalized(double alpha, double beta, double zeta) {
    require(zeta != 0.0, "generalized-gamma prior: zeta must be nonzero");
    require(alpha > 0.0, "generalized-gamma prior: alpha must be > 0");
    require(beta > 0.0, "generalized-gamma prior: beta must be > 0");
    if (zeta == 1.0) return gamma(alpha, beta);
    if (zeta == -1.0) return inverse_gamma(alpha, beta);
    if (zeta == 2.0 && alpha == 0.5) return half_gaussian(beta / std::sqrt(2.0));
    if (zeta > 0.0 && zeta < 1.0 && zeta * alpha == 1.0)
      return half_generalized_gaussian(zeta, beta);
    throw std::invalid_argument(
        "generalized-gamma prior: unsupported (alpha, beta, zeta) combination; "
        "supported members: zeta=1 (gamma/half-laplace), zeta=-1 (inverse gamma), "
        "zeta=2 & alpha=1/2 (half-gaussian), 0<zeta<1 & zeta*alpha=1 (half-gg)");
  }

  PriorKind kind() const { return kind_; }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  double zeta() const { return zeta_; }

  // Half-Gaussian scale parameter; beta = sqrt(2)*theta.
  double theta() const {
    if (kind_ != PriorKind::HalfGaussian)
      throw std::logic_error("theta() is defined for the half-gaussian prior only");
    return beta_ / std::sqrt(2.0);
  }

  bool operator==(const HyperpriorSpec& o) const {
    return kind_ == o.kind_ && alpha_ == o.alpha_ && beta_ == o.beta_ && zeta_ == o.zeta_;
  }

 private:
  HyperpriorSpec(PriorKind k, double a, double b, double z)
      : kind_(k), alpha_(a), beta_(b), zeta_(z) {}

  static void require(bool ok, const char* msg) {
    if (!ok) throw std::invalid_argument(msg);
  }

  PriorKind kind_;
  double alpha_;
  double beta_;
  double zeta_;
};

// H(gamma) for gamma >= 0; extended-real at the boundary:
//   zeta*alpha > 1  -> +inf, zeta*alpha = 1 -> 0, zeta*alpha < 1 & zeta > 0 -> -inf,
//   zeta < 0 -> +inf (the (gamma/beta)^zeta term dominates).
inline double h_value(const HyperpriorSpec& spec, double gamma) {
  if (gamma < 0.0) throw std::invalid_argument("h_value: gamma must be >= 0");
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind()) {
    case PriorKind::None:
      return 0.0;
    case PriorKind::HalfLaplace:
      return gamma / spec.beta();
    case PriorKind::HalfGaussian: {
      const double t = spec.theta();
      return gamma * gamma / (2.0 * t * t);
    }
    case PriorKind::HalfGeneralizedGaussian:
      return std::pow(gamma / spec.beta(), spec.zeta());
    case PriorKind::Gamma: {
      if (gamma == 0.0) return spec.alpha() > 1.0 ? inf : -inf;
      return -(spec.alpha() - 1.0) * std::log(gamma) + gamma / spec.beta();
    }
    case PriorKind::InverseGamma: {
      if (gamma == 0.0) return inf;
      return (spec.alpha() + 1.0) * std::log(gamma) + spec.beta() / gamma;
    }
  }
  return 0.0;
}

// lim_{gamma -> 0+} H'(gamma), per the Table-1 regimes.
inline double h_prime_at_zero(const HyperpriorSpec& spec) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  switch (spec.kind()) {
    case PriorKind::None: return 0.0;
    case PriorKind::HalfLaplace: return 1.0 / spec.beta();
    case PriorKind::HalfGaussian: return 0.0;
    case PriorKind::HalfGeneralizedGaussian: return inf;
    case PriorKind::Gamma: return spec.alpha() < 1.0 ? inf : -inf;
    case PriorKind::InverseGamma: return -inf;
  }
  return 0.0;
}

// H'(gamma) = (1 - zeta*alpha)/gamma + (zeta/beta^zeta) gamma^{zeta-1}, gamma > 0.
inline double h_prime(const HyperpriorSpec& spec, double gamma) {
  if (!(gamma > 0.0))
    throw std::invalid_argument("h_prime: gamma must be > 0 (use h_prime_at_zero)");
  switch (spec.kind()) {
    case PriorKind::None:
      return 0.0;
    case PriorKind::HalfLaplace:
      return 1.0 / spec.beta();
    case PriorKind::HalfGaussian: {
      const double t = spec.theta();
      return gamma / (t * t);
    }
    case PriorKind::HalfGeneralizedGaussian: {
      const double z = spec.zeta();
      return z * std::pow(gamma, z - 1.0) / std::pow(spec.beta(), z);
    }
    case PriorKind::Gamma:
      return (1.0 - spec.alpha()) / gamma + 1.0 / spec.beta();
    case PriorKind::InverseGamma:
      return (spec.alpha() + 1.0) / gamma - spec.beta() / (gamma * gamma);
  }
  return 0.0;
}

// H''(gamma) = (zeta*alpha - 1)/gamma^2 + zeta(zeta-1)/beta^zeta gamma^{zeta-2}.
inline double h_second(const HyperpriorSpec& spec, double gamma) {
  if (!(gamma > 0.0)) throw std::invalid_argument("h_second: gamma must be > 0");
  switch (spec.kind()) {
    case PriorKind::None:
    case PriorKind::HalfLaplace:
      return 0.0;
    case PriorKind::HalfGaussian: {
      const double t = spec.theta();
      return 1.0 / (t * t);
    }
    case PriorKind::HalfGeneralizedGaussian: {
      const double z = spec.zeta();
      return z * (z - 1.0) * std::pow(gamma, z - 2.0) / std::pow(spec.beta(), z);
    }
    case PriorKind::Gamma:
      return (spec.alpha() - 1.0) / (gamma * gamma);
    case PriorKind::InverseGamma:
      return -(spec.alpha() + 1.0) / (gamma * gamma) +
             2.0 * spec.beta() / (gamma * gamma * gamma);
  }
  return 0.0;
}

// Curvature of H on gamma > 0. Gamma: H'' = (alpha-1)/gamma^2, so alpha > 1 is
// convex and alpha < 1 concave. Inverse gamma changes sign at 2 beta/(alpha+1).
inline Curvature curvature_class(const HyperpriorSpec& spec) {
  switch (spec.kind()) {
    case PriorKind::None:
    case PriorKind::HalfLaplace:
    case PriorKind::HalfGaussian:
      return Curvature::Convex;
    case PriorKind::Gamma:
      return spec.alpha() > 1.0 ? Curvature::Convex : Curvature::Concave;
    case PriorKind::HalfGeneralizedGaussian:
      return Curvature::Concave;
    case PriorKind::InverseGamma:
      return Curvature::Neither;
  }
  return Curvature::Neither;
}

}  // namespace ebf
