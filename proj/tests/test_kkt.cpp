#include "ebf/kkt.hpp"

#include <cmath>
#include <limits>

#include "catch2/catch_amalgamated.hpp"
#include "support/oracles.hpp"

using namespace ebf;
using Catch::Approx;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// |kkt global - oracle| with the absolute-below-1 / relative-above-1 rule
bool gamma_close(double got, double want, double tol = 1e-6) {
  if (want <= 1.0) return std::abs(got - want) <= tol;
  return std::abs(got - want) <= tol * want;
}

std::vector<HyperpriorSpec> sample_priors(oracle::Rng& rng) {
  return {
      HyperpriorSpec::none(),
      HyperpriorSpec::half_laplace(rng.log_uniform(0.01, 10.0)),
      HyperpriorSpec::half_gaussian(rng.log_uniform(0.01, 10.0)),
      HyperpriorSpec::half_generalized_gaussian(rng.uniform(0.05, 0.95),
                                                rng.log_uniform(0.01, 10.0)),
      HyperpriorSpec::gamma(rng.log_uniform(0.1, 10.0), rng.log_uniform(0.01, 10.0)),
      HyperpriorSpec::inverse_gamma(rng.log_uniform(0.1, 10.0),
                                    rng.log_uniform(0.01, 10.0)),
  };
}

}  // namespace

TEST_CASE("scalar objective examples", "[kkt]") {
  CHECK(scalar_objective({0.0, 1.0, HyperpriorSpec::none()}, 0.0) == 0.0);
  CHECK(scalar_objective({2.0, 1.0, HyperpriorSpec::none()}, 1.0) ==
        Approx(-0.5 + 0.5 * std::log(2.0)));
  CHECK(scalar_objective({10.0, 1.0, HyperpriorSpec::half_laplace(1.0)}, 1.0) ==
        Approx(-2.5 + 0.5 * std::log(2.0) + 1.0));
}

TEST_CASE("scalar derivative examples and finite differences", "[kkt]") {
  CHECK(scalar_derivative({5.0, 5.0, HyperpriorSpec::none()}, 0.0) == 0.0);
  CHECK(scalar_derivative({2.0, 1.0, HyperpriorSpec::none()}, 1.0) == Approx(0.0));
  CHECK_THROWS_AS(
      scalar_derivative({1.0, 1.0, HyperpriorSpec::gamma(0.5, 1.0)}, 0.0),
      std::invalid_argument);

  oracle::Rng rng(99);
  for (int trial = 0; trial < 400; ++trial) {
    auto priors = sample_priors(rng);
    const ScalarProblem prob{rng.log_uniform(0.1, 100.0), rng.log_uniform(0.1, 100.0),
                             priors[rng.integer(0, priors.size() - 1)]};
    const double g = rng.log_uniform(1e-2, 1e2);
    const double h = 1e-6 * std::max(1.0, g);
    const double fd = oracle::central_diff(
        [&](double t) { return scalar_objective(prob, t); }, g, h);
    const double d = scalar_derivative(prob, g);
    CHECK(std::abs(fd - d) <= 1e-6 * (1.0 + std::abs(d)));
    const double fd2 = oracle::central_diff(
        [&](double t) { return scalar_derivative(prob, t); }, g, h);
    const double d2 = scalar_second_derivative(prob, g);
    CHECK(std::abs(fd2 - d2) <= 1e-5 * (1.0 + std::abs(d2)));
  }
}

TEST_CASE("scalar second derivative examples", "[kkt]") {
  CHECK(scalar_second_derivative({2.0, 1.0, HyperpriorSpec::none()}, 1.0) ==
        Approx(0.125));
  CHECK(scalar_second_derivative({0.0, 1.0, HyperpriorSpec::none()}, 1.0) ==
        Approx(-0.125));
}

TEST_CASE("sbl closed form", "[kkt]") {
  CHECK(sbl_minimizer(1.0, 2.0) == 0.0);
  CHECK(sbl_minimizer(2.0, 1.0) == Approx(1.0));
  CHECK(sbl_minimizer(5.0, 5.0) == 0.0);
  // grid confirmation
  const ScalarProblem prob{2.0, 1.0, HyperpriorSpec::none()};
  CHECK(gamma_close(grid_oracle(prob, 2000), 1.0));
}

TEST_CASE("half-laplace closed form", "[kkt]") {
  CHECK(half_laplace_minimizer(2.0, 1.0, 1.0) == 0.0);
  CHECK(half_laplace_minimizer(10.0, 1.0, 1.0) == 1.0);  // (-5 + 9)/4, exact
  CHECK(half_laplace_minimizer(2.0, 1.0, 1e12) == Approx(1.0).margin(1e-6));
  const ScalarProblem prob{10.0, 1.0, HyperpriorSpec::half_laplace(1.0)};
  CHECK(gamma_close(grid_oracle(prob, 2000), 1.0));
  // residual of the quadratic 2 q^2 g^2 + (4q + b q^2) g + 2 + b(q - p2)
  const double g = half_laplace_minimizer(10.0, 1.0, 1.0);
  CHECK(std::abs(2.0 * g * g + 5.0 * g - 7.0) <= 1e-10 * 14.0);
}

TEST_CASE("half-laplace threshold boundary is continuous", "[kkt]") {
  const double q = 2.0, beta = 0.5;
  const double p2_star = q + 2.0 / beta;  // q - p2 = -2/beta
  CHECK(half_laplace_minimizer(p2_star, q, beta) == 0.0);
  CHECK(half_laplace_minimizer(p2_star - 1e-9, q, beta) == 0.0);
  const double just_above = half_laplace_minimizer(p2_star + 1e-9, q, beta);
  CHECK(just_above > 0.0);
  CHECK(just_above < 1e-6);
}

TEST_CASE("half-gaussian closed form", "[kkt]") {
  CHECK(half_gaussian_minimizer(1.0, 2.0, 1.0) == 0.0);
  // unique positive root of 4g^3 + 8g^2 + 6g - 18 = 0
  const double g = half_gaussian_minimizer(10.0, 1.0, 1.0);
  CHECK(g > 0.0);
  CHECK(std::abs(4.0 * g * g * g + 8.0 * g * g + 6.0 * g - 18.0) <= 1e-9 * 36.0);
  const ScalarProblem prob{10.0, 1.0, HyperpriorSpec::half_gaussian(1.0)};
  CHECK(gamma_close(grid_oracle(prob, 2000), g));
  // vanishing prior recovers the sbl point
  CHECK(half_gaussian_minimizer(10.0, 1.0, 1e6) == Approx(9.0).margin(1e-6));
}

TEST_CASE("half-gg kkt points", "[kkt]") {
  {
    const auto pts = half_gg_kkt_points(1.0, 2.0, 1.0, 0.5);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].gamma == 0.0);
    CHECK(pts[0].classification == KktClass::ZeroGlobal);
  }
  {
    const auto pts = half_gg_kkt_points(100.0, 1.0, 1.0, 0.5);
    REQUIRE(pts.size() >= 2);
    bool has_zero = false;
    int positives = 0;
    for (const auto& p : pts) {
      if (p.gamma == 0.0) has_zero = true;
      if (p.gamma > 0.0) {
        ++positives;
        CHECK(p.gamma < 99.0);
      }
    }
    CHECK(has_zero);
    CHECK(positives >= 1);
    // grid confirms the front entry is the global minimizer
    const ScalarProblem prob{100.0, 1.0,
                             HyperpriorSpec::half_generalized_gaussian(0.5, 1.0)};
    CHECK(gamma_close(pts.front().gamma, grid_oracle(prob, 4000)));
  }
  {
    const auto pts = half_gg_kkt_points(5.0, 5.0, 0.7, 0.5);
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].gamma == 0.0);
  }
}

TEST_CASE("gamma-family dispatch", "[kkt]") {
  {
    // Table-1 regime zeta*alpha > 1: every KKT point positive
    const auto pts =
        gamma_family_kkt_points({1.0, 2.0, HyperpriorSpec::gamma(1.5, 0.1)});
    REQUIRE(!pts.empty());
    for (const auto& p : pts) CHECK(p.gamma > 0.0);
  }
  {
    // alpha < 1: zero is the global minimizer, positive stationary points listed too
    const auto pts =
        gamma_family_kkt_points({1.0, 2.0, HyperpriorSpec::gamma(0.5, 0.1)});
    REQUIRE(!pts.empty());
    CHECK(pts.front().gamma == 0.0);
    CHECK(pts.front().classification == KktClass::ZeroGlobal);
  }
  {
    const auto pts = gamma_family_kkt_points({2.0, 1.0, HyperpriorSpec::none()});
    REQUIRE(pts.size() == 1);
    CHECK(pts[0].gamma == Approx(1.0));
    CHECK(pts[0].multiplier == 0.0);
  }
  {
    // inverse gamma: positive points only
    const auto pts =
        gamma_family_kkt_points({1.0, 2.0, HyperpriorSpec::inverse_gamma(1.0, 0.5)});
    REQUIRE(!pts.empty());
    for (const auto& p : pts) CHECK(p.gamma > 0.0);
  }
}

TEST_CASE("certify_local_min", "[kkt]") {
  const ScalarProblem sbl{2.0, 1.0, HyperpriorSpec::none()};
  CHECK(certify_local_min(sbl, {1.0, 0.0, KktClass::PositiveLocal}) ==
        LocalMinCert::CertifiedLocalMin);
  const ScalarProblem hl{10.0, 1.0, HyperpriorSpec::half_laplace(1.0)};
  CHECK(certify_local_min(hl, {1.0, 0.0, KktClass::PositiveLocal}) ==
        LocalMinCert::CertifiedLocalMin);
  const ScalarProblem zero{1.0, 2.0, HyperpriorSpec::none()};
  CHECK(certify_local_min(zero, {0.0, 0.5, KktClass::ZeroGlobal}) ==
        LocalMinCert::CertifiedLocalMin);
  // descent direction at the origin: p2 > q with no prior
  CHECK(certify_local_min(sbl, {0.0, 0.0, KktClass::ZeroLocal}) ==
        LocalMinCert::NotLocalMin);
}

TEST_CASE("grid oracle basics", "[kkt]") {
  CHECK_THROWS_AS(grid_oracle({1.0, 1.0, HyperpriorSpec::none()}, 100),
                  std::invalid_argument);
  CHECK(gamma_close(grid_oracle({2.0, 1.0, HyperpriorSpec::none()}, 2000), 1.0));
  CHECK(gamma_close(
      grid_oracle({10.0, 1.0, HyperpriorSpec::half_laplace(1.0)}, 2000), 1.0));
  // increasing prior with p2 < q: zero
  CHECK(grid_oracle({0.5, 1.0, HyperpriorSpec::half_laplace(0.3)}, 2000) == 0.0);
}

TEST_CASE("global minimizer matches the grid oracle across kinds", "[kkt]") {
  oracle::Rng rng(2024);
  int checked = 0;
  for (int trial = 0; trial < 150; ++trial) {
    auto priors = sample_priors(rng);
    for (const auto& prior : priors) {
      const ScalarProblem prob{rng.uniform(0.0, 100.0), rng.log_uniform(0.01, 100.0),
                               prior};
      const auto pts = gamma_family_kkt_points(prob);
      REQUIRE(!pts.empty());
      const double got = pts.front().gamma;
      const double want = grid_oracle(prob, 2000);
      INFO("prior=" << to_string(prior.kind()) << " p2=" << prob.p2
                    << " q=" << prob.q << " got=" << got << " want=" << want);
      CHECK(gamma_close(got, want));
      ++checked;
    }
  }
  CHECK(checked >= 900);
}

TEST_CASE("kkt residuals, complementary slackness, interval", "[kkt]") {
  oracle::Rng rng(31337);
  for (int trial = 0; trial < 200; ++trial) {
    auto priors = sample_priors(rng);
    for (const auto& prior : priors) {
      const ScalarProblem prob{rng.uniform(0.0, 100.0), rng.log_uniform(0.01, 100.0),
                               prior};
      const double upper = (prob.p2 - prob.q) / (prob.q * prob.q);
      const bool increasing = prior.kind() == PriorKind::None ||
                              prior.kind() == PriorKind::HalfLaplace ||
                              prior.kind() == PriorKind::HalfGaussian ||
                              prior.kind() == PriorKind::HalfGeneralizedGaussian ||
                              (prior.kind() == PriorKind::Gamma && prior.alpha() < 1.0);
      for (const auto& pt : gamma_family_kkt_points(prob)) {
        // complementary slackness holds exactly
        CHECK((pt.gamma == 0.0 || pt.multiplier == 0.0));
        CHECK(pt.gamma >= 0.0);
        if (pt.gamma > 0.0) {
          const double u = 1.0 + prob.q * pt.gamma;
          const double scale =
              1.0 +
              std::abs(0.5 * (prob.q * prob.q * pt.gamma + (prob.q - prob.p2)) /
                       (u * u)) +
              std::abs(h_prime(prior, pt.gamma));
          CHECK(std::abs(scalar_derivative(prob, pt.gamma)) <= 1e-8 * scale);
          if (increasing && prior.kind() != PriorKind::None) {
            // Corollary 3.2: positive points lie strictly inside (0, (p2-q)/q^2)
            CHECK(prob.p2 > prob.q);
            CHECK(pt.gamma < upper);
          }
        } else if (pt.multiplier != kInf) {
          CHECK(pt.multiplier >= 0.0);
          CHECK(pt.multiplier ==
                Approx(h_prime_at_zero(prior) + 0.5 * (prob.q - prob.p2)));
        }
      }
    }
  }
}

TEST_CASE("strictly increasing priors shrink the positive minimizer", "[kkt]") {
  oracle::Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const double q = rng.log_uniform(0.1, 10.0);
    const double p2 = q + rng.log_uniform(1.0, 50.0);
    const double sbl = (p2 - q) / (q * q);
    const std::vector<HyperpriorSpec> priors = {
        HyperpriorSpec::half_laplace(rng.log_uniform(0.05, 5.0)),
        HyperpriorSpec::half_gaussian(rng.log_uniform(0.05, 5.0)),
    };
    for (const auto& prior : priors) {
      const auto pts = gamma_family_kkt_points({p2, q, prior});
      for (const auto& pt : pts)
        if (pt.gamma > 0.0) CHECK(pt.gamma < sbl);
    }
  }
}

TEST_CASE("half-laplace zero/positive transition at q - p2 = -2/beta", "[kkt]") {
  const double q = 1.3, beta = 0.7;
  const double p2_star = q + 2.0 / beta;
  // below the threshold the grid oracle lands at zero, above it strictly positive
  CHECK(grid_oracle({p2_star - 1e-3, q, HyperpriorSpec::half_laplace(beta)}, 4000) ==
        0.0);
  CHECK(grid_oracle({p2_star + 1e-2, q, HyperpriorSpec::half_laplace(beta)}, 4000) >
        0.0);
}

TEST_CASE("p2 = 0 short circuits to zero for increasing priors", "[kkt]") {
  const auto pts =
      gamma_family_kkt_points({0.0, 3.0, HyperpriorSpec::half_laplace(0.2)});
  REQUIRE(pts.size() == 1);
  CHECK(pts[0].gamma == 0.0);
  CHECK(pts[0].classification == KktClass::ZeroGlobal);
}
