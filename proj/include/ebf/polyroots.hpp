#pragma once

// Real-root extraction for quadratics, cubics and quartics. Closed forms
// (stable quadratic, Cardano/trigonometric, Ferrari) followed by a short
// Newton polish; roots come back ascending with duplicates collapsed.

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace ebf::poly {

namespace detail {

// |p(r)| tolerance scale: sum |c_i| * max(1,|r|)^degree.
inline double residual_scale(const std::vector<double>& coeffs_high_first, double r) {
  double s = 0.0;
  for (double c : coeffs_high_first) s += std::abs(c);
  const double m = std::max(1.0, std::abs(r));
  double p = 1.0;
  for (std::size_t i = 1; i < coeffs_high_first.size(); ++i) p *= m;
  return s * p;
}

inline double eval(const std::vector<double>& coeffs_high_first, double x) {
  double v = 0.0;
  for (double c : coeffs_high_first) v = v * x + c;
  return v;
}

inline double eval_deriv(const std::vector<double>& coeffs_high_first, double x) {
  const std::size_t n = coeffs_high_first.size();
  double v = 0.0;
  for (std::size_t i = 0; i + 1 < n; ++i)
    v = v * x + coeffs_high_first[i] * static_cast<double>(n - 1 - i);
  return v;
}

// Up to `steps` Newton iterations, accepted only while the residual shrinks.
inline double polish(const std::vector<double>& c, double r, int steps = 3) {
  double best = r;
  double best_res = std::abs(eval(c, r));
  for (int it = 0; it < steps; ++it) {
    const double d = eval_deriv(c, r);
    if (d == 0.0 || !std::isfinite(d)) break;
    const double next = r - eval(c, r) / d;
    if (!std::isfinite(next)) break;
    const double res = std::abs(eval(c, next));
    if (res >= best_res) break;
    r = next;
    best = next;
    best_res = res;
  }
  return best;
}

inline void sort_dedupe(std::vector<double>& roots) {
  std::sort(roots.begin(), roots.end());
  std::vector<double> out;
  for (double r : roots) {
    if (out.empty() || std::abs(r - out.back()) > 1e-6 * std::max(1.0, std::abs(r)))
      out.push_back(r);
  }
  roots.swap(out);
}

inline double coeff_norm(std::initializer_list<double> cs) {
  double m = 0.0;
  for (double c : cs) m = std::max(m, std::abs(c));
  return m;
}

}  // namespace detail

// a x^2 + b x + c, a != 0. Cancellation-free via the q = -(b + sign(b) sqrt(D))/2 form.
inline std::vector<double> real_roots_quadratic(double a, double b, double c) {
  if (a == 0.0)
    throw std::invalid_argument("real_roots_quadratic: a == 0; use a linear solve");
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return {};
  const double sq = std::sqrt(disc);
  const double qq = -0.5 * (b + std::copysign(sq, b));
  std::vector<double> roots;
  if (qq == 0.0) {
    // b = 0 and disc = 0 (so c = 0): double root at the origin.
    roots = {0.0};
  } else {
    roots = {qq / a, c / qq};
  }
  for (double& r : roots) r = detail::polish({a, b, c}, r);
  detail::sort_dedupe(roots);
  return roots;
}

// a x^3 + b x^2 + c x + d. Near-zero leading coefficient deflates to the quadratic.
inline std::vector<double> real_roots_cubic(double a, double b, double c, double d) {
  const double norm = detail::coeff_norm({a, b, c, d});
  if (std::abs(a) <= 1e-14 * norm) {
    if (std::abs(b) <= 1e-14 * norm) {
      if (std::abs(c) <= 1e-14 * norm) return {};
      return {-d / c};
    }
    return real_roots_quadratic(b, c, d);
  }
  const double B = b / a, C = c / a, D = d / a;
  const double Q = (B * B - 3.0 * C) / 9.0;
  const double R = (B * (2.0 * B * B - 9.0 * C) + 27.0 * D) / 54.0;
  const double R2 = R * R, Q3 = Q * Q * Q;
  std::vector<double> roots;
  if (R2 < Q3) {
    const double t = std::acos(std::clamp(R / std::sqrt(Q3), -1.0, 1.0));
    const double m = -2.0 * std::sqrt(Q);
    const double shift = B / 3.0;
    roots = {m * std::cos(t / 3.0) - shift,
             m * std::cos((t + 2.0 * M_PI) / 3.0) - shift,
             m * std::cos((t - 2.0 * M_PI) / 3.0) - shift};
  } else {
    const double A = -std::cbrt(R + std::copysign(std::sqrt(std::max(0.0, R2 - Q3)), R));
    const double Bq = (A == 0.0) ? 0.0 : Q / A;
    roots = {A + Bq - B / 3.0};
    if (A == Bq && A != 0.0) roots.push_back(-A - B / 3.0);  // boundary double root
  }
  const std::vector<double> cs = {a, b, c, d};
  for (double& r : roots) r = detail::polish(cs, r);
  detail::sort_dedupe(roots);
  return roots;
}

// a x^4 + b x^3 + c x^2 + d x + e (Ferrari / resolvent cubic).
inline std::vector<double> real_roots_quartic(double a, double b, double c, double d,
                                              double e) {
  if (std::abs(a) <= 1e-14 * detail::coeff_norm({a, b, c, d, e}))
    return real_roots_cubic(b, c, d, e);
  const double B = b / a, C = c / a, D = d / a, E = e / a;
  // depressed: y^4 + p y^2 + q y + r with x = y - B/4
  const double shift = B / 4.0;
  const double B2 = B * B;
  const double p = C - 3.0 * B2 / 8.0;
  const double q = D - B * C / 2.0 + B2 * B / 8.0;
  const double r = E - B * D / 4.0 + B2 * C / 16.0 - 3.0 * B2 * B2 / 256.0;

  std::vector<double> ys;
  const double qscale = std::max({1.0, std::abs(p), std::abs(r)});
  if (std::abs(q) <= 1e-14 * qscale) {
    // biquadratic: z^2 + p z + r = 0, y = +-sqrt(z)
    std::vector<double> zs;
    try {
      zs = real_roots_quadratic(1.0, p, r);
    } catch (const std::invalid_argument&) {
      zs = {};
    }
    for (double z : zs) {
      if (z < 0.0) continue;
      const double s = std::sqrt(std::max(0.0, z));
      ys.push_back(s);
      ys.push_back(-s);
    }
  } else {
    // resolvent: 8 t^3 + 8 p t^2 + (2 p^2 - 8 r) t - q^2 = 0 has a root t > 0
    const auto ts = real_roots_cubic(8.0, 8.0 * p, 2.0 * p * p - 8.0 * r, -q * q);
    double t = -1.0;
    for (double cand : ts) t = std::max(t, cand);
    if (t > 0.0) {
      const double s2t = std::sqrt(2.0 * t);
      const double base = p / 2.0 + t;
      const double lin = q / (2.0 * s2t);  // from 2t (y - q/(4t))^2
      // factors y^2 - s2t y + (base + lin) and y^2 + s2t y + (base - lin)
      for (int sign = -1; sign <= 1; sign += 2) {
        const double bb = sign * s2t;
        const double cc = base - sign * lin;
        double disc = bb * bb - 4.0 * cc;
        if (disc < 0.0 && disc > -1e-10 * (bb * bb + std::abs(cc)))
          disc = 0.0;  // grazing double root; residual filter rejects impostors
        if (disc < 0.0) continue;
        const double sq = std::sqrt(disc);
        ys.push_back((-bb + sq) / 2.0);
        ys.push_back((-bb - sq) / 2.0);
      }
    }
  }

  std::vector<double> roots;
  roots.reserve(ys.size());
  const std::vector<double> cs = {a, b, c, d, e};
  for (double y : ys) {
    double x = y - shift;
    x = detail::polish(cs, x, 6);
    // bisection pass: tighten inside a local sign-change bracket when available
    const double h = 1e-7 * std::max(1.0, std::abs(x));
    double lo = x - h, hi = x + h;
    if (detail::eval(cs, lo) * detail::eval(cs, hi) < 0.0) {
      for (int it = 0; it < 40; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (detail::eval(cs, lo) * detail::eval(cs, mid) <= 0.0)
          hi = mid;
        else
          lo = mid;
      }
      x = 0.5 * (lo + hi);
    }
    if (std::abs(detail::eval(cs, x)) <= 1e-8 * detail::residual_scale(cs, x))
      roots.push_back(x);
  }
  detail::sort_dedupe(roots);
  return roots;
}

// Coefficients lowest degree first, length 3..5; near-zero leading terms deflate.
struct Polynomial {
  std::vector<double> coeffs;
};

inline std::vector<double> real_roots(const Polynomial& poly) {
  std::vector<double> c(poly.coeffs.rbegin(), poly.coeffs.rend());  // high first
  if (c.size() < 3 || c.size() > 5)
    throw std::invalid_argument("Polynomial: expected degree 2..4 (3..5 coefficients)");
  double norm = 0.0;
  for (double v : c) norm = std::max(norm, std::abs(v));
  if (norm == 0.0) throw std::invalid_argument("Polynomial: all coefficients zero");
  while (c.size() > 3 && std::abs(c.front()) <= 1e-14 * norm) c.erase(c.begin());
  switch (c.size()) {
    case 3: return real_roots_quadratic(c[0], c[1], c[2]);
    case 4: return real_roots_cubic(c[0], c[1], c[2], c[3]);
    default: return real_roots_quartic(c[0], c[1], c[2], c[3], c[4]);
  }
}

}  // namespace ebf::poly
