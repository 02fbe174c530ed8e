#pragma once

// Test-only reference computations. Nothing here calls into the library's
// mechanics; each helper re-derives its quantity by brute force.

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

namespace oracle {

struct Law {
  double E, En, eps_l;

  double sigma(double eps) const {
    const double a = std::abs(eps);
    const double s = a <= eps_l ? E * a : E * eps_l + En * (a - eps_l);
    return eps < 0 ? -s : s;
  }
};

inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
  const double h = (b - a) / static_cast<double>(n);
  double s = 0.5 * (f(a) + f(b));
  for (long i = 1; i < n; ++i) s += f(a + h * static_cast<double>(i));
  return s * h;
}

/// Midpoint fiber sum of a w x t rectangle, symmetric about y = 0.
inline double fiber_moment(const Law& law, double t, double w, double kappa, long fibers) {
  const double h = t / static_cast<double>(fibers);
  double m = 0.0;
  for (long i = 0; i < fibers; ++i) {
    const double y = -0.5 * t + (static_cast<double>(i) + 0.5) * h;
    m += law.sigma(kappa * y) * y * w * h;
  }
  return m;
}

/// Exact integral of sigma(kappa*y)*y over a symmetric rectangle. The
/// integrand is a polynomial of degree <= 2 on each side of the kink, so
/// Simpson's rule on each piece is exact.
inline double exact_rect_moment(const Law& law, double t, double w, double kappa) {
  const double c = 0.5 * t;
  auto f = [&](double y) { return law.sigma(kappa * y) * y; };
  auto simpson = [&](double a, double b) { return (b - a) / 6.0 * (f(a) + 4.0 * f(0.5 * (a + b)) + f(b)); };
  const double k = std::abs(kappa);
  const double yl = k > 0 ? std::min(c, law.eps_l / k) : c;
  return 2.0 * w * (simpson(0.0, yl) + (yl < c ? simpson(yl, c) : 0.0));
}

/// Exact energy per unit length of a symmetric rectangle (integrand of
/// degree <= 2 on each piece, Simpson again exact).
inline double exact_rect_energy(const Law& law, double t, double w, double kappa) {
  const double c = 0.5 * t;
  auto u = [&](double y) {
    const double a = std::abs(kappa * y);
    if (a <= law.eps_l) return 0.5 * law.E * a * a;
    const double o = a - law.eps_l;
    return 0.5 * law.E * law.eps_l * law.eps_l + law.E * law.eps_l * o + 0.5 * law.En * o * o;
  };
  auto simpson = [&](double a, double b) { return (b - a) / 6.0 * (u(a) + 4.0 * u(0.5 * (a + b)) + u(b)); };
  const double k = std::abs(kappa);
  const double yl = k > 0 ? std::min(c, law.eps_l / k) : c;
  return 2.0 * w * (simpson(0.0, yl) + (yl < c ? simpson(yl, c) : 0.0));
}

struct HingeResult {
  double torque, energy, eps_peak;
};

/// Dense-station pure-bending solve using exact section integrals. Stations
/// at midpoints; inner and outer bisection to machine precision.
inline HingeResult dense_hinge(const Law& law, const std::function<double(double)>& thickness,
                               double L, double w, double theta, long stations) {
  const double ds = L / static_cast<double>(stations);
  std::vector<double> t(static_cast<std::size_t>(stations));
  for (long i = 0; i < stations; ++i) t[static_cast<std::size_t>(i)] = thickness((static_cast<double>(i) + 0.5) * ds);

  auto kappa_for = [&](double tt, double M) {
    double lo = 0.0, hi = 1.0;
    while (exact_rect_moment(law, tt, w, hi) < M) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
      const double mid = 0.5 * (lo + hi);
      (exact_rect_moment(law, tt, w, mid) < M ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
  };
  auto angle = [&](double M, double* energy, double* peak) {
    double th = 0.0, en = 0.0, pk = 0.0;
    for (double tt : t) {
      const double k = kappa_for(tt, M);
      th += k * ds;
      en += exact_rect_energy(law, tt, w, k) * ds;
      pk = std::max(pk, 0.5 * k * tt);
    }
    if (energy) *energy = en;
    if (peak) *peak = pk;
    return th;
  };
  double lo = 0.0, hi = 1e-9;
  while (angle(hi, nullptr, nullptr) < theta) hi *= 2.0;
  for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (angle(mid, nullptr, nullptr) < theta ? lo : hi) = mid;
  }
  HingeResult r{0.5 * (lo + hi), 0.0, 0.0};
  angle(r.torque, &r.energy, &r.eps_peak);
  return r;
}

}  // namespace oracle
