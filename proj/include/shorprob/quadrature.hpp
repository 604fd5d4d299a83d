#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "shorprob/kahan.hpp"

namespace shorprob {

/// Absolute accuracy every definite integral in this library is held to.
inline constexpr double kQuadratureTolerance = 1e-12;

/// Adaptive 31-point Gauss-Kronrod on [a, b]. Throws if the error estimate
/// stays above kQuadratureTolerance after the maximum refinement depth.
template <class F>
double integrate(F&& f, double a, double b) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  if (a == b) return 0.0;
  // Boost's tolerance is relative to the L1 norm, and its error estimate has
  // a floor near 1e-15 * L1 per panel. Ask for an absolute 1e-13 so small
  // integrals are not refined into a pile of floors.
  double error = 0.0, l1 = 0.0;
  double value = Rule::integrate(f, a, b, /*max_depth=*/0, /*tolerance=*/0.0, &error, &l1);
  if (error > 0.1 * kQuadratureTolerance) {
    const double relative = std::max(0.1 * kQuadratureTolerance / l1, 1e-15);
    value = Rule::integrate(f, a, b, /*max_depth=*/20, relative, &error);
  }
  if (!(error <= kQuadratureTolerance)) {
    throw std::runtime_error("quadrature did not reach the requested accuracy");
  }
  return value;
}

/// sin^2(pi x) / (x + h)^2, with the value pi^2 at the removable
/// singularity x = -h.
inline double shifted_sinc_sq(double x, double h) {
  const double u = x + h;
  if (std::abs(u) < 1e-8) return std::numbers::pi * std::numbers::pi;
  const double s = std::sin(std::numbers::pi * x);
  return (s * s) / (u * u);
}

/// Integral of sin^2(pi x) / (x + h)^2 over [a, b].
inline double shifted_sinc_sq_integral(double h, double a, double b) {
  return integrate([h](double x) { return shifted_sinc_sq(x, h); }, a, b);
}

/// Si(x) = integral of sin(t)/t over [0, x], accumulated one half-period
/// [k pi, (k+1) pi] at a time.
inline double sine_integral(double x) {
  if (x < 0.0) throw std::domain_error("sine_integral expects x >= 0");
  auto sinc = [](double t) { return std::abs(t) < 1e-8 ? 1.0 - t * t / 6.0 : std::sin(t) / t; };
  KahanSum<double> acc;
  double lo = 0.0;
  for (double k = 1.0; lo < x; k += 1.0) {
    const double hi = std::min(x, k * std::numbers::pi);
    acc += integrate(sinc, lo, hi);
    lo = hi;
  }
  return acc.value();
}

}  // namespace shorprob
