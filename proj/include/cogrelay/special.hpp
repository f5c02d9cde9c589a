#pragma once

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace cogrelay {

namespace detail {

// E1(z) for 0 < z <= 1 by its convergent power series.
inline double e1_series(double z) {
  double sum = 0.0;
  double term = 1.0;  // (-z)^k / k!
  for (int k = 1; k < 200; ++k) {
    term *= -z / k;
    const double add = term / k;
    sum += add;
    if (std::abs(add) < std::numeric_limits<double>::epsilon() * std::abs(sum)) break;
  }
  return -std::numbers::egamma - std::log(z) - sum;
}

// e^z E1(z) for z > 1 by the modified Lentz continued fraction.
inline double e1_scaled_fraction(double z) {
  constexpr double tiny = 1e-300;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  double b = z + 1.0;
  double c = 1.0 / tiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 10000; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < eps) break;
  }
  return h;
}

}  // namespace detail

/// Exponential integral E1(z) = int_z^inf e^-t / t dt for z > 0.
inline double expint_e1(double z) {
  if (!(z > 0.0)) throw std::domain_error("E1 requires a positive argument");
  if (z <= 1.0) return detail::e1_series(z);
  return std::exp(-z) * detail::e1_scaled_fraction(z);
}

/// e^z E1(z) for z > 0, finite for arbitrarily large z.
inline double expint_e1_scaled(double z) {
  if (!(z > 0.0)) throw std::domain_error("E1 requires a positive argument");
  if (z <= 1.0) return std::exp(z) * detail::e1_series(z);
  return detail::e1_scaled_fraction(z);
}

/// Ei(x) = int_{-inf}^{x} e^t / t dt on the negative axis, where Ei(x) = -E1(-x).
inline double exp_integral(double x) {
  if (!(x < 0.0)) throw std::domain_error("exp_integral is defined here for x < 0 only");
  return -expint_e1(-x);
}

}  // namespace cogrelay
