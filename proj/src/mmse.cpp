#include "biobench/mmse.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace biobench::enhance {

double expint_e1(double x) {
  if (!(x > 0.0)) {
    throw std::invalid_argument("expint_e1 requires x > 0");
  }
  // E1(x) = -Ei(-x) for x > 0; underflows to 0 for large x, which is the
  // correct limit here.
  const double v = -std::expint(-x);
  return v > 0.0 ? v : 0.0;
}

namespace {

constexpr double kAsymptoticSwitch = 20.0;

// e^-x I_nu(x) via the large-argument expansion
// (2 pi x)^-1/2 * sum_k (-1)^k a_k(nu) / (8x)^k.
double bessel_scaled_asymptotic(int nu, double x) {
  const double mu = 4.0 * nu * nu;
  const double ex = 8.0 * x;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k <= 4; ++k) {
    const double factor = mu - (2.0 * k - 1.0) * (2.0 * k - 1.0);
    term *= -factor / (k * ex);
    sum += term;
  }
  return sum / std::sqrt(2.0 * std::numbers::pi * x);
}

}  // namespace

double bessel_i0_scaled(double x) {
  if (x < 0.0) x = -x;
  if (x <= kAsymptoticSwitch) {
    return std::exp(-x) * std::cyl_bessel_i(0.0, x);
  }
  return bessel_scaled_asymptotic(0, x);
}

double bessel_i1_scaled(double x) {
  const double ax = std::abs(x);
  const double sign = x < 0.0 ? -1.0 : 1.0;
  if (ax <= kAsymptoticSwitch) {
    return sign * std::exp(-ax) * std::cyl_bessel_i(1.0, ax);
  }
  return sign * bessel_scaled_asymptotic(1, ax);
}

double stsa_gain(double xi, double gamma) {
  if (!(xi > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("stsa_gain requires xi > 0 and gamma > 0");
  }
  const double v = xi * gamma / (1.0 + xi);
  if (v < 1e-300) {
    return 0.0;
  }
  const double half = 0.5 * v;
  const double bracket =
      (1.0 + v) * bessel_i0_scaled(half) + v * bessel_i1_scaled(half);
  return 0.5 * std::sqrt(std::numbers::pi) * std::sqrt(v) / gamma * bracket;
}

double lsa_gain(double xi, double gamma) {
  if (!(xi > 0.0) || !(gamma > 0.0)) {
    throw std::invalid_argument("lsa_gain requires xi > 0 and gamma > 0");
  }
  const double v = xi * gamma / (1.0 + xi);
  if (v < 1e-300) {
    return std::numeric_limits<double>::infinity();  // callers clamp to 1
  }
  return xi / (1.0 + xi) * std::exp(0.5 * expint_e1(v));
}

}  // namespace biobench::enhance
