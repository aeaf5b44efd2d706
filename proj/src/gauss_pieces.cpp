#include "harnack/detail/gauss_pieces.hpp"

#include "harnack/scalar.hpp"

#include <array>
#include <cmath>
#include <limits>

namespace harnack::detail {

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
constexpr double sqrt_2pi = 2.50662827463100050241576528481104525;

// 8-point Gauss-Legendre on [0,1].
constexpr std::array<double, 8> gl_x = {0.019855071751231884, 0.10166676129318664, 0.2372337950418355,
                                        0.40828267875217511, 0.59171732124782489, 0.7627662049581645,
                                        0.89833323870681336, 0.98014492824876812};
constexpr std::array<double, 8> gl_w = {0.050614268145188130, 0.11119051722668724, 0.15685332293894364,
                                        0.18134189168918100, 0.18134189168918100, 0.15685332293894364,
                                        0.11119051722668724, 0.050614268145188130};

// Integrals over [z0, z0+D] of (1 - u/D) phi and (u/D) phi, divided by phi(z0); z0 >= 0.
void piece_coefficients(double z0, double D, double& c0, double& c1) {
  if (D * (z0 + D) < 0.5) {
    c0 = c1 = 0.0;
    for (std::size_t k = 0; k < gl_x.size(); ++k) {
      const double u = D * gl_x[k];
      const double g = std::exp(-z0 * u - 0.5 * u * u) * gl_w[k] * D;
      c1 += gl_x[k] * g;
      c0 += (1.0 - gl_x[k]) * g;
    }
    return;
  }
  const double z1 = z0 + D;
  const double r = std::exp(-0.5 * D * (z0 + z1));
  const double S = mills_ratio(z0) - r * mills_ratio(z1);
  c1 = (1.0 - r - z0 * S) / D;
  c0 = S - c1;
  if (c1 < 0) c1 = 0;
  if (c0 < 0) c0 = 0;
}

}  // namespace

double mills_ratio(double z) {
  if (z < 26.0) return 0.5 * std::erfc(z * 0.70710678118654752440) * sqrt_2pi * std::exp(0.5 * z * z);
  // continued fraction 1/(z+1/(z+2/(z+...)))
  double f = z;
  for (int k = 60; k >= 1; --k) f = z + double(k) / f;
  return 1.0 / f;
}

double log_sf(double z) {
  if (z >= 0) return log_normal_pdf(z) + std::log(mills_ratio(z));
  if (z == -std::numeric_limits<double>::infinity()) return 0.0;
  return std::log1p(-normal_sf(-z));
}

double log_add(double a, double b) {
  if (a == neg_inf) return b;
  if (b == neg_inf) return a;
  const double m = a > b ? a : b;
  return m + std::log1p(std::exp(-std::abs(a - b)));
}

double log_linear_piece(double z0, double z1, double l0, double l1) {
  if (!(z1 > z0)) return neg_inf;
  if (z0 >= 0) {
    double c0, c1;
    piece_coefficients(z0, z1 - z0, c0, c1);
    const double v = l0 * c0 + l1 * c1;
    return v > 0 ? log_normal_pdf(z0) + std::log(v) : neg_inf;
  }
  if (z1 <= 0) return log_linear_piece(-z1, -z0, l1, l0);
  const double lm = l0 + (l1 - l0) * (-z0) / (z1 - z0);
  return log_add(log_linear_piece(0.0, -z0, lm, l0), log_linear_piece(0.0, z1, lm, l1));
}

double interval_mass(double z0, double z1) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(z1 > z0)) return 0.0;
  if (z0 >= 0) return z1 == inf ? normal_sf(z0) : std::exp(log_linear_piece(z0, z1, 1.0, 1.0));
  if (z1 <= 0) return z0 == -inf ? normal_cdf(z1) : std::exp(log_linear_piece(-z1, -z0, 1.0, 1.0));
  return 1.0 - normal_sf(-z0) - normal_sf(z1);
}

double log_interval_mass(double z0, double z1) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  if (!(z1 > z0)) return -inf;
  if (z0 >= 0) return z1 == inf ? log_sf(z0) : log_linear_piece(z0, z1, 1.0, 1.0);
  if (z1 <= 0) return z0 == -inf ? log_sf(-z1) : log_linear_piece(-z1, -z0, 1.0, 1.0);
  return std::log(interval_mass(z0, z1));
}

}  // namespace harnack::detail
