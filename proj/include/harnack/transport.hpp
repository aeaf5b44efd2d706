#pragma once
// Quadratic optimal transport between densities on a line or circle grid.
#include "harnack/grid.hpp"
#include "harnack/semigroup.hpp"
#include <vector>

namespace harnack {

// How a density on the grid is read as a measure.
//  cell:   constant Lebesgue density on each cell [x_i, x_{i+1}] with the trapezoid
//          mass h (rho_i + rho_{i+1}) / 2; the quantile is piecewise linear.
//  atomic: point masses w_i f_i at the nodes; the quantile is a step function.
enum class TransportModel { cell, atomic };

// Piecewise linear quantile function: on [u[k], u[k+1]] it runs from lo[k] to hi[k].
// On a circle the quantile is extended by Q(u + 1) = Q(u) + period.
struct QuantileRep {
  Vector u;
  Vector lo;
  Vector hi;
  double period = 0.0;

  Index pieces() const { return lo.size(); }
  double at(double p) const;
};

QuantileRep quantile_rep(const DensityField& rho, TransportModel model = TransportModel::cell);
// Chebyshev-clustered probability grid of m points in (0, 1).
Vector chebyshev_probabilities(Index m);

// Exact W2 of two quantile representations. Line: L2 distance of the quantiles.
// Circle: minimum over the rotation parameter alpha of the shifted-quantile cost,
// which is convex in alpha.
double w2(const QuantileRep& a, const QuantileRep& b);
double w2(const DensityField& mu, const DensityField& nu, TransportModel model = TransportModel::cell);

// 1/2 W2(mu, nu)^2 - [ int Q_1 phi dnu - int phi dmu ], with the node-atom reading of
// mu and nu so that the weak-duality sign is exact on the grid.
double kantorovich_gap(const DensityField& mu, const DensityField& nu, const ScalarField& phi);

struct MonotoneMap {
  Grid source;
  Vector image;
};

// T = F_nu^{-1} o F_mu at the nodes (line only).
MonotoneMap brenier_map(const DensityField& mu, const DensityField& nu);

struct DisplacementPath {
  Vector s;
  std::vector<DensityField> h;
  std::vector<QuantileRep> quantiles;
};

// h_s is the law with quantile s F_mu^{-1} + (1 - s) F_nu^{-1}; h_1 = mu and h_0 = nu
// are returned unchanged.
DisplacementPath displacement(const DensityField& mu, const DensityField& nu, const std::vector<double>& s);

// t [Ent(f) - Ent(P_t f)] - W2(P_t f mu, f mu)^2 on a probability measure.
double kuwada_gap(const Semigroup& sg, const DensityField& f, double t);

// Density P_t f renormalized on the discrete measure.
DensityField evolve_density(const Semigroup& sg, double t, const DensityField& f);

}  // namespace harnack
