#pragma once

// Exact integrals of piecewise-linear functions against the standard normal density,
// kept in log form so kernel weights far in the tails stay representable.

namespace harnack::detail {

// Q(z)/phi(z) for z >= 0.
double mills_ratio(double z);
// log Q(z) for any real z.
double log_sf(double z);
// log of the integral over [z0, z1] of L(z) phi(z), L linear with L(z0)=l0, L(z1)=l1, l0,l1 >= 0.
double log_linear_piece(double z0, double z1, double l0, double l1);
// P(z0 <= Z <= z1), accurate for intervals deep in either tail; endpoints may be infinite.
double interval_mass(double z0, double z1);
// log P(z0 <= Z <= z1).
double log_interval_mass(double z0, double z1);
double log_add(double a, double b);

}  // namespace harnack::detail
