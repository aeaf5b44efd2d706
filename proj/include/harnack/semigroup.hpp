#pragma once

// Heat, Ornstein-Uhlenbeck and weighted circle diffusion semigroups.

#include "harnack/grid.hpp"
#include "harnack/scalar.hpp"

#include <string>

namespace harnack {

enum class SemigroupKind { euclidean, ornstein_uhlenbeck, generic_diffusion };

class Semigroup {
 public:
  // Generator Delta on a line grid: K = 0, N = 1, Lebesgue measure.
  static Semigroup euclidean(const Grid& grid);
  // Generator f'' - x f' on a line grid: K = 1, standard Gaussian measure.
  static Semigroup ornstein_uhlenbeck(const Grid& grid);
  // Generator f'' - V' f' on a circle grid. K defaults to the certified bound
  // min of the second differences of V; a larger K is rejected.
  static Semigroup diffusion(const Grid& grid, const Vector& potential);
  static Semigroup diffusion(const Grid& grid, const Vector& potential, double K);

  SemigroupKind kind() const { return kind_; }
  const Grid& grid() const { return grid_; }
  const CurvatureParams& curvature() const { return curv_; }
  const Measure& measure() const { return measure_; }
  const Vector& potential() const { return potential_; }
  // Discrete lower bound of V'' on the grid (generic diffusion only).
  double certified_curvature() const { return certified_; }

 private:
  Semigroup(SemigroupKind k, Grid g, CurvatureParams c, Measure m)
      : kind_(k), grid_(g), curv_(c), measure_(std::move(m)) {}
  SemigroupKind kind_;
  Grid grid_;
  CurvatureParams curv_;
  Measure measure_;
  Vector potential_;
  double certified_ = 0.0;
};

std::string to_string(SemigroupKind k);

ScalarField apply(const Semigroup& sg, double t, const ScalarField& f);
// P_t f at a single node through the kernel row.
double apply_at(const Semigroup& sg, double t, const ScalarField& f, Index y);
// Quadrature weights of the kernel P_t(y, .) against the nodes, tail masses included.
Vector kernel_row(const Semigroup& sg, double t, Index y);
// log P_t(e^a). Euclidean: exact for a piecewise linear with constant tails,
// all in log form. Other kinds apply the semigroup to e^{a - max a}.
Vector log_apply(const Semigroup& sg, double t, const Vector& a);

struct Jet {
  Vector value;
  Vector d1;
  Vector d2;
};

// P_t f together with its first two spatial derivatives; the derivatives are exact
// for the piecewise-linear interpolant under the Euclidean and OU kernels.
Jet apply_jet(const Semigroup& sg, double t, const ScalarField& f);

// P_t(|f'|^p). Euclidean and OU: exact for the piecewise-linear interpolant, whose
// derivative is constant on cells. The circle uses nodal central differences.
Vector apply_gradient_power(const Semigroup& sg, double t, const ScalarField& f, double p);

struct SetProbability {
  Vector mass;        // P_t 1_A at each node
  Vector complement;  // P_t 1_{A^c}, computed separately for tail precision
  Vector gradient;    // d/dx P_t 1_A
};

// Exact for the Euclidean and OU kernels; the circle diffusion applies its scheme
// to the cell-averaged indicator.
SetProbability apply_set(const Semigroup& sg, double t, const IntervalSet& A);
// Cell-averaged indicator: node value = (1/h) * integral of 1_A against the hat function.
ScalarField project_set(const Grid& grid, const IntervalSet& A);

DistributionFunction kernel_cdf(const Semigroup& sg, double t, const ScalarField& f, Index y);

ScalarField generator(const Semigroup& sg, const ScalarField& f);

ScalarField gradient_bound_margin(const Semigroup& sg, double t, const ScalarField& f);
ScalarField gamma2_margin(const Semigroup& sg, const ScalarField& f);
ScalarField li_yau_margin(const Semigroup& sg, double t, const ScalarField& f);

// Mass of the Euclidean or OU kernel at node y lying outside the grid.
double outside_mass(const Semigroup& sg, double t, Index y);

}  // namespace harnack
