#pragma once
// Hopf-Lax inf-convolution Q_s f(x) = min_y f(y) + d(x,y)^2 / 2s over grid nodes.
#include "harnack/grid.hpp"
#include "harnack/semigroup.hpp"
#include <vector>

namespace harnack {

struct InfConvResult {
  ScalarField field;
  std::vector<Index> argmin;
  // Smallest value gap to a competing minimizer more than one node away from
  // argmin (infinity when the envelope has none). Small gaps flag shocks.
  Vector rival_gap;
};

// Lower envelope of parabolas, O(n) on the line and O(3n) on the circle.
// Ties go to the lowest node index.
InfConvResult inf_conv(const ScalarField& f, double s);
// O(n^2) scan with the same arithmetic and tie rule.
InfConvResult inf_conv_reference(const ScalarField& f, double s);

constexpr double shock_gap = 1e-9;

struct HJResidual {
  ScalarField residual;  // zero where not valid
  Mask valid;
};

// (Q_{s+ds} f - Q_{s-ds} f) / 2ds + |grad Q_s f|^2 / 2 on nodes whose minimizers
// are interior and unique at all three times and vary continuously across i-1, i, i+1.
HJResidual hj_residual(const ScalarField& f, double s, double ds);

// sup |Q_t Q_s f - Q_{t+s} f|
double semigroup_property_gap(const ScalarField& f, double t, double s);

struct ViscousConfig {
  double epsilon;
  Semigroup semigroup;
};

// -2 eps log P_{eps t}(e^{-f / 2 eps})
ScalarField viscous_infconv(const ViscousConfig& cfg, const ScalarField& f, double t);

}  // namespace harnack
