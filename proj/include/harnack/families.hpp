#pragma once
// Fixed, versioned test-function suites. Every member has a stable id; seeded
// members draw their coefficients from a portable generator so that a given
// (family, seed, grid) always yields the same values.
#include "harnack/grid.hpp"
#include <cstdint>
#include <string>
#include <vector>

namespace harnack {

inline constexpr const char* family_version = "v1";

struct FunctionMember {
  std::string id;
  ScalarField f;
};

struct SetMember {
  std::string id;
  IntervalSet set;
};

struct DensityMember {
  std::string id;
  DensityField f;
};

// Known function families:
//   positive  bounded away from zero
//   nonneg    f >= 0, some members vanish on intervals
//   unit      values in [0, 1]
//   bounded   sign-changing bounded functions, including clipped quadratics and affine
std::vector<FunctionMember> function_family(const std::string& name, const Grid& grid, std::uint64_t seed);
// Half-lines, intervals and unions on the line; arcs and unions on the circle.
std::vector<SetMember> set_family(const Grid& grid);
// Probability densities against mu: Gaussian ratios on a Gaussian line measure,
// Gaussian laws on a Lebesgue line, smooth perturbations of uniform on a circle.
std::vector<DensityMember> density_family(const Measure& mu, std::uint64_t seed);
// Bounded potentials for Kantorovich duality, `count` members.
std::vector<FunctionMember> potential_family(const Grid& grid, std::uint64_t seed, int count);

bool is_function_family(const std::string& name);

// splitmix64 stream; doubles in [0, 1) from the top 53 bits.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : state_(seed) {}
  std::uint64_t next();
  double uniform() { return double(next() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::uint64_t state_;
};

std::uint64_t fnv1a(const std::string& text, std::uint64_t h = 1469598103934665603ull);

}  // namespace harnack
