#pragma once

// Uniform 1D grids, sampled fields, measures, masks and interval sets.

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

namespace harnack {

using Index = Eigen::Index;
using Vector = Eigen::VectorXd;
using Mask = Eigen::Array<bool, Eigen::Dynamic, 1>;

enum class Topology { line, circle };

class Grid {
 public:
  static Grid line(double a, double b, Index n);
  static Grid circle(double length, Index n);

  Topology topology() const { return topology_; }
  bool is_line() const { return topology_ == Topology::line; }
  bool is_circle() const { return topology_ == Topology::circle; }
  Index size() const { return n_; }
  double spacing() const { return h_; }
  double lower() const { return a_; }
  // b for a line, a + L for a circle.
  double upper() const { return is_line() ? a_ + h_ * double(n_ - 1) : a_ + h_ * double(n_); }
  double length() const { return upper() - a_; }

  double coord(Index i) const { return a_ + h_ * double(i); }
  Vector coords() const;

  double distance(Index i, Index j) const;
  double distance(double x, double y) const;
  // Index distance on the circle, min(k, n - k); |i - j| on the line.
  Index index_distance(Index i, Index j) const;

  Index nearest(double x) const;
  // Line: 2n - 1 nodes; circle: 2n nodes. Old nodes are kept.
  Grid refined() const;

  bool operator==(const Grid& o) const {
    return topology_ == o.topology_ && n_ == o.n_ && a_ == o.a_ && h_ == o.h_;
  }
  bool operator!=(const Grid& o) const { return !(*this == o); }

 private:
  Grid(Topology topo, double a, double h, Index n) : topology_(topo), n_(n), a_(a), h_(h) {}
  Topology topology_;
  Index n_;
  double a_;
  double h_;
};

enum class Tail { constant, zero };

struct ScalarField {
  Grid grid;
  Vector values;
  Tail tail = Tail::constant;

  ScalarField(Grid g, Vector v, Tail t = Tail::constant);
  Index size() const { return grid.size(); }
  double operator[](Index i) const { return values[i]; }
};

ScalarField sample(const Grid& grid, const std::function<double(double)>& fn, Tail tail = Tail::constant);

enum class MeasureKind { lebesgue, weighted };

class Measure {
 public:
  static Measure lebesgue(const Grid& grid);
  // e^{-V} dx; when normalize is set the weights are rescaled to sum to one.
  static Measure weighted(const Grid& grid, const Vector& potential, bool normalize);
  // Standard Gaussian on a line grid, normalized.
  static Measure gaussian(const Grid& grid);

  const Grid& grid() const { return grid_; }
  MeasureKind kind() const { return kind_; }
  const Vector& potential() const { return potential_; }
  const Vector& weights() const { return weights_; }
  bool probability() const { return probability_; }
  // Trapezoid (line) or rectangle (circle) weights for dx.
  const Vector& base_weights() const { return base_; }
  // Lebesgue density of the measure at each node, w_i / base_i.
  Vector lebesgue_density() const { return weights_.cwiseQuotient(base_); }

  double integrate(const Vector& f) const { return weights_.dot(f); }

 private:
  Measure(Grid g) : grid_(g) {}
  Grid grid_;
  MeasureKind kind_ = MeasureKind::lebesgue;
  Vector potential_;
  Vector weights_;
  Vector base_;
  bool probability_ = false;
};

Vector quadrature_weights(const Grid& grid);

struct DensityField {
  ScalarField field;
  Measure measure;
  bool normalized = false;

  // Rescales f so that sum f_i w_i = 1.
  static DensityField normalize(const ScalarField& f, const Measure& mu);
  static DensityField from_lebesgue(const Grid& grid, const std::function<double(double)>& rho, const Measure& mu);
  double mass() const { return measure.integrate(field.values); }
  const Grid& grid() const { return field.grid; }
};

struct RegionMask {
  Grid grid;
  Mask member;

  RegionMask(Grid g, Mask m);
  static RegionMask from_predicate(const Grid& grid, const std::function<bool(double)>& pred);
  Index count() const { return member.count(); }
};

// Finite union of closed intervals on the line (endpoints may be infinite), or of
// closed arcs on a circle. Arcs are stored with start in [lower, upper) and
// possibly extending past upper.
class IntervalSet {
 public:
  struct Interval {
    double lo;
    double hi;
  };

  static IntervalSet line(std::vector<Interval> parts);
  static IntervalSet circle(double origin, double length, std::vector<Interval> parts);
  // Runs of member nodes become closed intervals; line runs touching an end extend to infinity.
  static IntervalSet from_mask(const RegionMask& mask);

  bool on_circle() const { return circle_; }
  double circle_origin() const { return origin_; }
  double circle_length() const { return length_; }
  const std::vector<Interval>& parts() const { return parts_; }
  bool empty() const { return parts_.empty(); }
  bool full() const;

  IntervalSet dilate(double eps) const;
  IntervalSet complement() const;
  bool contains(double x) const;
  RegionMask to_mask(const Grid& grid) const;
  // Lebesgue length of the set intersected with [a, b] (line) or of the arcs.
  double overlap(double a, double b) const;

 private:
  IntervalSet() = default;
  void normalize();
  bool circle_ = false;
  double origin_ = 0.0;
  double length_ = 0.0;
  std::vector<Interval> parts_;
};

RegionMask neighborhood(const RegionMask& mask, double eps);

// Right-continuous CDF of a finite law: atoms at support[j] with F(support[j]) = cdf[j].
// tail[j] = 1 - cdf[j], accumulated from the right so that it keeps relative precision.
struct DistributionFunction {
  Vector support;
  Vector cdf;
  Vector tail;

  DistributionFunction(Vector r, Vector F, Vector G);
  double at(double r) const;
  double mean() const;
  Index atoms() const { return support.size(); }
};

// Builds the law of the values f_i under weights p_i (merging tied values).
DistributionFunction distribution_from_weights(const Vector& values, const Vector& weights);

ScalarField grad(const ScalarField& f);
ScalarField abs_grad(const ScalarField& f);
// Second central difference; line endpoints copy their neighbour.
ScalarField second_difference(const ScalarField& f);

double entropy(const DensityField& f);

struct FisherInfo {
  double value;
  Index floor_hits;
};

constexpr double fisher_floor = 1e-30;
FisherInfo fisher_info(const DensityField& f);

void write_columns(std::ostream& os, const ScalarField& f);
void write_columns(std::ostream& os, const RegionMask& m);
ScalarField read_columns(std::istream& is, const Grid& grid, Tail tail = Tail::constant);

}  // namespace harnack
