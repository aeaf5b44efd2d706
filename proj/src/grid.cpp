#include "harnack/grid.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace harnack {

namespace {
constexpr double inf = std::numeric_limits<double>::infinity();
}

Grid Grid::line(double a, double b, Index n) {
  if (n < 16) throw std::invalid_argument("Grid::line: need at least 16 nodes");
  if (!(b > a) || !std::isfinite(a) || !std::isfinite(b)) throw std::invalid_argument("Grid::line: need a < b");
  return Grid(Topology::line, a, (b - a) / double(n - 1), n);
}

Grid Grid::circle(double length, Index n) {
  if (n < 16) throw std::invalid_argument("Grid::circle: need at least 16 nodes");
  if (!(length > 0) || !std::isfinite(length)) throw std::invalid_argument("Grid::circle: need L > 0");
  return Grid(Topology::circle, 0.0, length / double(n), n);
}

Vector Grid::coords() const {
  Vector x(n_);
  for (Index i = 0; i < n_; ++i) x[i] = coord(i);
  return x;
}

Index Grid::index_distance(Index i, Index j) const {
  Index k = i > j ? i - j : j - i;
  if (is_circle()) k = std::min(k, n_ - k);
  return k;
}

double Grid::distance(Index i, Index j) const { return double(index_distance(i, j)) * h_; }

double Grid::distance(double x, double y) const {
  double d = std::abs(x - y);
  if (is_circle()) {
    const double L = length();
    d = std::fmod(d, L);
    d = std::min(d, L - d);
  }
  return d;
}

Index Grid::nearest(double x) const {
  double u = (x - a_) / h_;
  if (is_circle()) {
    u = std::fmod(u, double(n_));
    if (u < 0) u += double(n_);
    Index i = Index(std::llround(u));
    return i == n_ ? 0 : i;
  }
  Index i = Index(std::llround(u));
  return std::clamp<Index>(i, 0, n_ - 1);
}

Grid Grid::refined() const {
  if (is_line()) return Grid(Topology::line, a_, h_ / 2, 2 * n_ - 1);
  return Grid(Topology::circle, a_, h_ / 2, 2 * n_);
}

ScalarField::ScalarField(Grid g, Vector v, Tail t) : grid(g), values(std::move(v)), tail(t) {
  if (values.size() != grid.size()) throw std::invalid_argument("ScalarField: size mismatch");
  if (!values.allFinite()) throw std::invalid_argument("ScalarField: non-finite values");
}

ScalarField sample(const Grid& grid, const std::function<double(double)>& fn, Tail tail) {
  Vector v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = fn(grid.coord(i));
  return ScalarField(grid, std::move(v), tail);
}

Vector quadrature_weights(const Grid& grid) {
  Vector w = Vector::Constant(grid.size(), grid.spacing());
  if (grid.is_line()) {
    w[0] *= 0.5;
    w[grid.size() - 1] *= 0.5;
  }
  return w;
}

Measure Measure::lebesgue(const Grid& grid) {
  Measure m(grid);
  m.kind_ = MeasureKind::lebesgue;
  m.base_ = quadrature_weights(grid);
  m.weights_ = m.base_;
  m.probability_ = false;
  return m;
}

Measure Measure::weighted(const Grid& grid, const Vector& potential, bool normalize) {
  if (potential.size() != grid.size() || !potential.allFinite())
    throw std::invalid_argument("Measure::weighted: bad potential");
  Measure m(grid);
  m.kind_ = MeasureKind::weighted;
  m.potential_ = potential;
  m.base_ = quadrature_weights(grid);
  const double vmin = potential.minCoeff();
  m.weights_ = m.base_.cwiseProduct((-(potential.array() - vmin)).exp().matrix());
  if (normalize) {
    m.weights_ /= m.weights_.sum();
    m.probability_ = true;
  } else {
    m.weights_ *= std::exp(-vmin);
  }
  if ((m.weights_.array() <= 0).any()) throw std::domain_error("Measure::weighted: non-positive weight");
  return m;
}

Measure Measure::gaussian(const Grid& grid) {
  if (!grid.is_line()) throw std::invalid_argument("Measure::gaussian: line grid required");
  Vector v = grid.coords().array().square() * 0.5;
  return weighted(grid, v, true);
}

DensityField DensityField::normalize(const ScalarField& f, const Measure& mu) {
  if (f.grid != mu.grid()) throw std::invalid_argument("DensityField: grid mismatch");
  if ((f.values.array() < 0).any()) throw std::domain_error("DensityField: negative density");
  const double m = mu.integrate(f.values);
  if (!(m > 0)) throw std::domain_error("DensityField: zero mass");
  return DensityField{ScalarField(f.grid, f.values / m, f.tail), mu, true};
}

DensityField DensityField::from_lebesgue(const Grid& grid, const std::function<double(double)>& rho,
                                         const Measure& mu) {
  const Vector dens = mu.lebesgue_density();
  Vector v(grid.size());
  for (Index i = 0; i < grid.size(); ++i) v[i] = rho(grid.coord(i)) / dens[i];
  return normalize(ScalarField(grid, v), mu);
}

RegionMask::RegionMask(Grid g, Mask m) : grid(g), member(std::move(m)) {
  if (member.size() != grid.size()) throw std::invalid_argument("RegionMask: size mismatch");
}

RegionMask RegionMask::from_predicate(const Grid& grid, const std::function<bool(double)>& pred) {
  Mask m(grid.size());
  for (Index i = 0; i < grid.size(); ++i) m[i] = pred(grid.coord(i));
  return RegionMask(grid, m);
}

IntervalSet IntervalSet::line(std::vector<Interval> parts) {
  IntervalSet s;
  s.parts_ = std::move(parts);
  s.normalize();
  return s;
}

IntervalSet IntervalSet::circle(double origin, double length, std::vector<Interval> parts) {
  if (!(length > 0)) throw std::invalid_argument("IntervalSet::circle: need L > 0");
  IntervalSet s;
  s.circle_ = true;
  s.origin_ = origin;
  s.length_ = length;
  s.parts_ = std::move(parts);
  s.normalize();
  return s;
}

void IntervalSet::normalize() {
  for (const auto& p : parts_)
    if (!(p.lo <= p.hi) || std::isnan(p.lo) || std::isnan(p.hi))
      throw std::invalid_argument("IntervalSet: interval with lo > hi");
  if (circle_) {
    for (auto& p : parts_) {
      if (p.hi - p.lo >= length_) {
        parts_ = {{origin_, origin_ + length_}};
        return;
      }
      const double w = p.hi - p.lo;
      double lo = std::fmod(p.lo - origin_, length_);
      if (lo < 0) lo += length_;
      p.lo = origin_ + lo;
      p.hi = p.lo + w;
    }
  }
  std::sort(parts_.begin(), parts_.end(), [](const Interval& a, const Interval& b) { return a.lo < b.lo; });
  std::vector<Interval> merged;
  for (const auto& p : parts_) {
    if (!merged.empty() && p.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, p.hi);
    else
      merged.push_back(p);
  }
  if (circle_ && merged.size() > 1) {
    // last arc may wrap onto the first ones
    while (merged.size() > 1 && merged.back().hi - length_ >= merged.front().lo) {
      merged.back().hi = std::max(merged.back().hi, merged.front().hi + length_);
      merged.erase(merged.begin());
    }
  }
  if (circle_) {
    for (const auto& p : merged)
      if (p.hi - p.lo >= length_) {
        merged = {{origin_, origin_ + length_}};
        break;
      }
  }
  parts_ = std::move(merged);
}

bool IntervalSet::full() const {
  if (parts_.size() != 1) return false;
  if (circle_) return parts_[0].hi - parts_[0].lo >= length_;
  return parts_[0].lo == -inf && parts_[0].hi == inf;
}

IntervalSet IntervalSet::from_mask(const RegionMask& mask) {
  const Grid& g = mask.grid;
  const Index n = g.size();
  std::vector<Interval> parts;
  if (g.is_line()) {
    Index i = 0;
    while (i < n) {
      if (!mask.member[i]) {
        ++i;
        continue;
      }
      Index j = i;
      while (j + 1 < n && mask.member[j + 1]) ++j;
      parts.push_back({i == 0 ? -inf : g.coord(i), j == n - 1 ? inf : g.coord(j)});
      i = j + 1;
    }
    return line(std::move(parts));
  }
  if (mask.member.all()) return circle(g.lower(), g.length(), {{g.lower(), g.upper()}});
  for (Index i = 0; i < n; ++i) {
    if (!mask.member[i] || mask.member[(i + n - 1) % n]) continue;
    Index len = 0;
    while (mask.member[(i + len + 1) % n] && len + 1 < n) ++len;
    parts.push_back({g.coord(i), g.coord(i) + double(len) * g.spacing()});
  }
  return circle(g.lower(), g.length(), std::move(parts));
}

IntervalSet IntervalSet::dilate(double eps) const {
  if (!(eps >= 0)) throw std::invalid_argument("IntervalSet::dilate: negative eps");
  IntervalSet s = *this;
  for (auto& p : s.parts_) {
    p.lo -= eps;
    p.hi += eps;
  }
  s.normalize();
  return s;
}

IntervalSet IntervalSet::complement() const {
  IntervalSet s = *this;
  s.parts_.clear();
  if (!circle_) {
    double prev = -inf;
    for (const auto& p : parts_) {
      if (p.lo > prev) s.parts_.push_back({prev, p.lo});
      prev = p.hi;
    }
    if (prev < inf) s.parts_.push_back({prev, inf});
    s.normalize();
    return s;
  }
  if (parts_.empty()) {
    s.parts_ = {{origin_, origin_ + length_}};
    return s;
  }
  if (full()) return s;
  for (std::size_t k = 0; k < parts_.size(); ++k) {
    const double start = parts_[k].hi;
    const double end = k + 1 < parts_.size() ? parts_[k + 1].lo : parts_[0].lo + length_;
    if (end > start) s.parts_.push_back({start, end});
  }
  s.normalize();
  return s;
}

bool IntervalSet::contains(double x) const {
  if (!circle_) {
    for (const auto& p : parts_)
      if (x >= p.lo && x <= p.hi) return true;
    return false;
  }
  double u = std::fmod(x - origin_, length_);
  if (u < 0) u += length_;
  u += origin_;
  for (const auto& p : parts_)
    if ((u >= p.lo && u <= p.hi) || (u + length_ >= p.lo && u + length_ <= p.hi)) return true;
  return false;
}

RegionMask IntervalSet::to_mask(const Grid& grid) const {
  const double slack = 1e-9 * grid.spacing();
  Mask m(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const double x = grid.coord(i);
    m[i] = contains(x) || contains(x + slack) || contains(x - slack);
  }
  return RegionMask(grid, m);
}

double IntervalSet::overlap(double a, double b) const {
  double total = 0.0;
  if (!circle_) {
    for (const auto& p : parts_) total += std::max(0.0, std::min(p.hi, b) - std::max(p.lo, a));
    return total;
  }
  for (const auto& p : parts_)
    for (int k = -2; k <= 2; ++k) {
      const double lo = p.lo + k * length_, hi = p.hi + k * length_;
      total += std::max(0.0, std::min(hi, b) - std::max(lo, a));
    }
  return total;
}

RegionMask neighborhood(const RegionMask& mask, double eps) {
  if (!(eps >= 0)) throw std::invalid_argument("neighborhood: negative eps");
  const Grid& g = mask.grid;
  const Index n = g.size();
  if (eps == 0 || mask.count() == 0) return mask;
  const Index big = std::numeric_limits<Index>::max() / 4;
  std::vector<Index> dist(n, big);
  if (g.is_line()) {
    Index last = -1;
    for (Index i = 0; i < n; ++i) {
      if (mask.member[i]) last = i;
      if (last >= 0) dist[i] = i - last;
    }
    last = -1;
    for (Index i = n - 1; i >= 0; --i) {
      if (mask.member[i]) last = i;
      if (last >= 0) dist[i] = std::min(dist[i], last - i);
    }
  } else {
    Index last = -1;
    for (Index k = 0; k < 2 * n; ++k) {
      const Index i = k % n;
      if (mask.member[i]) last = k;
      if (last >= 0) dist[i] = std::min(dist[i], k - last);
    }
    last = -1;
    for (Index k = 2 * n - 1; k >= 0; --k) {
      const Index i = k % n;
      if (mask.member[i]) last = k;
      if (last >= 0) dist[i] = std::min(dist[i], last - k);
    }
  }
  const double reach = eps * (1 + 1e-12) + 1e-12;
  Mask m(n);
  for (Index i = 0; i < n; ++i) m[i] = double(dist[i]) * g.spacing() <= reach;
  return RegionMask(g, m);
}

DistributionFunction::DistributionFunction(Vector r, Vector F, Vector G)
    : support(std::move(r)), cdf(std::move(F)), tail(std::move(G)) {
  if (support.size() == 0 || cdf.size() != support.size() || tail.size() != support.size())
    throw std::invalid_argument("DistributionFunction: inconsistent sizes");
  for (Index j = 1; j < support.size(); ++j)
    if (!(support[j] > support[j - 1]) || cdf[j] < cdf[j - 1])
      throw std::invalid_argument("DistributionFunction: not monotone");
  if (std::abs(cdf[cdf.size() - 1] - 1.0) > 1e-10)
    throw std::invalid_argument("DistributionFunction: final mass differs from 1");
}

double DistributionFunction::at(double r) const {
  const auto* begin = support.data();
  const auto* end = begin + support.size();
  const auto it = std::upper_bound(begin, end, r);
  if (it == begin) return 0.0;
  return cdf[Index(it - begin) - 1];
}

double DistributionFunction::mean() const {
  double m = 0.0, prev = 0.0;
  for (Index j = 0; j < support.size(); ++j) {
    m += support[j] * (cdf[j] - prev);
    prev = cdf[j];
  }
  return m;
}

DistributionFunction distribution_from_weights(const Vector& values, const Vector& weights) {
  if (values.size() != weights.size() || values.size() == 0)
    throw std::invalid_argument("distribution_from_weights: size mismatch");
  std::vector<Index> order(values.size());
  std::iota(order.begin(), order.end(), Index(0));
  std::stable_sort(order.begin(), order.end(), [&](Index a, Index b) { return values[a] < values[b]; });
  std::vector<double> r, mass;
  for (Index k : order) {
    if (!r.empty() && values[k] == r.back())
      mass.back() += weights[k];
    else {
      r.push_back(values[k]);
      mass.push_back(weights[k]);
    }
  }
  const Index m = Index(r.size());
  double total = 0.0;
  for (double w : mass) total += w;
  if (!(total > 0)) throw std::domain_error("distribution_from_weights: zero mass");
  Vector R(m), F(m), G(m);
  double acc = 0.0;
  for (Index j = 0; j < m; ++j) {
    R[j] = r[j];
    acc += mass[j] / total;
    F[j] = std::min(acc, 1.0);
  }
  acc = 0.0;
  for (Index j = m - 1; j >= 0; --j) {
    G[j] = acc;
    acc += mass[j] / total;
  }
  F[m - 1] = 1.0;
  return DistributionFunction(R, F, G);
}

ScalarField grad(const ScalarField& f) {
  const Grid& g = f.grid;
  const Index n = g.size();
  const double h = g.spacing();
  const Vector& u = f.values;
  Vector d(n);
  if (g.is_circle()) {
    for (Index i = 0; i < n; ++i) d[i] = (u[(i + 1) % n] - u[(i + n - 1) % n]) / (2 * h);
  } else {
    for (Index i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - u[i - 1]) / (2 * h);
    d[0] = (-3 * u[0] + 4 * u[1] - u[2]) / (2 * h);
    d[n - 1] = (3 * u[n - 1] - 4 * u[n - 2] + u[n - 3]) / (2 * h);
  }
  return ScalarField(g, d, f.tail);
}

ScalarField abs_grad(const ScalarField& f) {
  ScalarField d = grad(f);
  d.values = d.values.cwiseAbs();
  return d;
}

ScalarField second_difference(const ScalarField& f) {
  const Grid& g = f.grid;
  const Index n = g.size();
  const double h2 = g.spacing() * g.spacing();
  const Vector& u = f.values;
  Vector d(n);
  if (g.is_circle()) {
    for (Index i = 0; i < n; ++i) d[i] = (u[(i + 1) % n] - 2 * u[i] + u[(i + n - 1) % n]) / h2;
  } else {
    for (Index i = 1; i + 1 < n; ++i) d[i] = (u[i + 1] - 2 * u[i] + u[i - 1]) / h2;
    d[0] = (2 * u[0] - 5 * u[1] + 4 * u[2] - u[3]) / h2;
    d[n - 1] = (2 * u[n - 1] - 5 * u[n - 2] + 4 * u[n - 3] - u[n - 4]) / h2;
  }
  return ScalarField(g, d, f.tail);
}

double entropy(const DensityField& f) {
  const Vector& v = f.field.values;
  const Vector& w = f.measure.weights();
  double s = 0.0;
  for (Index i = 0; i < v.size(); ++i)
    if (v[i] > 0) s += v[i] * std::log(v[i]) * w[i];
  return s;
}

FisherInfo fisher_info(const DensityField& f) {
  const Vector d = grad(f.field).values;
  const Vector& v = f.field.values;
  const Vector& w = f.measure.weights();
  FisherInfo out{0.0, 0};
  for (Index i = 0; i < v.size(); ++i) {
    if (v[i] <= fisher_floor && d[i] != 0) ++out.floor_hits;
    out.value += d[i] * d[i] / std::max(v[i], fisher_floor) * w[i];
  }
  return out;
}

void write_columns(std::ostream& os, const ScalarField& f) {
  char buf[80];
  for (Index i = 0; i < f.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %.17g\n", f.grid.coord(i), f.values[i]);
    os << buf;
  }
}

void write_columns(std::ostream& os, const RegionMask& m) {
  char buf[64];
  for (Index i = 0; i < m.grid.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g %d\n", m.grid.coord(i), m.member[i] ? 1 : 0);
    os << buf;
  }
}

ScalarField read_columns(std::istream& is, const Grid& grid, Tail tail) {
  Vector v(grid.size());
  std::string line;
  Index i = 0;
  while (std::getline(is, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    double x, y;
    if (!(ls >> x >> y)) throw std::runtime_error("read_columns: malformed line " + std::to_string(i + 1));
    if (i >= grid.size()) throw std::runtime_error("read_columns: too many rows");
    if (std::abs(x - grid.coord(i)) > 1e-9 * std::max(1.0, std::abs(x)))
      throw std::runtime_error("read_columns: coordinate mismatch at row " + std::to_string(i + 1));
    v[i++] = y;
  }
  if (i != grid.size()) throw std::runtime_error("read_columns: too few rows");
  return ScalarField(grid, v, tail);
}

}  // namespace harnack
