#include "harnack/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harnack {

namespace {

constexpr double inf = std::numeric_limits<double>::infinity();

void require_positive(double s, const char* what) {
  if (!(s > 0) || !std::isfinite(s)) throw std::invalid_argument(std::string(what) + ": time must be positive");
}

// Shared by the fast and the reference path so both round identically.
inline double cost(const Grid& g, const Vector& f, Index x, Index y, double s) {
  const double d = g.distance(x, y);
  return f[y] + d * d / (2 * s);
}

}  // namespace

InfConvResult inf_conv(const ScalarField& f, double s) {
  require_positive(s, "inf_conv");
  const Grid& g = f.grid;
  const Index n = g.size();
  const double h = g.spacing();
  const double c = h * h / (2 * s);

  // sources at integer positions; the circle is unrolled to [-n, 2n)
  const bool circ = g.is_circle();
  const Index m = circ ? 3 * n : n;
  const Index offset = circ ? n : 0;
  auto src = [&](Index q) { return circ ? (q + 2 * n - offset) % n : q; };
  auto pos = [&](Index q) { return double(q - offset); };

  std::vector<Index> v(m);
  std::vector<double> z(m + 1);
  Index k = 0;
  v[0] = 0;
  z[0] = -inf;
  z[1] = inf;
  for (Index q = 1; q < m; ++q) {
    const double fq = f.values[src(q)];
    auto cross = [&](Index p) { return (fq - f.values[src(p)]) / (2 * c * (pos(q) - pos(p))) + 0.5 * (pos(q) + pos(p)); };
    double x = cross(v[k]);
    while (x <= z[k]) x = cross(v[--k]);
    ++k;
    v[k] = q;
    z[k] = x;
    z[k + 1] = inf;
  }

  InfConvResult out{ScalarField(g, f.values, f.tail), std::vector<Index>(n), Vector::Constant(n, inf)};
  Index e = 0;
  for (Index i = 0; i < n; ++i) {
    const double xi = double(i);
    while (z[e + 1] < xi) ++e;
    Index best = -1;
    double bv = inf;
    const Index lo = std::max<Index>(0, e - 1), hi = std::min<Index>(k, e + 1);
    for (Index a = lo; a <= hi; ++a) {
      const Index j = src(v[a]);
      const double val = cost(g, f.values, i, j, s);
      if (val < bv || (val == bv && j < best)) {
        bv = val;
        best = j;
      }
    }
    double gap = inf;
    for (Index a = lo; a <= hi; ++a) {
      const Index j = src(v[a]);
      if (g.index_distance(j, best) > 1) gap = std::min(gap, cost(g, f.values, i, j, s) - bv);
    }
    out.field.values[i] = bv;
    out.argmin[i] = best;
    out.rival_gap[i] = gap;
  }
  return out;
}

InfConvResult inf_conv_reference(const ScalarField& f, double s) {
  require_positive(s, "inf_conv_reference");
  const Grid& g = f.grid;
  const Index n = g.size();
  InfConvResult out{ScalarField(g, f.values, f.tail), std::vector<Index>(n), Vector::Constant(n, inf)};
  for (Index i = 0; i < n; ++i) {
    double bv = inf;
    Index best = 0;
    for (Index j = 0; j < n; ++j) {
      const double val = cost(g, f.values, i, j, s);
      if (val < bv) {
        bv = val;
        best = j;
      }
    }
    double gap = inf;
    for (Index j = 0; j < n; ++j)
      if (g.index_distance(j, best) > 1) gap = std::min(gap, cost(g, f.values, i, j, s) - bv);
    out.field.values[i] = bv;
    out.argmin[i] = best;
    out.rival_gap[i] = gap;
  }
  return out;
}

HJResidual hj_residual(const ScalarField& f, double s, double ds) {
  require_positive(ds, "hj_residual");
  if (!(s > ds)) throw std::invalid_argument("hj_residual: need s > ds");
  const Grid& g = f.grid;
  const Index n = g.size();
  const InfConvResult q0 = inf_conv(f, s);
  const InfConvResult qm = inf_conv(f, s - ds);
  const InfConvResult qp = inf_conv(f, s + ds);
  const Vector dq = grad(q0.field).values;

  Mask good(n);
  for (Index i = 0; i < n; ++i) {
    bool ok = true;
    for (const InfConvResult* r : {&q0, &qm, &qp}) {
      const Index a = r->argmin[i];
      if (g.is_line() && (a < 1 || a > n - 2)) ok = false;
      if (!(r->rival_gap[i] > shock_gap)) ok = false;
    }
    good[i] = ok;
  }
  HJResidual out{ScalarField(g, Vector::Zero(n), f.tail), Mask::Constant(n, false)};
  for (Index i = 0; i < n; ++i) {
    if (g.is_line() && (i == 0 || i == n - 1)) continue;
    const Index l = g.is_line() ? i - 1 : (i + n - 1) % n;
    const Index r = g.is_line() ? i + 1 : (i + 1) % n;
    if (!good[l] || !good[i] || !good[r]) continue;
    // a shock between neighbours shows up as a jump in the minimizer
    if (g.index_distance(q0.argmin[l], q0.argmin[i]) > 2 || g.index_distance(q0.argmin[i], q0.argmin[r]) > 2) continue;
    out.valid[i] = true;
    out.residual.values[i] = (qp.field[i] - qm.field[i]) / (2 * ds) + 0.5 * dq[i] * dq[i];
  }
  return out;
}

double semigroup_property_gap(const ScalarField& f, double t, double s) {
  require_positive(t, "semigroup_property_gap");
  require_positive(s, "semigroup_property_gap");
  const ScalarField a = inf_conv(inf_conv(f, s).field, t).field;
  const ScalarField b = inf_conv(f, t + s).field;
  return (a.values - b.values).cwiseAbs().maxCoeff();
}

ScalarField viscous_infconv(const ViscousConfig& cfg, const ScalarField& f, double t) {
  if (!(cfg.epsilon > 0)) throw std::invalid_argument("viscous_infconv: epsilon must be positive");
  require_positive(t, "viscous_infconv");
  if (cfg.semigroup.grid() != f.grid) throw std::invalid_argument("viscous_infconv: grid mismatch");
  const double eps = cfg.epsilon;
  const Vector la = log_apply(cfg.semigroup, eps * t, -f.values / (2 * eps));
  return ScalarField(f.grid, -2 * eps * la, f.tail);
}

}  // namespace harnack
