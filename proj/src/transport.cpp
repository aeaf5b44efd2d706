#include "harnack/transport.hpp"

#include "harnack/hopf_lax.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harnack {

namespace {

constexpr double mass_tol = 1e-9;

void require_probability(const DensityField& rho, const char* what) {
  if ((rho.field.values.array() < 0).any()) throw std::domain_error(std::string(what) + ": negative density");
  if (std::abs(rho.mass() - 1.0) > mass_tol) throw std::domain_error(std::string(what) + ": density not normalized");
}

struct Piece {
  double u0, u1, q0, q1;
  double at(double u) const { return u1 > u0 ? q0 + (q1 - q0) * (u - u0) / (u1 - u0) : q0; }
};

std::vector<Piece> to_pieces(const QuantileRep& r) {
  std::vector<Piece> p(r.pieces());
  for (Index k = 0; k < r.pieces(); ++k) p[k] = {r.u[k], r.u[k + 1], r.lo[k], r.hi[k]};
  return p;
}

// Pieces of u -> Q(u + beta) on [0, 1), beta in [0, 1), wrapping with + period.
std::vector<Piece> shifted(const std::vector<Piece>& p, double beta, double period) {
  if (beta == 0.0) return p;
  std::vector<Piece> out;
  out.reserve(p.size() + 1);
  for (const Piece& c : p) {
    if (c.u1 <= beta) continue;
    const double a = std::max(c.u0, beta);
    out.push_back({a - beta, c.u1 - beta, c.at(a), c.q1});
  }
  for (const Piece& c : p) {
    if (c.u0 >= beta) break;
    const double b = std::min(c.u1, beta);
    out.push_back({c.u0 + 1 - beta, b + 1 - beta, c.q0 + period, c.at(b) + period});
  }
  out.back().u1 = 1.0;
  return out;
}

// int_0^1 (A(u) + offset - B(u))^2 du, both piecewise linear over [0, 1].
double l2_cost(const std::vector<Piece>& A, const std::vector<Piece>& B, double offset) {
  size_t i = 0, j = 0;
  double u = 0.0, total = 0.0;
  while (i < A.size() && j < B.size()) {
    const double v = std::min(A[i].u1, B[j].u1);
    if (v > u) {
      const double d0 = A[i].at(u) + offset - B[j].at(u);
      const double d1 = A[i].at(v) + offset - B[j].at(v);
      total += (v - u) * (d0 * d0 + d0 * d1 + d1 * d1) / 3;
      u = v;
    }
    if (A[i].u1 <= v) ++i;
    if (j < B.size() && B[j].u1 <= v) ++j;
  }
  return total;
}

double rotation_cost(const std::vector<Piece>& A, const std::vector<Piece>& B, double period, double alpha) {
  const double k = std::floor(alpha);
  return l2_cost(shifted(A, alpha - k, period), B, k * period);
}

}  // namespace

double QuantileRep::at(double p) const {
  double shift = 0.0;
  if (period > 0) {
    const double k = std::floor(p);
    shift = k * period;
    p -= k;
  }
  p = std::clamp(p, 0.0, 1.0);
  const Index k = std::clamp<Index>(Index(std::upper_bound(u.data(), u.data() + u.size(), p) - u.data()) - 1, 0, pieces() - 1);
  const Piece c{u[k], u[k + 1], lo[k], hi[k]};
  return c.at(p) + shift;
}

QuantileRep quantile_rep(const DensityField& rho, TransportModel model) {
  require_probability(rho, "quantile_rep");
  const Grid& g = rho.grid();
  const Index n = g.size();
  const double h = g.spacing();
  const Vector dens = rho.field.values.cwiseProduct(rho.measure.lebesgue_density());
  const Vector& w = rho.measure.weights();

  std::vector<double> mass, lo, hi;
  if (model == TransportModel::atomic) {
    for (Index i = 0; i < n; ++i) {
      mass.push_back(rho.field.values[i] * w[i]);
      lo.push_back(g.coord(i));
      hi.push_back(g.coord(i));
    }
  } else {
    const Index cells = g.is_circle() ? n : n - 1;
    for (Index c = 0; c < cells; ++c) {
      mass.push_back(0.5 * h * (dens[c] + dens[(c + 1) % n]));
      lo.push_back(g.coord(c));
      hi.push_back(g.lower() + h * double(c + 1));
    }
  }
  double total = 0.0;
  for (double m : mass) total += m;
  QuantileRep r;
  r.period = g.is_circle() ? g.length() : 0.0;
  std::vector<double> u{0.0}, ql, qh;
  double acc = 0.0;
  for (size_t k = 0; k < mass.size(); ++k) {
    if (!(mass[k] > 0)) continue;
    acc += mass[k];
    u.push_back(acc / total);
    ql.push_back(lo[k]);
    qh.push_back(hi[k]);
  }
  u.back() = 1.0;
  r.u = Eigen::Map<Vector>(u.data(), Index(u.size()));
  r.lo = Eigen::Map<Vector>(ql.data(), Index(ql.size()));
  r.hi = Eigen::Map<Vector>(qh.data(), Index(qh.size()));
  return r;
}

Vector chebyshev_probabilities(Index m) {
  constexpr double pi = 3.14159265358979323846;
  Vector u(m);
  for (Index j = 0; j < m; ++j) u[j] = 0.5 * (1 - std::cos(pi * (double(j) + 0.5) / double(m)));
  return u;
}

double w2(const QuantileRep& a, const QuantileRep& b) {
  if (a.period != b.period) throw std::invalid_argument("w2: domains differ");
  const std::vector<Piece> A = to_pieces(a), B = to_pieces(b);
  if (a.period == 0.0) return std::sqrt(std::max(0.0, l2_cost(A, B, 0.0)));

  const double L = a.period;
  auto J = [&](double al) { return rotation_cost(A, B, L, al); };
  constexpr int scan = 400;
  int best = 0;
  double bv = std::numeric_limits<double>::infinity();
  for (int k = 0; k <= scan; ++k) {
    const double v = J(-1.0 + 2.0 * k / scan);
    if (v < bv) {
      bv = v;
      best = k;
    }
  }
  // golden section on the bracketing scan cells; J is convex in alpha
  double lo = -1.0 + 2.0 * std::max(0, best - 1) / scan, hi = -1.0 + 2.0 * std::min(scan, best + 1) / scan;
  const double gr = 0.5 * (std::sqrt(5.0) - 1);
  double x1 = hi - gr * (hi - lo), x2 = lo + gr * (hi - lo);
  double f1 = J(x1), f2 = J(x2);
  for (int it = 0; it < 80 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - gr * (hi - lo);
      f1 = J(x1);
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + gr * (hi - lo);
      f2 = J(x2);
    }
  }
  bv = std::min({bv, f1, f2});
  return std::sqrt(std::max(0.0, bv));
}

double w2(const DensityField& mu, const DensityField& nu, TransportModel model) {
  if (mu.grid().topology() != nu.grid().topology() || mu.grid().length() != nu.grid().length())
    throw std::invalid_argument("w2: densities live on different spaces");
  return w2(quantile_rep(mu, model), quantile_rep(nu, model));
}

double kantorovich_gap(const DensityField& mu, const DensityField& nu, const ScalarField& phi) {
  if (mu.grid() != nu.grid() || phi.grid != mu.grid()) throw std::invalid_argument("kantorovich_gap: grid mismatch");
  const double w = w2(mu, nu, TransportModel::atomic);
  const Vector q = inf_conv(phi, 1.0).field.values;
  const double dual = nu.measure.integrate(nu.field.values.cwiseProduct(q)) -
                      mu.measure.integrate(mu.field.values.cwiseProduct(phi.values));
  return 0.5 * w * w - dual;
}

MonotoneMap brenier_map(const DensityField& mu, const DensityField& nu) {
  if (!mu.grid().is_line()) throw std::invalid_argument("brenier_map: line grids only");
  require_probability(mu, "brenier_map");
  const QuantileRep qn = quantile_rep(nu);
  const Grid& g = mu.grid();
  const Index n = g.size();
  // F_mu at node i is the cumulative mass of the cells left of it
  const Vector dens = mu.field.values.cwiseProduct(mu.measure.lebesgue_density());
  Vector F(n);
  F[0] = 0.0;
  for (Index i = 1; i < n; ++i) F[i] = F[i - 1] + 0.5 * g.spacing() * (dens[i - 1] + dens[i]);
  F /= F[n - 1];
  MonotoneMap T{g, Vector(n)};
  for (Index i = 0; i < n; ++i) T.image[i] = qn.at(F[i]);
  for (Index i = 1; i < n; ++i) T.image[i] = std::max(T.image[i], T.image[i - 1]);
  return T;
}

namespace {

// Cell masses of the law with quantile r, spread back onto node densities.
DensityField density_from_quantile(const QuantileRep& r, const Grid& g, const Measure& mu) {
  const Index n = g.size();
  const double h = g.spacing();
  // CDF of r at every node, sweeping the monotone pieces once
  Vector Fn(n);
  Index k = 0;
  for (Index i = 0; i < n; ++i) {
    const double x = g.coord(i);
    while (k < r.pieces() && x >= r.hi[k]) ++k;
    if (k == r.pieces())
      Fn[i] = 1.0;
    else if (x > r.lo[k])
      Fn[i] = r.u[k] + (r.u[k + 1] - r.u[k]) * (x - r.lo[k]) / (r.hi[k] - r.lo[k]);
    else
      Fn[i] = r.u[k];
  }
  Vector cellm(n - 1);
  for (Index c = 0; c + 1 < n; ++c) cellm[c] = Fn[c + 1] - Fn[c];
  Vector rho(n);
  for (Index i = 0; i < n; ++i) {
    const double left = i > 0 ? cellm[i - 1] : 0.0, right = i + 1 < n ? cellm[i] : 0.0;
    rho[i] = (i > 0 && i + 1 < n) ? (left + right) / (2 * h) : (left + right) / h;
  }
  return DensityField::normalize(ScalarField(g, rho.cwiseQuotient(mu.lebesgue_density())), mu);
}

}  // namespace

DisplacementPath displacement(const DensityField& mu, const DensityField& nu, const std::vector<double>& s) {
  if (!mu.grid().is_line()) throw std::invalid_argument("displacement: line grids only");
  if (mu.grid() != nu.grid()) throw std::invalid_argument("displacement: grid mismatch");
  const QuantileRep qm = quantile_rep(mu), qn = quantile_rep(nu);
  // common breakpoints so that both quantiles are linear on every piece
  std::vector<double> u(qm.u.data(), qm.u.data() + qm.u.size());
  u.insert(u.end(), qn.u.data(), qn.u.data() + qn.u.size());
  std::sort(u.begin(), u.end());
  u.erase(std::unique(u.begin(), u.end()), u.end());

  const std::vector<Piece> A = to_pieces(qm), B = to_pieces(qn);
  DisplacementPath path;
  path.s = Eigen::Map<const Vector>(s.data(), Index(s.size()));
  for (double sk : s) {
    if (sk < 0 || sk > 1) throw std::invalid_argument("displacement: s outside [0, 1]");
    QuantileRep r;
    const Index k = Index(u.size()) - 1;
    r.u = Eigen::Map<Vector>(u.data(), Index(u.size()));
    r.lo.resize(k);
    r.hi.resize(k);
    size_t i = 0, j = 0;
    for (Index p = 0; p < k; ++p) {
      const double a = u[p], b = u[p + 1], mid = 0.5 * (a + b);
      while (i + 1 < A.size() && A[i].u1 <= mid) ++i;
      while (j + 1 < B.size() && B[j].u1 <= mid) ++j;
      r.lo[p] = sk * A[i].at(a) + (1 - sk) * B[j].at(a);
      r.hi[p] = sk * A[i].at(b) + (1 - sk) * B[j].at(b);
    }
    path.quantiles.push_back(r);
    if (sk == 1.0)
      path.h.push_back(mu);
    else if (sk == 0.0)
      path.h.push_back(nu);
    else
      path.h.push_back(density_from_quantile(r, mu.grid(), mu.measure));
  }
  return path;
}

DensityField evolve_density(const Semigroup& sg, double t, const DensityField& f) {
  return DensityField::normalize(apply(sg, t, f.field), f.measure);
}

double kuwada_gap(const Semigroup& sg, const DensityField& f, double t) {
  if (!sg.measure().probability()) throw std::invalid_argument("kuwada_gap: needs a probability reference measure");
  if (f.grid() != sg.grid()) throw std::invalid_argument("kuwada_gap: grid mismatch");
  require_probability(f, "kuwada_gap");
  const DensityField pt = evolve_density(sg, t, f);
  const double w = w2(pt, f);
  return t * (entropy(f) - entropy(pt)) - w * w;
}

}  // namespace harnack
