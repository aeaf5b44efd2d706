#include "harnack/semigroup.hpp"

#include "harnack/detail/gauss_pieces.hpp"

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace harnack {

using detail::log_add;
using detail::log_interval_mass;
using detail::log_linear_piece;
using detail::log_sf;

namespace {

constexpr double neg_inf = -std::numeric_limits<double>::infinity();
// Linear applies drop kernel weights below e^{-80} relative to O(1).
constexpr double linear_cutoff = -80.0;

void require_time(double t) {
  if (!(t >= 0) || !std::isfinite(t)) throw std::domain_error("semigroup: time must be finite and >= 0");
}

// Log weights of the Euclidean kernel N(0, sigma^2) against the hat basis of a
// uniform line grid; translation invariant apart from the two edge nodes.
struct HatTable {
  Vector interior;  // node at index offset k
  Vector edge;      // edge node when the target is m cells away from it
  Vector cell;      // mass of the cell [k, k+1] cells to the right of the target
  Index kmax;       // largest offset with interior weight above the linear cutoff

  HatTable(Index n, double h, double sd, Tail tail) : interior(n), edge(n), cell(n - 1) {
    const double b = h / sd;
    for (Index k = 0; k < n; ++k) {
      const double z = double(k) * b;
      interior[k] = log_add(log_linear_piece(z - b, z, 0.0, 1.0), log_linear_piece(z, z + b, 1.0, 0.0));
      const double ramp = log_linear_piece(z - b, z, 0.0, 1.0);
      edge[k] = tail == Tail::constant ? log_add(log_sf(z), ramp) : ramp;
      if (k + 1 < n) cell[k] = log_linear_piece(z, z + b, 1.0, 1.0);
    }
    kmax = 0;
    while (kmax + 1 < n && interior[kmax + 1] > linear_cutoff) ++kmax;
  }

  double log_weight(Index n, Index i, Index j) const {
    if (j == 0) return edge[i];
    if (j == n - 1) return edge[n - 1 - i];
    return interior[i > j ? i - j : j - i];
  }
};


// Exact convolution of the piecewise-linear interpolant (constant tails) with
// N(0, sd^2), and its first two derivatives, at every node.
Jet gauss_conv_jet(const Grid& g, double sd, const Vector& v, bool derivatives) {
  const Index n = g.size();
  const double h = g.spacing();
  const HatTable tab(n, h, sd, Tail::constant);
  const Vector wi = tab.interior.head(tab.kmax + 1).array().exp().matrix();
  const Vector we = tab.edge.array().exp().matrix();
  Jet jet;
  jet.value.resize(n);
  for (Index i = 0; i < n; ++i) {
    double s = we[i] * v[0] + we[n - 1 - i] * v[n - 1];
    const Index lo = std::max<Index>(1, i - tab.kmax), hi = std::min<Index>(n - 2, i + tab.kmax);
    for (Index j = lo; j <= hi; ++j) s += wi[j > i ? j - i : i - j] * v[j];
    jet.value[i] = s;
  }
  if (!derivatives) return jet;
  Vector slope(n - 1);
  for (Index c = 0; c + 1 < n; ++c) slope[c] = (v[c + 1] - v[c]) / h;
  Vector kink(n);
  kink[0] = slope[0];
  kink[n - 1] = -slope[n - 2];
  for (Index j = 1; j + 1 < n; ++j) kink[j] = slope[j] - slope[j - 1];
  const Vector cm = tab.cell.array().exp().matrix();
  jet.d1.resize(n);
  jet.d2.resize(n);
  const double b = h / sd;
  for (Index i = 0; i < n; ++i) {
    double s1 = 0.0, s2 = 0.0;
    const Index clo = std::max<Index>(0, i - tab.kmax - 1), chi = std::min<Index>(n - 2, i + tab.kmax);
    for (Index c = clo; c <= chi; ++c) s1 += slope[c] * cm[c >= i ? c - i : i - c - 1];
    const Index jlo = std::max<Index>(0, i - tab.kmax - 1), jhi = std::min<Index>(n - 1, i + tab.kmax + 1);
    for (Index j = jlo; j <= jhi; ++j) s2 += kink[j] * normal_pdf(double(j > i ? j - i : i - j) * b) / sd;
    jet.d1[i] = s1;
    jet.d2[i] = s2;
  }
  return jet;
}

// Quintic Hermite interpolation of a node jet at an interior point.
double hermite5(const Grid& g, const Jet& jet, double x) {
  const double h = g.spacing();
  const Index n = g.size();
  double u = (x - g.lower()) / h;
  Index k = std::clamp<Index>(Index(std::floor(u)), 0, n - 2);
  const double s = std::clamp(u - double(k), 0.0, 1.0);
  const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
  const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
  const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
  const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
  const double H3 = 0.5 * (s3 - 2 * s4 + s5);
  const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
  const double H5 = 10 * s3 - 15 * s4 + 6 * s5;
  return H0 * jet.value[k] + H1 * h * jet.d1[k] + H2 * h * h * jet.d2[k] + H3 * h * h * jet.d2[k + 1] +
         H4 * h * jet.d1[k + 1] + H5 * jet.value[k + 1];
}

// P(c + sd Z) against the hat basis, restricted to |Z| <= 9; linear-domain closed form.
double windowed_gauss_apply(const Grid& g, double c, double sd, const Vector& v, Tail tail) {
  const Index n = g.size();
  const double h = g.spacing();
  const double reach = 9.0 * sd + h;
  const Index lo = std::clamp<Index>(Index(std::floor((c - reach - g.lower()) / h)), 0, n - 1);
  const Index hi = std::clamp<Index>(Index(std::ceil((c + reach - g.lower()) / h)), 0, n - 1);
  const double D = h / sd;
  double s = 0.0;
  double za = (g.coord(lo) - c) / sd;
  double Pa = normal_cdf(za), pa = normal_pdf(za);
  if (tail == Tail::constant) {
    if (lo == 0) s += Pa * v[0];
    if (hi == n - 1) s += normal_sf((g.coord(n - 1) - c) / sd) * v[n - 1];
  }
  for (Index j = lo; j < hi; ++j) {
    const double zb = (g.coord(j + 1) - c) / sd;
    const double Pb = normal_cdf(zb), pb = normal_pdf(zb);
    const double rise = (pa - pb - za * (Pb - Pa)) / D;
    const double fall = (zb * (Pb - Pa) - (pa - pb)) / D;
    s += fall * v[j] + rise * v[j + 1];
    za = zb;
    Pa = Pb;
    pa = pb;
  }
  return s;
}

// Sum of cell values weighted by the N(c, sd^2) mass of each cell, |Z| <= 9.
double windowed_cell_sum(const Grid& g, double c, double sd, const Vector& cell) {
  const Index n = g.size();
  const double h = g.spacing();
  const double reach = 9.0 * sd + h;
  const Index lo = std::clamp<Index>(Index(std::floor((c - reach - g.lower()) / h)), 0, n - 1);
  const Index hi = std::clamp<Index>(Index(std::ceil((c + reach - g.lower()) / h)), 0, n - 1);
  double s = 0.0;
  double Pa = normal_cdf((g.coord(lo) - c) / sd);
  for (Index j = lo; j < hi; ++j) {
    const double Pb = normal_cdf((g.coord(j + 1) - c) / sd);
    s += cell[j] * (Pb - Pa);
    Pa = Pb;
  }
  return s;
}

// Sum of node values weighted by the N(c, sd^2) density at the node, |Z| <= 9.
double windowed_node_density(const Grid& g, double c, double sd, const Vector& node) {
  const Index n = g.size();
  const double h = g.spacing();
  const double reach = 9.0 * sd + h;
  const Index lo = std::clamp<Index>(Index(std::floor((c - reach - g.lower()) / h)), 0, n - 1);
  const Index hi = std::clamp<Index>(Index(std::ceil((c + reach - g.lower()) / h)), 0, n - 1);
  double s = 0.0;
  for (Index j = lo; j <= hi; ++j) s += node[j] * normal_pdf((g.coord(j) - c) / sd) / sd;
  return s;
}

Vector cell_slopes(const Grid& g, const Vector& v) {
  Vector slope(v.size() - 1);
  for (Index c = 0; c + 1 < v.size(); ++c) slope[c] = (v[c + 1] - v[c]) / g.spacing();
  return slope;
}

// Crank-Nicolson for the flux form u_t = e^{V} (e^{-V} u')' on the circle.
class CircleScheme {
 public:
  explicit CircleScheme(const Semigroup& sg) : n_(sg.grid().size()) {
    const Vector& V = sg.potential();
    const double h = sg.grid().spacing();
    const double vmin = V.minCoeff();
    rho_ = (-(V.array() - vmin)).exp().matrix();
    half_.resize(n_);
    for (Index i = 0; i < n_; ++i) half_[i] = std::exp(-(0.5 * (V[i] + V[(i + 1) % n_]) - vmin));
    std::vector<Eigen::Triplet<double>> trip;
    dt_max_ = h;
    for (Index i = 0; i < n_; ++i) {
      const Index ip = (i + 1) % n_, im = (i + n_ - 1) % n_;
      const double a = half_[i] / (h * h), b = half_[im] / (h * h);
      trip.emplace_back(i, ip, a);
      trip.emplace_back(i, im, b);
      trip.emplace_back(i, i, -(a + b));
      // nonnegativity of D + (dt/2) S
      dt_max_ = std::min(dt_max_, 2.0 * rho_[i] / (a + b));
    }
    S_.resize(n_, n_);
    S_.setFromTriplets(trip.begin(), trip.end());
  }

  Vector run(double t, Vector u) const {
    if (t == 0) return u;
    const Index m = std::max<Index>(2, Index(std::ceil(t / dt_max_)));
    const double dt = t / double(m);
    Eigen::SparseMatrix<double> D(n_, n_);
    D.reserve(Eigen::VectorXi::Constant(n_, 1));
    for (Index i = 0; i < n_; ++i) D.insert(i, i) = rho_[i];
    const Eigen::SparseMatrix<double> A = D - (0.5 * dt) * S_;
    const Eigen::SparseMatrix<double> B = D + (0.5 * dt) * S_;
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> solver(A);
    if (solver.info() != Eigen::Success) throw std::runtime_error("diffusion: factorization failed");
    // Rannacher start: two implicit Euler half steps
    Vector rhs(n_);
    for (int k = 0; k < 2; ++k) {
      rhs = rho_.cwiseProduct(u);
      u = solver.solve(rhs);
    }
    for (Index k = 1; k < m; ++k) {
      rhs = B * u;
      u = solver.solve(rhs);
    }
    if (!u.allFinite()) throw std::runtime_error("diffusion: Crank-Nicolson produced non-finite values");
    return u;
  }

  const Vector& rho() const { return rho_; }

 private:
  Index n_;
  Vector rho_;
  Vector half_;
  Eigen::SparseMatrix<double> S_;
  double dt_max_;
};

double ou_sd(double t) { return std::sqrt(-std::expm1(-2.0 * t)); }

// Hat weights of N(c, sd^2) on a line grid.
Vector gaussian_hat_row(const Grid& g, double c, double sd, Tail tail) {
  const Index n = g.size();
  Vector z(n);
  for (Index j = 0; j < n; ++j) z[j] = (g.coord(j) - c) / sd;
  Vector w(n);
  for (Index j = 1; j + 1 < n; ++j)
    w[j] = std::exp(log_add(log_linear_piece(z[j - 1], z[j], 0.0, 1.0), log_linear_piece(z[j], z[j + 1], 1.0, 0.0)));
  double left = log_linear_piece(z[0], z[1], 1.0, 0.0);
  double right = log_linear_piece(z[n - 2], z[n - 1], 0.0, 1.0);
  if (tail == Tail::constant) {
    left = log_add(left, log_sf(-z[0]));
    right = log_add(right, log_sf(z[n - 1]));
  }
  w[0] = std::exp(left);
  w[n - 1] = std::exp(right);
  return w;
}

void require_line(const Grid& g, const char* what) {
  if (!g.is_line()) throw std::invalid_argument(std::string(what) + ": line grid required");
}

}  // namespace

std::string to_string(SemigroupKind k) {
  switch (k) {
    case SemigroupKind::euclidean: return "euclidean";
    case SemigroupKind::ornstein_uhlenbeck: return "ornstein_uhlenbeck";
    case SemigroupKind::generic_diffusion: return "generic_diffusion";
  }
  return "unknown";
}

Semigroup Semigroup::euclidean(const Grid& grid) {
  require_line(grid, "Semigroup::euclidean");
  return Semigroup(SemigroupKind::euclidean, grid, CurvatureParams(0.0, 1.0), Measure::lebesgue(grid));
}

Semigroup Semigroup::ornstein_uhlenbeck(const Grid& grid) {
  require_line(grid, "Semigroup::ornstein_uhlenbeck");
  Semigroup sg(SemigroupKind::ornstein_uhlenbeck, grid, CurvatureParams(1.0), Measure::gaussian(grid));
  sg.potential_ = sg.measure_.potential();
  sg.certified_ = 1.0;
  return sg;
}

Semigroup Semigroup::diffusion(const Grid& grid, const Vector& potential) {
  if (!grid.is_circle()) throw std::invalid_argument("Semigroup::diffusion: circle grid required");
  if (potential.size() != grid.size()) throw std::invalid_argument("Semigroup::diffusion: potential size");
  const Index n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  double k = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    k = std::min(k, (potential[(i + 1) % n] - 2 * potential[i] + potential[(i + n - 1) % n]) / h2);
  return diffusion(grid, potential, k);
}

Semigroup Semigroup::diffusion(const Grid& grid, const Vector& potential, double K) {
  if (!grid.is_circle()) throw std::invalid_argument("Semigroup::diffusion: circle grid required");
  if (potential.size() != grid.size()) throw std::invalid_argument("Semigroup::diffusion: potential size");
  const Index n = grid.size();
  const double h2 = grid.spacing() * grid.spacing();
  double cert = std::numeric_limits<double>::infinity();
  for (Index i = 0; i < n; ++i)
    cert = std::min(cert, (potential[(i + 1) % n] - 2 * potential[i] + potential[(i + n - 1) % n]) / h2);
  if (K > cert) throw std::invalid_argument("Semigroup::diffusion: K exceeds the certified bound of V''");
  Semigroup sg(SemigroupKind::generic_diffusion, grid, CurvatureParams(K), Measure::weighted(grid, potential, true));
  sg.potential_ = potential;
  sg.certified_ = cert;
  return sg;
}

ScalarField apply(const Semigroup& sg, double t, const ScalarField& f) {
  require_time(t);
  if (f.grid != sg.grid()) throw std::invalid_argument("apply: grid mismatch");
  if (t == 0) return f;
  const Grid& g = sg.grid();
  const Index n = g.size();
  Vector out(n);
  switch (sg.kind()) {
    case SemigroupKind::euclidean:
      if (f.tail == Tail::constant) {
        out = gauss_conv_jet(g, std::sqrt(2 * t), f.values, false).value;
      } else {
        for (Index i = 0; i < n; ++i) out[i] = windowed_gauss_apply(g, g.coord(i), std::sqrt(2 * t), f.values, f.tail);
      }
      break;
    case SemigroupKind::ornstein_uhlenbeck: {
      const double e = std::exp(-t), sd = ou_sd(t);
      if (sd >= 20 * g.spacing() && f.tail == Tail::constant) {
        // P_t f(x) = (f * N(0, sd^2))(e^{-t} x); the convolution is smooth at this width
        const Jet jet = gauss_conv_jet(g, sd, f.values, true);
        for (Index i = 0; i < n; ++i) out[i] = hermite5(g, jet, e * g.coord(i));
      } else {
        for (Index i = 0; i < n; ++i) out[i] = windowed_gauss_apply(g, e * g.coord(i), sd, f.values, f.tail);
      }
      break;
    }
    case SemigroupKind::generic_diffusion:
      out = CircleScheme(sg).run(t, f.values);
      break;
  }
  return ScalarField(g, out, f.tail);
}

Vector kernel_row(const Semigroup& sg, double t, Index y) {
  require_time(t);
  const Grid& g = sg.grid();
  const Index n = g.size();
  if (y < 0 || y >= n) throw std::out_of_range("kernel_row: node out of range");
  if (t == 0) {
    Vector e = Vector::Zero(n);
    e[y] = 1.0;
    return e;
  }
  switch (sg.kind()) {
    case SemigroupKind::euclidean: {
      const HatTable tab(n, g.spacing(), std::sqrt(2 * t), Tail::constant);
      Vector w(n);
      for (Index j = 0; j < n; ++j) w[j] = std::exp(tab.log_weight(n, y, j));
      return w;
    }
    case SemigroupKind::ornstein_uhlenbeck:
      return gaussian_hat_row(g, std::exp(-t) * g.coord(y), ou_sd(t), Tail::constant);
    case SemigroupKind::generic_diffusion: {
      const CircleScheme scheme(sg);
      Vector e = Vector::Zero(n);
      e[y] = 1.0 / scheme.rho()[y];
      return scheme.rho().cwiseProduct(scheme.run(t, e));
    }
  }
  return Vector();
}

double apply_at(const Semigroup& sg, double t, const ScalarField& f, Index y) {
  if (f.grid != sg.grid()) throw std::invalid_argument("apply_at: grid mismatch");
  if (f.tail == Tail::zero && sg.kind() != SemigroupKind::generic_diffusion) {
    const Grid& g = sg.grid();
    if (t == 0) return f.values[y];
    const double c = sg.kind() == SemigroupKind::euclidean ? g.coord(y) : std::exp(-t) * g.coord(y);
    const double sd = sg.kind() == SemigroupKind::euclidean ? std::sqrt(2 * t) : ou_sd(t);
    return gaussian_hat_row(g, c, sd, Tail::zero).dot(f.values);
  }
  return kernel_row(sg, t, y).dot(f.values);
}

Vector log_apply(const Semigroup& sg, double t, const Vector& a) {
  require_time(t);
  const Grid& g = sg.grid();
  const Index n = g.size();
  if (a.size() != n) throw std::invalid_argument("log_apply: size mismatch");
  if (t == 0) return a;
  if (sg.kind() == SemigroupKind::euclidean) {
    // e^a with a piecewise linear: on a cell e^{al + be z} phi(z) = e^{al + be^2/2} phi(z - be)
    const double sd = std::sqrt(2 * t), D = g.spacing() / sd;
    Vector beta(n - 1);
    for (Index c = 0; c + 1 < n; ++c) beta[c] = (a[c + 1] - a[c]) / D;
    Vector out(n);
    std::vector<double> terms;
    for (Index i = 0; i < n; ++i) {
      auto z = [&](Index j) { return double(j - i) * D; };
      double top = neg_inf;
      for (Index j = 0; j < n; ++j) top = std::max(top, a[j] - 0.5 * z(j) * z(j));
      terms.clear();
      terms.push_back(a[0] + log_sf(-z(0)));
      terms.push_back(a[n - 1] + log_sf(z(n - 1)));
      for (Index c = 0; c + 1 < n; ++c) {
        const double z0 = z(c), z1 = z(c + 1);
        const double dmin = z0 > 0 ? z0 : (z1 < 0 ? -z1 : 0.0);
        if (std::max(a[c], a[c + 1]) - 0.5 * dmin * dmin < top - 45.0) continue;
        const double be = beta[c];
        terms.push_back(a[c] - be * z0 + 0.5 * be * be + log_interval_mass(z0 - be, z1 - be));
      }
      const double m = *std::max_element(terms.begin(), terms.end());
      double s = 0.0;
      for (double v : terms) s += std::exp(v - m);
      out[i] = m + std::log(s);
    }
    return out;
  }
  const double m = a.maxCoeff();
  const ScalarField e(g, (a.array() - m).exp().matrix());
  const Vector p = apply(sg, t, e).values;
  return (p.array().log() + m).matrix();
}

Jet apply_jet(const Semigroup& sg, double t, const ScalarField& f) {
  require_time(t);
  const Grid& g = sg.grid();
  Jet jet;
  if (sg.kind() == SemigroupKind::ornstein_uhlenbeck && t > 0 && f.tail == Tail::constant) {
    // P_t f(x) = E f(e^{-t} x + sd Z): derivatives pull out e^{-t} per order
    const Index n = g.size();
    const double e = std::exp(-t), sd = ou_sd(t);
    const Vector slope = cell_slopes(g, f.values);
    Vector kink(n);
    kink[0] = slope[0];
    kink[n - 1] = -slope[n - 2];
    for (Index j = 1; j + 1 < n; ++j) kink[j] = slope[j] - slope[j - 1];
    jet.value = apply(sg, t, f).values;
    jet.d1.resize(n);
    jet.d2.resize(n);
    for (Index i = 0; i < n; ++i) {
      jet.d1[i] = e * windowed_cell_sum(g, e * g.coord(i), sd, slope);
      jet.d2[i] = e * e * windowed_node_density(g, e * g.coord(i), sd, kink);
    }
    return jet;
  }
  if (sg.kind() != SemigroupKind::euclidean || t == 0 || f.tail != Tail::constant) {
    const ScalarField u = apply(sg, t, f);
    jet.value = u.values;
    jet.d1 = grad(u).values;
    jet.d2 = second_difference(u).values;
    return jet;
  }
  return gauss_conv_jet(g, std::sqrt(2 * t), f.values, true);
}

Vector apply_gradient_power(const Semigroup& sg, double t, const ScalarField& f, double p) {
  require_time(t);
  const Grid& g = sg.grid();
  const Index n = g.size();
  if (sg.kind() == SemigroupKind::ornstein_uhlenbeck && t > 0 && f.tail == Tail::constant) {
    const double e = std::exp(-t), sd = ou_sd(t);
    const Vector cv = cell_slopes(g, f.values).array().abs().pow(p).matrix();
    Vector out(n);
    for (Index i = 0; i < n; ++i) out[i] = windowed_cell_sum(g, e * g.coord(i), sd, cv);
    return out;
  }
  if (sg.kind() != SemigroupKind::euclidean || t == 0) {
    ScalarField d = abs_grad(f);
    d.values = d.values.array().pow(p).matrix();
    return apply(sg, t, d).values;
  }
  const double h = g.spacing();
  const HatTable tab(n, h, std::sqrt(2 * t), Tail::constant);
  const Vector cm = tab.cell.array().exp().matrix();
  Vector cv(n - 1);
  for (Index c = 0; c + 1 < n; ++c) cv[c] = std::pow(std::abs(f.values[c + 1] - f.values[c]) / h, p);
  Vector out(n);
  for (Index i = 0; i < n; ++i) {
    double s = 0.0;
    const Index lo = std::max<Index>(0, i - tab.kmax - 1), hi = std::min<Index>(n - 2, i + tab.kmax);
    for (Index c = lo; c <= hi; ++c) s += cv[c] * cm[c >= i ? c - i : i - c - 1];
    out[i] = s;
  }
  return out;
}

ScalarField project_set(const Grid& grid, const IntervalSet& A) {
  const Index n = grid.size();
  const double h = grid.spacing();
  Vector v = Vector::Zero(n);
  const double L = A.on_circle() ? A.circle_length() : 0.0;
  const int copies = A.on_circle() ? 2 : 0;
  for (Index j = 0; j < n; ++j) {
    const double x = grid.coord(j);
    double s = 0.0;
    for (const auto& part : A.parts())
      for (int k = -copies; k <= copies; ++k) {
        const double lo = part.lo + k * L, hi = part.hi + k * L;
        // rising half [x-h, x]
        double a = std::max(lo, x - h), b = std::min(hi, x);
        if (b > a) s += ((b - x + h) * (b - x + h) - (a - x + h) * (a - x + h)) / (2 * h);
        // falling half [x, x+h]
        a = std::max(lo, x);
        b = std::min(hi, x + h);
        if (b > a) s += ((x + h - a) * (x + h - a) - (x + h - b) * (x + h - b)) / (2 * h);
      }
    v[j] = std::clamp(s / h, 0.0, 1.0);
  }
  return ScalarField(grid, v);
}

SetProbability apply_set(const Semigroup& sg, double t, const IntervalSet& A) {
  require_time(t);
  const Grid& g = sg.grid();
  const Index n = g.size();
  if (A.on_circle() != g.is_circle()) throw std::invalid_argument("apply_set: set and grid topology differ");
  SetProbability out{Vector(n), Vector(n), Vector(n)};
  const IntervalSet Ac = A.complement();
  if (t == 0) {
    for (Index i = 0; i < n; ++i) {
      out.mass[i] = A.contains(g.coord(i)) ? 1.0 : 0.0;
      out.complement[i] = 1.0 - out.mass[i];
    }
    out.gradient.setZero();
    return out;
  }
  if (sg.kind() == SemigroupKind::generic_diffusion) {
    out.mass = apply(sg, t, project_set(g, A)).values;
    out.complement = apply(sg, t, project_set(g, Ac)).values;
    out.gradient = grad(ScalarField(g, out.mass)).values;
    return out;
  }
  const bool ou = sg.kind() == SemigroupKind::ornstein_uhlenbeck;
  const double sd = ou ? ou_sd(t) : std::sqrt(2 * t);
  const double scale = ou ? std::exp(-t) : 1.0;
  auto pdf = [](double z) { return std::isinf(z) ? 0.0 : normal_pdf(z); };
  for (Index i = 0; i < n; ++i) {
    const double c = scale * g.coord(i);
    double p = 0.0, q = 0.0, d = 0.0;
    for (const auto& part : A.parts()) {
      const double zl = (part.lo - c) / sd, zh = (part.hi - c) / sd;
      p += detail::interval_mass(zl, zh);
      d += (pdf(zl) - pdf(zh)) * scale / sd;
    }
    for (const auto& part : Ac.parts()) q += detail::interval_mass((part.lo - c) / sd, (part.hi - c) / sd);
    out.mass[i] = p;
    out.complement[i] = q;
    out.gradient[i] = d;
  }
  return out;
}

DistributionFunction kernel_cdf(const Semigroup& sg, double t, const ScalarField& f, Index y) {
  if (!(t > 0)) throw std::domain_error("kernel_cdf: t must be positive");
  const Vector row = kernel_row(sg, t, y);
  const double mass = row.sum();
  if (std::abs(mass - 1.0) > 1e-6) throw std::runtime_error("kernel_cdf: kernel row not normalized");
  return distribution_from_weights(f.values, row);
}

ScalarField generator(const Semigroup& sg, const ScalarField& f) {
  ScalarField out = second_difference(f);
  switch (sg.kind()) {
    case SemigroupKind::euclidean: break;
    case SemigroupKind::ornstein_uhlenbeck:
      out.values -= sg.grid().coords().cwiseProduct(grad(f).values);
      break;
    case SemigroupKind::generic_diffusion: {
      const Vector dv = grad(ScalarField(sg.grid(), sg.potential())).values;
      out.values -= dv.cwiseProduct(grad(f).values);
      break;
    }
  }
  return out;
}

ScalarField gradient_bound_margin(const Semigroup& sg, double t, const ScalarField& f) {
  require_time(t);
  const Grid& g = sg.grid();
  if (t == 0) return ScalarField(g, Vector::Zero(g.size()), f.tail);
  const Vector rhs = std::exp(-sg.curvature().K * t) * apply_gradient_power(sg, t, f, 1.0);
  const Vector lhs = apply_jet(sg, t, f).d1.cwiseAbs();
  return ScalarField(g, rhs - lhs, f.tail);
}

ScalarField gamma2_margin(const Semigroup& sg, const ScalarField& f) {
  const Grid& g = sg.grid();
  const ScalarField Lf = generator(sg, f);
  const Vector d = grad(f).values;
  const Vector d2 = d.cwiseProduct(d);
  const Vector half_L_gamma = 0.5 * generator(sg, ScalarField(g, d2)).values;
  const Vector cross = d.cwiseProduct(grad(Lf).values);
  Vector r = half_L_gamma - cross - sg.curvature().K * d2;
  if (sg.curvature().N) r -= Lf.values.cwiseProduct(Lf.values) / *sg.curvature().N;
  return ScalarField(g, r);
}

ScalarField li_yau_margin(const Semigroup& sg, double t, const ScalarField& f) {
  if (sg.kind() != SemigroupKind::euclidean) throw std::invalid_argument("li_yau_margin: euclidean semigroup required");
  if (!(t > 0)) throw std::domain_error("li_yau_margin: t must be positive");
  if ((f.values.array() <= 0).any()) throw std::domain_error("li_yau_margin: f must be positive");
  const Jet j = apply_jet(sg, t, f);
  const double N = sg.curvature().N.value_or(1.0);
  Vector m(j.value.size());
  for (Index i = 0; i < m.size(); ++i) {
    const double a = j.d1[i] / j.value[i];
    m[i] = N / (2 * t) - (a * a - j.d2[i] / j.value[i]);
  }
  return ScalarField(sg.grid(), m);
}

double outside_mass(const Semigroup& sg, double t, Index y) {
  if (sg.kind() == SemigroupKind::generic_diffusion || t == 0) return 0.0;
  const Grid& g = sg.grid();
  const bool ou = sg.kind() == SemigroupKind::ornstein_uhlenbeck;
  const double sd = ou ? ou_sd(t) : std::sqrt(2 * t);
  const double c = ou ? std::exp(-t) * g.coord(y) : g.coord(y);
  return normal_cdf((g.lower() - c) / sd) + normal_sf((g.upper() - c) / sd);
}

}  // namespace harnack
