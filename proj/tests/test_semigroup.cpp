#include <doctest.h>

#include "harnack/semigroup.hpp"

#include <cmath>
#include <random>

using namespace harnack;

namespace {
constexpr double pi = 3.14159265358979323846;

double gauss(double x, double s) { return std::exp(-x * x / (2 * s * s)) / (s * std::sqrt(2 * pi)); }

Semigroup weighted_circle(Index n) {
  const Grid c = Grid::circle(2 * pi, n);
  Vector V(n);
  for (Index i = 0; i < n; ++i) V[i] = 0.5 * std::cos(c.coord(i));
  return Semigroup::diffusion(c, V);
}

double sup_diff(const Vector& a, const Vector& b, Index lo, Index hi) {
  return (a.segment(lo, hi - lo) - b.segment(lo, hi - lo)).cwiseAbs().maxCoeff();
}
}  // namespace

TEST_SUITE("semigroup_engine") {

TEST_CASE("identity at time zero and negative time") {
  const Grid g = Grid::line(-5, 5, 101);
  const ScalarField f = sample(g, [](double x) { return std::sin(x); });
  for (const Semigroup& sg : {Semigroup::euclidean(g), Semigroup::ornstein_uhlenbeck(g)}) {
    CHECK((apply(sg, 0.0, f).values - f.values).cwiseAbs().maxCoeff() == 0.0);
    CHECK_THROWS(apply(sg, -1.0, f));
  }
  const Semigroup d = weighted_circle(64);
  const ScalarField fc = sample(d.grid(), [](double x) { return std::cos(3 * x); });
  CHECK((apply(d, 0.0, fc).values - fc.values).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("Mehler closed forms") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(g);
  const ScalarField x = sample(g, [](double v) { return v; });
  for (double t : {0.1, 0.5, 1.0, 3.0}) {
    const Vector u = apply(ou, t, x).values;
    double worst = 0;
    for (Index i = 0; i < g.size(); ++i)
      if (std::abs(g.coord(i)) <= 3) worst = std::max(worst, std::abs(u[i] - std::exp(-t) * g.coord(i)));
    CHECK(worst < 1e-8);
  }
  // P_t e^{bx} = exp(b e^{-t} x + b^2 (1 - e^{-2t})/2)
  // piecewise-linear interpolation overshoots e^{bx} by about (bh)^2/8 relative
  const Grid fine = Grid::line(-10, 10, 8001);
  const Semigroup ouf = Semigroup::ornstein_uhlenbeck(fine);
  const double b = 1.5, t = 0.4;
  const Vector u = apply(ouf, t, sample(fine, [b](double v) { return std::exp(b * v); })).values;
  for (Index i = 2800; i <= 5200; i += 200) {
    const double ref = std::exp(b * std::exp(-t) * fine.coord(i) + b * b * (1 - std::exp(-2 * t)) / 2);
    CHECK(u[i] == doctest::Approx(ref).epsilon(3e-6));
  }
}

TEST_CASE("heat kernel convolves Gaussians") {
  const Grid g = Grid::line(-10, 10, 8001);
  const Semigroup heat = Semigroup::euclidean(g);
  for (double s : {0.5, 1.0}) {
    const ScalarField f = sample(g, [s](double x) { return gauss(x, s); });
    for (double t : {0.1, 0.5, 2.0}) {
      const Vector u = apply(heat, t, f).values;
      double worst = 0;
      for (Index i = 0; i < g.size(); ++i)
        worst = std::max(worst, std::abs(u[i] - gauss(g.coord(i), std::sqrt(s * s + 2 * t))));
      CHECK(worst < 1e-6);
    }
  }
}

TEST_CASE("semigroup law, symmetry, mass, contraction, positivity") {
  const Grid g = Grid::line(-10, 10, 4001);
  const auto bump = [](double x) { return std::exp(-(x - 0.5) * (x - 0.5)) * (1 + 0.3 * std::sin(2 * x)); };
  const auto bump2 = [](double x) { return std::exp(-(x + 1) * (x + 1) / 2); };
  std::vector<Semigroup> line_sgs = {Semigroup::euclidean(g), Semigroup::ornstein_uhlenbeck(Grid::line(-10, 10, 8001))};
  for (const Semigroup& sg : line_sgs) {
    CAPTURE(to_string(sg.kind()));
    const Grid& gg = sg.grid();
    const ScalarField f = sample(gg, bump), h = sample(gg, bump2);
    const Vector a = apply(sg, 0.3, apply(sg, 0.2, f)).values;
    const Vector b = apply(sg, 0.5, f).values;
    CHECK(sup_diff(a, b, 0, gg.size()) < 1e-6);
    const Vector& w = sg.measure().weights();
    const double lhs = (apply(sg, 0.7, f).values.cwiseProduct(h.values)).dot(w);
    const double rhs = (f.values.cwiseProduct(apply(sg, 0.7, h).values)).dot(w);
    CHECK(std::abs(lhs - rhs) < 1e-6);
    CHECK(std::abs(apply(sg, 0.7, f).values.dot(w) - f.values.dot(w)) < 1e-6);
    const ScalarField osc = sample(gg, [](double x) { return std::sin(3 * x) + 0.5 * std::cos(7 * x); });
    CHECK(apply(sg, 0.05, osc).values.cwiseAbs().maxCoeff() <= osc.values.cwiseAbs().maxCoeff() + 1e-10);
    const ScalarField ind = sample(gg, [](double x) { return x > 0 && x < 0.3 ? 1.0 : 0.0; });
    const Vector p = apply(sg, 0.01, ind).values;
    CHECK(p.minCoeff() >= -1e-12);
    CHECK(p.maxCoeff() <= 1 + 1e-10);
  }
  const Semigroup d = weighted_circle(256);
  const ScalarField f = sample(d.grid(), [](double x) { return 1 + std::sin(x) * std::cos(2 * x); });
  const ScalarField h = sample(d.grid(), [](double x) { return std::exp(std::cos(x - 1)); });
  const Vector a = apply(d, 0.3, apply(d, 0.2, f)).values;
  CHECK(sup_diff(a, apply(d, 0.5, f).values, 0, 256) < 1e-4);
  const Vector& w = d.measure().weights();
  CHECK(std::abs(apply(d, 0.7, f).values.cwiseProduct(h.values).dot(w) -
                 f.values.cwiseProduct(apply(d, 0.7, h).values).dot(w)) < 1e-6);
  CHECK(std::abs(apply(d, 0.7, f).values.dot(w) - f.values.dot(w)) < 1e-6);
  const ScalarField ind = project_set(d.grid(), IntervalSet::circle(0, 2 * pi, {{1.0, 1.4}}));
  const Vector p = apply(d, 0.05, ind).values;
  CHECK(p.minCoeff() >= -1e-12);
  CHECK(p.maxCoeff() <= 1 + 1e-10);
}

TEST_CASE("curvature certificate") {
  const Semigroup d = weighted_circle(128);
  CHECK(d.curvature().K <= d.certified_curvature());
  CHECK(d.curvature().K == doctest::Approx(-0.5).epsilon(1e-3));
  CHECK_THROWS(Semigroup::diffusion(d.grid(), d.potential(), 0.0));
  CHECK_NOTHROW(Semigroup::diffusion(d.grid(), d.potential(), -1.0));
  CHECK_THROWS(Semigroup::diffusion(Grid::line(0, 1, 32), Vector::Zero(32)));
  CHECK(Semigroup::euclidean(Grid::line(0, 1, 32)).curvature().N.value() == 1.0);
  CHECK_FALSE(Semigroup::ornstein_uhlenbeck(Grid::line(0, 1, 32)).curvature().N.has_value());
}

TEST_CASE("generator") {
  const Grid g = Grid::line(-4, 4, 161);
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(g);
  CHECK(generator(ou, sample(g, [](double) { return 2.0; })).values.cwiseAbs().maxCoeff() < 1e-12);
  const Vector L = generator(ou, sample(g, [](double x) { return x * x; })).values;
  for (Index i = 0; i < g.size(); ++i) CHECK(L[i] == doctest::Approx(2 - 2 * g.coord(i) * g.coord(i)).epsilon(1e-9));
  const Semigroup d = weighted_circle(4096);
  const ScalarField f = sample(d.grid(), [](double x) { return std::sin(x) + 0.3 * std::cos(2 * x + 1); });
  CHECK(std::abs(generator(d, f).values.dot(d.measure().weights())) < 1e-6);
  const Semigroup fine = Semigroup::ornstein_uhlenbeck(Grid::line(-10, 10, 8001));
  const ScalarField b = sample(fine.grid(), [](double x) { return std::exp(-(x - 1) * (x - 1)); });
  CHECK(std::abs(generator(fine, b).values.dot(fine.measure().weights())) < 1e-6);
}

TEST_CASE("gradient bound margins") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(g);
  const ScalarField x = sample(g, [](double v) { return v; });
  CHECK(gradient_bound_margin(ou, 0.0, x).values.cwiseAbs().maxCoeff() == 0.0);
  const Vector m = gradient_bound_margin(ou, 0.5, x).values;
  for (Index i = 0; i < g.size(); ++i)
    if (std::abs(g.coord(i)) <= 5) CHECK(std::abs(m[i]) < 1e-8);
  const Grid wide = Grid::line(-20, 20, 4001);
  const Semigroup heat = Semigroup::euclidean(wide);
  const Vector ms = gradient_bound_margin(heat, 0.5, sample(wide, [](double v) { return std::sin(v); })).values;
  CHECK(ms.minCoeff() >= -1e-6);
}

TEST_CASE("gamma two residuals") {
  const Grid g = Grid::line(-5, 5, 201);
  const Semigroup heat = Semigroup::euclidean(g);
  const Vector r = gamma2_margin(heat, sample(g, [](double x) { return 3 * x - 1; })).values;
  CHECK(r.cwiseAbs().maxCoeff() < 1e-9);
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(g);
  const Vector r2 = gamma2_margin(ou, sample(g, [](double x) { return x * x; })).values;
  for (Index i = 4; i < g.size() - 4; ++i) CHECK(r2[i] == doctest::Approx(4.0).epsilon(1e-8));
  const Semigroup d = weighted_circle(256);
  std::mt19937_64 rng(9);
  std::normal_distribution<double> nd;
  for (int k = 0; k < 10; ++k) {
    const double a1 = nd(rng), b1 = nd(rng), a2 = nd(rng) / 2, b2 = nd(rng) / 2;
    const ScalarField f = sample(d.grid(), [&](double x) {
      return a1 * std::cos(x) + b1 * std::sin(x) + a2 * std::cos(2 * x) + b2 * std::sin(2 * x);
    });
    CHECK(gamma2_margin(d, f).values.minCoeff() >= -1e-3);
  }
}

TEST_CASE("Li-Yau margins") {
  const Grid g = Grid::line(-10, 10, 4001);
  const Semigroup heat = Semigroup::euclidean(g);
  const Vector c = li_yau_margin(heat, 0.5, sample(g, [](double) { return 2.0; })).values;
  CHECK((c.array() - 1.0).abs().maxCoeff() < 1e-9);
  for (double s : {0.3, 1.0}) {
    const double t = 0.5;
    const Vector m = li_yau_margin(heat, t, sample(g, [s](double x) { return gauss(x, s); })).values;
    const double ref = 1 / (2 * t) - 1 / (s * s + 2 * t);
    for (Index i = 1400; i <= 2600; i += 100) CHECK(m[i] == doctest::Approx(ref).epsilon(1e-4));
  }
  const Vector mix =
      li_yau_margin(heat, 0.5, sample(g, [](double x) { return gauss(x - 1.5, 0.4) + 0.5 * gauss(x + 1, 0.2); })).values;
  CHECK(mix.segment(1000, 2001).minCoeff() >= -1e-5);
  CHECK_THROWS(li_yau_margin(Semigroup::ornstein_uhlenbeck(g), 0.5, sample(g, [](double) { return 1.0; })));
}

TEST_CASE("exact set probabilities") {
  const Grid g = Grid::line(-10, 10, 2001);
  const Semigroup heat = Semigroup::euclidean(g);
  const auto inf = std::numeric_limits<double>::infinity();
  const IntervalSet half = IntervalSet::line({{-inf, 0.0}});
  for (double t : {0.1, 0.5, 2.0}) {
    const SetProbability sp = apply_set(heat, t, half);
    for (Index i = 700; i <= 1300; ++i) {
      const double z = -g.coord(i) / std::sqrt(2 * t);
      CHECK(std::abs(probit_pair(sp.mass[i], sp.complement[i]) - z) < 1e-12);
      CHECK(sp.gradient[i] == doctest::Approx(-normal_pdf(z) / std::sqrt(2 * t)).epsilon(1e-12));
    }
  }
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(g);
  const IntervalSet I = IntervalSet::line({{-1.0, 1.0}});
  const SetProbability so = apply_set(ou, 0.5, I);
  const Vector viaField = apply(ou, 0.5, sample(g, [](double x) { return std::abs(x) <= 1 ? 1.0 : 0.0; })).values;
  CHECK(std::abs(so.mass[1000] + so.complement[1000] - 1) < 1e-14);
  CHECK(std::abs(so.mass[1000] - viaField[1000]) < 1e-2);
  const ScalarField proj = project_set(Grid::circle(10, 100), IntervalSet::circle(0, 10, {{2.0, 3.0}}));
  CHECK(proj.values[20] == doctest::Approx(0.5));
  CHECK(proj.values[25] == doctest::Approx(1.0));
  CHECK(proj.values.sum() * 0.1 == doctest::Approx(1.0));
}

TEST_CASE("log domain application") {
  const Grid g = Grid::line(-10, 10, 1001);
  const Semigroup heat = Semigroup::euclidean(g);
  // e^{-x^2/3} * N(0, 2t) = sqrt(1.5 / (1.5 + 2t)) e^{-x^2 / (2 (1.5 + 2t))}
  const double t = 0.4;
  const Vector a = sample(g, [](double x) { return -x * x / 3; }).values;
  const Vector logd = log_apply(heat, t, a);
  const Vector direct = apply(heat, t, ScalarField(g, a.array().exp().matrix())).values.array().log().matrix();
  double worst = 0, worst_direct = 0;
  for (Index i = 100; i <= 900; ++i) {
    const double x = g.coord(i), ref = 0.5 * std::log(1.5 / (1.5 + 2 * t)) - x * x / (2 * (1.5 + 2 * t));
    worst = std::max(worst, std::abs(logd[i] - ref));
    worst_direct = std::max(worst_direct, std::abs(direct[i] - ref));
  }
  CHECK(worst < 1e-4);
  CHECK(worst <= worst_direct);
  // linear exponents are integrated exactly: P_t e^{bx} = e^{bx + b^2 t}
  const Vector lin = log_apply(heat, t, sample(g, [](double x) { return 0.7 * x; }).values);
  for (Index i = 400; i <= 600; ++i) CHECK(std::abs(lin[i] - (0.7 * g.coord(i) + 0.49 * t)) < 1e-12);
  const Vector big = log_apply(heat, t, (a * 1000).eval());
  CHECK(big.allFinite());
}

}
