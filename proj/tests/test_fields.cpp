#include <doctest.h>

#include "harnack/grid.hpp"
#include "harnack/semigroup.hpp"

#include <cmath>
#include <random>
#include <sstream>

using namespace harnack;

namespace {
constexpr double pi = 3.14159265358979323846;
}

TEST_SUITE("domain_fields") {

TEST_CASE("grid construction and distances") {
  const Grid g = Grid::line(-1, 1, 21);
  CHECK(g.spacing() == doctest::Approx(0.1));
  CHECK(g.distance(Index(3), Index(3)) == 0.0);
  CHECK(g.distance(Index(0), Index(20)) == doctest::Approx(2.0));
  CHECK_THROWS(Grid::line(0, 1, 8));
  CHECK_THROWS(Grid::line(1, 0, 32));
  const Grid c = Grid::circle(10, 100);
  CHECK(c.distance(1.0, 9.0) == doctest::Approx(2.0));
  CHECK(c.distance(0.0, 5.0) == doctest::Approx(5.0));
  CHECK(c.distance(Index(10), Index(90)) == doctest::Approx(2.0));
  CHECK(c.distance(Index(0), Index(50)) == doctest::Approx(5.0));
  // symmetry and triangle inequality on random node triples
  std::mt19937_64 rng(3);
  std::uniform_int_distribution<Index> pick(0, 99);
  for (int k = 0; k < 500; ++k) {
    const Index a = pick(rng), b = pick(rng), d = pick(rng);
    CHECK(c.distance(a, b) == c.distance(b, a));
    CHECK(c.distance(a, d) <= c.distance(a, b) + c.distance(b, d) + 1e-12);
  }
  CHECK(g.refined().size() == 41);
  CHECK(c.refined().size() == 200);
  CHECK(g.refined().coord(2) == doctest::Approx(g.coord(1)));
}

TEST_CASE("gradient") {
  const Grid g = Grid::line(-2, 3, 51);
  const ScalarField c = sample(g, [](double) { return 4.0; });
  CHECK(grad(c).values.cwiseAbs().maxCoeff() == 0.0);
  const ScalarField lin = sample(g, [](double x) { return x; });
  const Vector d = grad(lin).values;
  for (Index i = 0; i < g.size(); ++i) CHECK(d[i] == doctest::Approx(1.0).epsilon(1e-12));
  const double L = 7.0;
  auto err = [&](Index n) {
    const Grid cg = Grid::circle(L, n);
    const ScalarField f = sample(cg, [&](double x) { return std::sin(2 * pi * x / L); });
    const Vector dd = grad(f).values;
    double e = 0;
    for (Index i = 0; i < n; ++i) e = std::max(e, std::abs(dd[i] - 2 * pi / L * std::cos(2 * pi * cg.coord(i) / L)));
    return e;
  };
  for (Index n : {32, 64, 128}) CHECK(err(n) / err(2 * n) >= 3.5);
}

TEST_CASE("entropy") {
  const Grid c = Grid::circle(2 * pi, 16);
  const Measure mu = Measure::weighted(c, Vector::Zero(16), true);
  CHECK(std::abs(mu.weights().sum() - 1) < 1e-10);
  const DensityField one = DensityField::normalize(ScalarField(c, Vector::Ones(16)), mu);
  CHECK(std::abs(entropy(one)) < 1e-15);
  Vector two(16);
  for (Index i = 0; i < 16; ++i) two[i] = i % 2 ? 2.0 : 0.0;
  const DensityField f2 = DensityField::normalize(ScalarField(c, two), mu);
  CHECK(entropy(f2) == doctest::Approx(std::log(2.0)).epsilon(1e-14));
  const Grid g = Grid::line(-10, 10, 4001);
  const Measure leb = Measure::lebesgue(g);
  const DensityField gauss = DensityField::from_lebesgue(g, [](double x) { return std::exp(-x * x / 2); }, leb);
  CHECK(std::abs(entropy(gauss) + 0.5 * std::log(2 * pi * std::exp(1.0))) < 1e-4);
  // Jensen on random densities against a probability measure
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> u(0, 3);
  for (int k = 0; k < 20; ++k) {
    Vector v(16);
    for (auto& x : v) x = u(rng);
    CHECK(entropy(DensityField::normalize(ScalarField(c, v), mu)) >= -1e-10);
  }
  CHECK_THROWS(DensityField::normalize(ScalarField(c, -Vector::Ones(16)), mu));
}

TEST_CASE("fisher information") {
  const Grid c = Grid::circle(2 * pi, 64);
  const Measure mu = Measure::weighted(c, Vector::Zero(64), true);
  const auto one = fisher_info(DensityField::normalize(ScalarField(c, Vector::Ones(64)), mu));
  CHECK(one.value == 0.0);
  CHECK(one.floor_hits == 0);
  auto gauss_fisher = [](double s) {
    const Grid g = Grid::line(-10 * s, 10 * s, 4001);
    const Measure leb = Measure::lebesgue(g);
    return fisher_info(DensityField::from_lebesgue(g, [s](double x) { return std::exp(-x * x / (2 * s * s)); }, leb));
  };
  CHECK(std::abs(gauss_fisher(1.0).value - 1.0) < 1e-3);
  CHECK(std::abs(gauss_fisher(0.5).value - 4.0) < 4e-3);
  CHECK(gauss_fisher(1.0).value / gauss_fisher(2.0).value == doctest::Approx(4.0).epsilon(1e-3));
  Vector v = Vector::Zero(64);
  v[10] = 1.0;
  const auto spike = fisher_info(DensityField::normalize(ScalarField(c, v), mu));
  CHECK(spike.floor_hits > 0);
}

TEST_CASE("neighborhoods") {
  const Grid g = Grid::line(-5, 5, 101);
  const RegionMask half = RegionMask::from_predicate(g, [](double x) { return x <= 0; });
  CHECK((neighborhood(half, 0.0).member == half.member).all());
  const RegionMask n1 = neighborhood(half, 1.0);
  const RegionMask expect = RegionMask::from_predicate(g, [](double x) { return x <= 1 + 1e-9; });
  CHECK((n1.member == expect.member).all());
  const Grid c = Grid::circle(10, 100);
  const RegionMask arc = RegionMask::from_predicate(c, [](double x) { return x >= 2 && x <= 5; });
  CHECK(neighborhood(arc, 4.0).member.all());
  CHECK_FALSE(neighborhood(arc, 1.0).member.all());
  // monotone and composition up to a cell
  std::mt19937_64 rng(5);
  std::bernoulli_distribution coin(0.05);
  for (int k = 0; k < 20; ++k) {
    Mask m(100);
    for (auto& b : m) b = coin(rng);
    m[0] = true;
    const RegionMask A(c, m);
    const double a = 0.35, b = 0.73;
    const RegionMask na = neighborhood(A, a), nb = neighborhood(A, a + b);
    CHECK((na.member <= nb.member).all());
    const RegionMask nab = neighborhood(na, b);
    CHECK((nb.member <= nab.member).all());
    CHECK((nab.member <= neighborhood(A, a + b + c.spacing()).member).all());
  }
}

TEST_CASE("interval sets") {
  const auto inf = std::numeric_limits<double>::infinity();
  const IntervalSet half = IntervalSet::line({{-inf, 0.0}});
  const IntervalSet d = half.dilate(1.5);
  CHECK(d.parts().size() == 1);
  CHECK(d.parts()[0].hi == 1.5);
  const IntervalSet comp = half.complement();
  CHECK(comp.parts()[0].lo == 0.0);
  CHECK(comp.parts()[0].hi == inf);
  const IntervalSet two = IntervalSet::line({{0, 1}, {2, 3}});
  CHECK(two.dilate(0.5).parts().size() == 1);
  CHECK(two.complement().parts().size() == 3);
  const IntervalSet arcs = IntervalSet::circle(0, 10, {{9, 11}, {4, 5}});
  CHECK(arcs.contains(0.5));
  CHECK(arcs.contains(9.5));
  CHECK_FALSE(arcs.contains(3.0));
  CHECK(arcs.dilate(3).full());
  CHECK(arcs.complement().overlap(0, 10) == doctest::Approx(7.0));
  const Grid g = Grid::line(-5, 5, 101);
  const RegionMask m = RegionMask::from_predicate(g, [](double x) { return x <= 0 || (x >= 2 && x <= 3); });
  const IntervalSet back = IntervalSet::from_mask(m);
  CHECK(back.parts().size() == 2);
  CHECK(back.parts()[0].lo == -inf);
  CHECK((back.to_mask(g).member == m.member).all());
}

TEST_CASE("kernel distribution functions") {
  const Grid g = Grid::line(-10, 10, 4001);
  const Semigroup heat = Semigroup::euclidean(g);
  const ScalarField c = sample(g, [](double) { return 3.0; });
  const auto Fc = kernel_cdf(heat, 0.5, c, g.nearest(0.0));
  CHECK(Fc.atoms() == 1);
  CHECK(Fc.at(2.999) == 0.0);
  CHECK(Fc.at(3.0) == 1.0);
  const ScalarField x = sample(g, [](double v) { return v; });
  for (double t : {0.5, 1.0}) {
    const auto F = kernel_cdf(heat, t, x, g.nearest(0.0));
    double worst = 0;
    for (Index j = 1500; j < 2500; ++j) {
      const double r = g.coord(j) + 0.5 * g.spacing();
      worst = std::max(worst, std::abs(F.at(r) - normal_cdf(r / std::sqrt(2 * t))));
    }
    CHECK(worst < 1e-6);
    CHECK(std::abs(F.mean() - apply(heat, t, x).values[g.nearest(0.0)]) < 1e-8);
  }
  const Semigroup ou = Semigroup::ornstein_uhlenbeck(Grid::line(-10, 10, 2001));
  const Grid cg = Grid::circle(2 * pi, 128);
  Vector V(128);
  for (Index i = 0; i < 128; ++i) V[i] = 0.5 * std::cos(cg.coord(i));
  const Semigroup diff = Semigroup::diffusion(cg, V);
  for (double t : {1e-3, 0.1, 1.0, 10.0}) {
    CHECK(std::abs(kernel_row(heat, t, 2000).sum() - 1) < 1e-8);
    CHECK(std::abs(kernel_row(ou, t, 1300).sum() - 1) < 1e-8);
    CHECK(std::abs(kernel_row(diff, t, 17).sum() - 1) < 1e-8);
  }
  const ScalarField sx = sample(ou.grid(), [](double v) { return std::sin(v); });
  const auto Fo = kernel_cdf(ou, 0.7, sx, 1100);
  CHECK(std::abs(Fo.mean() - apply_at(ou, 0.7, sx, 1100)) < 1e-8);
  CHECK(std::abs(Fo.at(1.0) - 1.0) < 1e-12);
  ScalarField zero_tail = sample(g, [](double) { return 1.0; }, Tail::zero);
  (void)zero_tail;
}

TEST_CASE("columnar serialization round trip") {
  const Grid g = Grid::line(-1, 1, 17);
  const ScalarField f = sample(g, [](double x) { return std::exp(x) / 3; });
  std::stringstream ss;
  write_columns(ss, f);
  const ScalarField back = read_columns(ss, g);
  CHECK((back.values - f.values).cwiseAbs().maxCoeff() == 0.0);
  std::stringstream bad("0 1\n");
  CHECK_THROWS(read_columns(bad, g));
  std::stringstream ms;
  write_columns(ms, RegionMask::from_predicate(g, [](double x) { return x < 0; }));
  CHECK(ms.str().find(" 1\n") != std::string::npos);
}

TEST_CASE("distribution function invariants") {
  Vector v(5), w(5);
  v << 2, 1, 2, 0, 1;
  w << 0.1, 0.2, 0.3, 0.25, 0.15;
  const auto F = distribution_from_weights(v, w);
  CHECK(F.atoms() == 3);
  CHECK(F.at(-1) == 0.0);
  CHECK(F.at(0) == doctest::Approx(0.25));
  CHECK(F.at(1.5) == doctest::Approx(0.6));
  CHECK(F.at(2) == 1.0);
  CHECK(F.tail[1] == doctest::Approx(0.4));
  CHECK(F.mean() == doctest::Approx(0.35 + 0.8));
}

}
