#include "harnack/families.hpp"
#include "harnack/scalar.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace harnack {

namespace {

constexpr double pi = 3.14159265358979323846;

std::uint64_t member_seed(std::uint64_t seed, const std::string& tag) { return fnv1a(tag, fnv1a(family_version) ^ seed); }

// Random trigonometric field; periodic on a circle grid (integer frequencies in
// units of 2 pi / L), bounded by |a| + |b| + |c| on a line.
std::function<double(double)> random_trig(const Grid& g, std::uint64_t seed) {
  PortableRng r(seed);
  const double a = r.uniform(-1, 1), b = r.uniform(-1, 1), c = r.uniform(-0.5, 0.5), p = r.uniform(-pi, pi);
  const double w = g.is_circle() ? 2 * pi / g.length() : 1.0;
  return [=](double x) { return a * std::sin(w * x + p) + b * std::cos(2 * w * x) + c * std::sin(3 * w * x - p); };
}

FunctionMember make(const Grid& g, std::string id, const std::function<double(double)>& fn) {
  return {std::move(id), sample(g, fn)};
}

}  // namespace

std::uint64_t PortableRng::next() {
  std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a(const std::string& text, std::uint64_t h) {
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 1099511628211ull;
  }
  return h;
}

bool is_function_family(const std::string& name) {
  return name == "positive" || name == "nonneg" || name == "unit" || name == "bounded";
}

std::vector<FunctionMember> function_family(const std::string& name, const Grid& g, std::uint64_t seed) {
  std::vector<FunctionMember> out;
  const bool circ = g.is_circle();
  const double w = circ ? 2 * pi / g.length() : 1.0;
  const double mid = circ ? g.lower() + g.length() / 2 : 0.0;
  auto rnd = [&](const char* tag) { return random_trig(g, member_seed(seed, std::string(name) + "/" + tag)); };

  if (name == "positive" || name == "nonneg") {
    out.push_back(make(g, "one_plus_half_sin", [=](double x) { return 1 + 0.5 * std::sin(w * x); }));
    out.push_back(make(g, "gaussian_plus_floor", [=](double x) { return 0.2 + std::exp(-(x - mid) * (x - mid) / 2); }));
    if (circ) {
      out.push_back(make(g, "exp_cos", [=](double x) { return std::exp(std::cos(w * x)); }));
    } else {
      out.push_back(make(g, "exp_linear", [](double x) { return std::exp(0.5 * x); }));
      out.push_back(make(g, "logistic_plus_floor", [](double x) { return 0.1 + 1 / (1 + std::exp(-2 * x)); }));
    }
    const auto r = rnd("random");
    out.push_back(make(g, "random_exp", [=](double x) { return std::exp(0.5 * r(x)); }));
    if (name == "nonneg") {
      out.push_back(make(g, "gaussian_density", [=](double x) { return normal_pdf((x - mid) / 0.5) / 0.5; }));
      out.push_back(make(g, "clipped_parabola", [=](double x) { return std::max(0.0, 1 - (x - mid) * (x - mid)); }));
      out.push_back(make(g, "mollified_indicator", [=](double x) { return normal_cdf((1 - std::abs(x - mid)) / 0.1); }));
      if (circ) out.push_back(make(g, "positive_part_cos", [=](double x) { return std::max(0.0, std::cos(w * x)); }));
    }
  } else if (name == "unit") {
    out.push_back(make(g, "quarter_sin", [=](double x) { return 0.5 + 0.25 * std::sin(w * x); }));
    out.push_back(make(g, "half_cos2", [=](double x) { return 0.5 + 0.45 * std::cos(2 * w * x); }));
    if (circ) {
      out.push_back(make(g, "phi_of_sin", [=](double x) { return normal_cdf(2 * std::sin(w * x)); }));
    } else {
      out.push_back(make(g, "phi", [](double x) { return normal_cdf(x); }));
      out.push_back(make(g, "phi_steep", [](double x) { return normal_cdf(2 * x - 1); }));
      out.push_back(make(g, "logistic", [](double x) { return 1 / (1 + std::exp(-x)); }));
    }
    const auto r = rnd("random");
    out.push_back(make(g, "random_phi", [=](double x) { return normal_cdf(1.5 * r(x)); }));
  } else if (name == "bounded") {
    out.push_back(make(g, "sin", [=](double x) { return std::sin(w * x); }));
    out.push_back(make(g, "clipped_quadratic", [=](double x) { return std::min((x - mid) * (x - mid), circ ? 2.0 : 4.0); }));
    out.push_back(make(g, "gaussian_bump", [=](double x) { return std::exp(-(x - mid) * (x - mid)); }));
    out.push_back(make(g, "clipped_abs", [=](double x) { return std::min(0.5 * std::abs(x - mid), 1.5); }));
    if (!circ) out.push_back(make(g, "affine", [](double x) { return 0.3 * x + 0.1; }));
    const auto r1 = rnd("random1");
    const auto r2 = rnd("random2");
    out.push_back(make(g, "random_smooth_1", r1));
    out.push_back(make(g, "random_smooth_2", r2));
  } else {
    throw std::invalid_argument("unknown function family '" + name + "'");
  }
  return out;
}

std::vector<SetMember> set_family(const Grid& g) {
  if (g.is_circle()) {
    const double o = g.lower(), L = g.length(), a = L / (2 * pi);
    return {
        {"arc", IntervalSet::circle(o, L, {{o + 1.0 * a, o + 2.0 * a}})},
        {"two_arcs", IntervalSet::circle(o, L, {{o + 0.5 * a, o + 1.0 * a}, {o + 3.0 * a, o + 4.5 * a}})},
        {"wrapping_arc", IntervalSet::circle(o, L, {{o + 5.5 * a, o + 7.0 * a}})},
    };
  }
  constexpr double inf = std::numeric_limits<double>::infinity();
  return {
      {"lower_half_line", IntervalSet::line({{-inf, 0.0}})},
      {"upper_half_line", IntervalSet::line({{0.5, inf}})},
      {"interval", IntervalSet::line({{-1.0, 1.0}})},
      {"two_intervals", IntervalSet::line({{-2.0, -1.2}, {0.3, 0.8}})},
  };
}

std::vector<DensityMember> density_family(const Measure& mu, std::uint64_t seed) {
  const Grid& g = mu.grid();
  std::vector<DensityMember> out;
  auto add = [&](std::string id, const std::function<double(double)>& fn) {
    out.push_back({std::move(id), DensityField::normalize(sample(g, fn), mu)});
  };
  const auto r = random_trig(g, member_seed(seed, "densities/random"));
  if (g.is_circle()) {
    const double w = 2 * pi / g.length();
    add("uniform", [](double) { return 1.0; });
    add("cos_bump", [=](double x) { return 1 + 0.5 * std::cos(w * x - 1.0); });
    add("two_mode", [=](double x) { return 1 + 0.3 * std::sin(2 * w * x) + 0.2 * std::cos(w * x); });
    add("random_exp", [=](double x) { return std::exp(0.6 * r(x)); });
  } else if (mu.probability()) {
    // f = dN(m, 1)/dgamma = e^{mx - m^2/2}
    for (double m : {0.5, -1.0, 1.5}) {
      char id[32];
      std::snprintf(id, sizeof id, "gaussian_ratio_%+.1f", m);
      add(id, [m](double x) { return std::exp(m * x - m * m / 2); });
    }
    add("random_exp", [=](double x) { return std::exp(0.5 * r(x)); });
  } else {
    add("normal_0_1", [](double x) { return normal_pdf(x); });
    add("normal_1_0.7", [](double x) { return normal_pdf((x - 1) / 0.7) / 0.7; });
    add("normal_-0.5_1.3", [](double x) { return normal_pdf((x + 0.5) / 1.3) / 1.3; });
    add("normal_mixture", [](double x) { return 0.5 * normal_pdf(x + 1) + 0.5 * normal_pdf((x - 1.5) / 0.6) / 0.6; });
  }
  return out;
}

std::vector<FunctionMember> potential_family(const Grid& g, std::uint64_t seed, int count) {
  std::vector<FunctionMember> out;
  for (int k = 0; k < count; ++k) {
    const std::string id = "potential_" + std::to_string(k);
    const auto r = random_trig(g, member_seed(seed, "potentials/" + id));
    PortableRng q(member_seed(seed, "potentials/scale/" + id));
    const double scale = q.uniform(0.2, 3.0);
    out.push_back(make(g, id, [=](double x) { return scale * r(x); }));
  }
  return out;
}

}  // namespace harnack
