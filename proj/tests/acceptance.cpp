// Acceptance criteria, one per invocation: `acceptance <name> [campaign.yaml]`.
// Prints a single PASS/FAIL line and exits 0 or 1.
#include "harnack/campaign.hpp"
#include "harnack/families.hpp"
#include "harnack/hopf_lax.hpp"
#include "harnack/transport.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <string>

using namespace harnack;

namespace {

constexpr double pi = 3.14159265358979323846;

struct Outcome {
  bool ok = true;
  std::string detail;
  double limit_s = 0;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

// Phi^{-1}(P_t 1_A) is exactly affine with slope -1/sqrt(2t) for a half-line,
// and the Gaussian-profile Harnack bound is attained whenever y >= x.
Outcome half_space_equality() {
  Outcome o{true, "", 5};
  const SemigroupSpec spec = SemigroupSpec::defaults("euclidean");
  const Semigroup sg = spec.build();
  const Grid& g = sg.grid();
  const IntervalSet A = IntervalSet::line({{-INFINITY, 0.0}});
  double probit_err = 0, harnack_err = 0;
  for (double t : {0.1, 0.5, 2.0}) {
    const SetProbability p = apply_set(sg, t, A);
    const double rs = 1 / std::sqrt(2 * t);
    for (Index i = g.nearest(-3); i <= g.nearest(3); ++i)
      probit_err = std::max(probit_err, std::abs(probit_pair(p.mass[i], p.complement[i]) + g.coord(i) * rs));
    for (Index x = g.nearest(-3); x <= g.nearest(3); x += 25)
      for (Index y = x; y <= g.nearest(3); y += 25) {
        const double w = probit_pair(p.mass[y], p.complement[y]) + g.distance(x, y) * rs;
        harnack_err = std::max(harnack_err, std::abs(normal_cdf(w) - p.mass[x]));
      }
  }
  CheckConfig cfg;
  cfg.id = "isoperimetric_harnack";
  cfg.semigroup = spec;
  cfg.times = {0.1, 0.5, 2.0};
  cfg.points = {-3, -1.5, 0, 1.5, 3};
  cfg.only_member = "lower_half_line";
  cfg.components = {"gaussian_profile"};
  const CheckReport r = run_check(cfg);
  o.ok = probit_err <= 1e-6 && harnack_err <= 1e-6 && std::abs(r.margin) <= 1e-6 && r.verdict == Verdict::pass;
  o.detail = "probit error " + num(probit_err) + ", equality-pair error " + num(harnack_err) + ", registry margin " +
             num(r.margin);
  return o;
}

Outcome ou_closed_forms() {
  Outcome o{true, "", 30};
  const Semigroup ou = SemigroupSpec::defaults("ornstein_uhlenbeck").build();
  const Grid& g = ou.grid();
  const ScalarField id = sample(g, [](double x) { return x; });
  double mean_err = 0;
  for (double t : {0.1, 0.5, 1.0, 2.0}) {
    const ScalarField p = apply(ou, t, id);
    for (Index i = g.nearest(-3); i <= g.nearest(3); ++i)
      mean_err = std::max(mean_err, std::abs(p[i] - std::exp(-t) * g.coord(i)));
  }
  // The nodal Fisher information of e^{mx} overshoots by a factor (sinh(mh)/mh)^2,
  // 2.7e-4 at m = 2 on the default grid, so HWI is measured at half the spacing.
  const Semigroup ou_fine = SemigroupSpec::defaults("ornstein_uhlenbeck").refined().build();
  auto ratio = [](const Semigroup& s, double m) {
    return DensityField::normalize(sample(s.grid(), [m](double x) { return std::exp(m * x - m * m / 2); }), s.measure());
  };
  const DensityField one =
      DensityField::normalize(ScalarField(ou_fine.grid(), Vector::Ones(ou_fine.grid().size())), ou_fine.measure());
  double hwi_err = 0, kuwada_err = 0;
  for (double m : {0.5, 1.0, 2.0}) {
    const DensityField h = ratio(ou_fine, m);
    const double hwi = w2(h, one) * std::sqrt(fisher_info(h).value) - entropy(h);
    hwi_err = std::max(hwi_err, std::abs(hwi - m * m / 2));
    const DensityField f = ratio(ou, m);
    for (double t : {0.1, 0.5, 1.0}) {
      const double ref = m * m * (t * (1 - std::exp(-2 * t)) / 2 - std::pow(1 - std::exp(-t), 2));
      kuwada_err = std::max(kuwada_err, std::abs(kuwada_gap(ou, f, t) - ref));
    }
  }
  o.ok = mean_err <= 1e-8 && hwi_err <= 1e-4 && kuwada_err <= 1e-4;
  o.detail = "P_t x error " + num(mean_err) + ", HWI error " + num(hwi_err) + ", Kuwada error " + num(kuwada_err);
  return o;
}

Outcome inf_convolution_oracle() {
  Outcome o{true, "", 20};
  PortableRng rng(77);
  double worst = 0;
  int fields = 0;
  const Index sizes[] = {257, 1024, 4096};
  for (int k = 0; k < 200; ++k) {
    const Index n = sizes[k % 3];
    const Grid g = (k / 3) % 2 ? Grid::circle(2 * pi, n) : Grid::line(-4, 4, n);
    Vector v(n);
    if (k % 4 == 0) {
      for (Index i = 0; i < n; ++i) v[i] = rng.uniform(-1, 1);
    } else {
      const double a = rng.uniform(-1, 1), b = rng.uniform(-1, 1), c = rng.uniform(-1, 1), p = rng.uniform(-pi, pi);
      for (Index i = 0; i < n; ++i) {
        const double x = g.coord(i);
        v[i] = a * std::sin(x + p) + b * std::cos(2 * x) + c * std::sin(3 * x - p);
      }
    }
    const ScalarField f(g, v);
    const double s = rng.uniform(0.02, 2.0);
    worst = std::max(worst, (inf_conv(f, s).field.values - inf_conv_reference(f, s).field.values).cwiseAbs().maxCoeff());
    ++fields;
  }
  o.ok = worst <= 1e-12;
  o.detail = std::to_string(fields) + " fields, max difference " + num(worst);
  return o;
}

Outcome gaussian_w2() {
  Outcome o{true, "", 10};
  const Grid g = Grid::line(-20, 20, 8001);
  const Measure leb = Measure::lebesgue(g);
  auto gauss = [&](double m, double s) {
    return DensityField::from_lebesgue(g, [=](double x) { return normal_pdf((x - m) / s) / s; }, leb);
  };
  const DensityField ref = gauss(-0.5, 1.0);
  double worst = 0;
  for (double m : {-1.0, 0.5, 2.0})
    for (double s : {0.5, 1.5, 2.5}) {
      const double exact = std::hypot(m + 0.5, s - 1.0);
      worst = std::max(worst, std::abs(w2(ref, gauss(m, s)) - exact) / exact);
    }
  o.ok = worst <= 1e-4;
  o.detail = "max relative error " + num(worst) + " over 3x3 (mean, sd)";
  return o;
}

CampaignConfig campaign_from(const std::string& path) { return path.empty() ? default_campaign() : load_campaign(path); }

Outcome default_campaign_passes(const std::string& path) {
  Outcome o{true, "", 300};
  CampaignConfig cfg = campaign_from(path);
  cfg.refinement = false;
  const CampaignResult r = run_campaign(cfg);
  int pass = 0;
  std::string bad;
  for (const CheckReport& rep : r.reports) {
    if (rep.verdict == Verdict::pass) ++pass;
    else bad += " " + rep.id + "(" + to_string(rep.verdict) + " " + num(rep.margin) + ")";
  }
  o.ok = pass == int(r.reports.size()) && !r.reports.empty();
  o.detail = std::to_string(pass) + "/" + std::to_string(r.reports.size()) + " reports pass" + bad;
  return o;
}

Outcome refinement_discipline(const std::string& path) {
  Outcome o{true, "", 600};
  const CampaignResult r = run_campaign(campaign_from(path));
  int exempt = 0;
  std::string moves;
  for (const CheckReport& rep : r.reports) {
    if (rep.margin < 0 && rep.margin >= -roundoff_floor) ++exempt;
    if (rep.refined_margin) moves += " " + rep.id + " " + num(rep.margin) + "->" + num(*rep.refined_margin);
  }
  o.ok = r.refinement_ok && !r.any_failed();
  o.detail = std::to_string(r.refinement_improved) + "/" + std::to_string(r.refinement_candidates) +
             " candidates improved;" + moves + "; " + std::to_string(exempt) + " at roundoff level";
  return o;
}

// Equal-variance Gaussians stay equal-variance under OU and their means decay
// like e^{-t}, so W2 contracts by exactly e^{-t}.
Outcome ou_contraction_rate() {
  Outcome o{true, "", 30};
  const Semigroup ou = SemigroupSpec::defaults("ornstein_uhlenbeck").build();
  const Grid& g = ou.grid();
  auto shifted = [&](double m) {
    return DensityField::from_lebesgue(g, [m](double x) { return normal_pdf(x - m); }, ou.measure());
  };
  const DensityField mu = shifted(-0.75), nu = shifted(1.25);
  const double w0 = w2(mu, nu);
  double worst = 0;
  for (double t : {0.25, 0.5, 1.0}) {
    const double ratio = w2(evolve_density(ou, t, mu), evolve_density(ou, t, nu)) / w0;
    worst = std::max(worst, std::abs(ratio - std::exp(-t)));
  }
  o.ok = worst <= 1e-3;
  o.detail = "max |ratio - e^{-t}| " + num(worst);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc < 2) {
    std::fprintf(stderr, "usage: acceptance <criterion> [campaign.yaml]\n");
    return 2;
  }
  const std::string name = argv[1];
  const std::string config = argc > 2 ? argv[2] : "";
  const std::map<std::string, std::function<Outcome()>> criteria = {
      {"half_space_equality", half_space_equality},
      {"ou_closed_forms", ou_closed_forms},
      {"inf_convolution_oracle", inf_convolution_oracle},
      {"gaussian_w2", gaussian_w2},
      {"default_campaign", [&] { return default_campaign_passes(config); }},
      {"refinement_discipline", [&] { return refinement_discipline(config); }},
      {"ou_contraction_rate", ou_contraction_rate},
  };
  const auto it = criteria.find(name);
  if (it == criteria.end()) {
    std::fprintf(stderr, "unknown criterion %s\n", name.c_str());
    return 2;
  }
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = it->second();
  } catch (const std::exception& e) {
    o.ok = false;
    o.detail = std::string("exception: ") + e.what();
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  const bool in_time = o.limit_s == 0 || secs < o.limit_s;
  std::printf("%s %s: %s; %.1f s (limit %.0f s)\n", o.ok && in_time ? "PASS" : "FAIL", name.c_str(), o.detail.c_str(),
              secs, o.limit_s);
  return o.ok && in_time ? 0 : 1;
}
