// Hopf-Lax commutation, hypercontractivity and the transport-entropy checks.
#include "check_context.hpp"
#include "harnack/hopf_lax.hpp"
#include "harnack/transport.hpp"

#include <cmath>

namespace harnack::detail {

namespace {

Vector P(const CheckContext& c, double t, const Vector& v) { return apply(c.sg, t, ScalarField(c.g, v)).values; }

void require_probability(const CheckContext& c, const char* what) {
  if (!c.sg.measure().probability()) throw ConfigError(c.cfg.id + ": " + what + " needs a probability reference measure");
}

void require_nonnegative_curvature(const CheckContext& c) {
  if (c.K < 0) throw ConfigError(c.cfg.id + ": stated under non-negative curvature, the semigroup has K < 0");
}

DensityField uniform(const CheckContext& c) {
  return DensityField::normalize(ScalarField(c.g, Vector::Ones(c.g.size())), c.sg.measure());
}

double sq(double v) { return v * v; }

struct Pair {
  std::string id;
  const DensityMember* f;
  const DensityMember* g;
};

std::vector<Pair> density_pairs(const CheckContext& c, const std::vector<DensityMember>& ds, bool diagonal,
                                bool ordered) {
  std::vector<Pair> out;
  for (size_t i = 0; i < ds.size(); ++i)
    for (size_t j = 0; j < ds.size(); ++j) {
      if ((i == j && !diagonal) || (j < i && !ordered)) continue;
      Pair p{ds[i].id + "|" + ds[j].id, &ds[i], &ds[j]};
      if (c.wanted(p.id)) out.push_back(p);
    }
  return out;
}

Location where(const std::string& member, double t, double s = nan) {
  Location l;
  l.member = member;
  l.t = t;
  l.s = s;
  return l;
}

}  // namespace

void check_commutation(CheckContext& c) {
  const auto N = c.sg.curvature().N;
  Component* hl = c.component("hopf_lax", true);
  Component* visc = c.component("viscous", true, c.K == 0, "stated at K = 0");
  Component* dim = c.component("dimensional", true, N.has_value(), "needs a finite dimension N");
  for (const auto& m : c.functions()) {
    std::vector<Vector> qs;
    for (double s : c.cfg.s_values) qs.push_back(inf_conv(m.f, s).field.values);
    const Vector q1 = inf_conv(m.f, 1.0).field.values;
    std::vector<Vector> vs;
    if (visc)
      for (double eps : c.cfg.epsilons) vs.push_back(viscous_infconv({eps, c.sg}, m.f, 1.0).values);
    for (double t : c.cfg.times) {
      const ScalarField pf(c.g, P(c, t, m.f.values));
      const Mask& ok = c.safe(t);
      for (size_t k = 0; hl && k < c.cfg.s_values.size(); ++k) {
        const double s = c.cfg.s_values[k];
        const Vector lhs = P(c, t, qs[k]);
        const Vector rhs = inf_conv(pf, std::exp(2 * c.K * t) * s).field.values;
        for (Index i = 0; i < c.g.size(); ++i) {
          if (!ok[i]) continue;
          Location l = c.at(m.id, i, t);
          l.s = s;
          c.offer(hl, rhs[i] - lhs[i], l);
        }
      }
      for (size_t k = 0; k < vs.size(); ++k) {
        const double eps = c.cfg.epsilons[k];
        const Vector lhs = P(c, t, vs[k]);
        const Vector rhs = viscous_infconv({eps, c.sg}, pf, 1.0).values;
        for (Index i = 0; i < c.g.size(); ++i) {
          if (!ok[i]) continue;
          Location l = c.at(m.id, i, t);
          l.param = eps;
          c.offer(visc, rhs[i] - lhs[i], l);
        }
      }
      if (!dim) continue;
      const Vector lhs = P(c, t, q1);
      for (double s : c.cfg.s_values) {
        const Vector rhs = inf_conv(ScalarField(c.g, P(c, s, m.f.values)), 1.0).field.values;
        const double slack = *N * sq(std::sqrt(t) - std::sqrt(s));
        const Mask& oks = c.safe(s);
        for (Index i = 0; i < c.g.size(); ++i) {
          if (!ok[i] || !oks[i]) continue;
          Location l = c.at(m.id, i, t);
          l.s = s;
          c.offer(dim, rhs[i] + slack - lhs[i], l);
        }
      }
    }
  }
}

void check_hypercontractivity(CheckContext& c) {
  if (c.K != 0) throw ConfigError("hypercontractivity: stated for K = 0 semigroups (euclidean or flat_circle)");
  Component* hc = c.component("pointwise", true);
  for (const auto& m : c.functions())
    for (double t : c.cfg.times) {
      const Vector q = inf_conv(m.f, 2 * t).field.values;
      const Vector lhs = log_apply(c.sg, t, q);
      const Vector rhs = P(c, t, m.f.values);
      const Mask& ok = c.safe(t);
      for (Index i = 0; i < c.g.size(); ++i)
        if (ok[i]) c.offer(hc, rhs[i] - lhs[i], c.at(m.id, i, t));
    }
}

void check_kantorovich_duality(CheckContext& c) {
  Component* wd = c.component("weak_duality", true);
  const auto ds = c.densities();
  const auto pots = potential_family(c.g, c.cfg.seed, 50);
  for (const Pair& p : density_pairs(c, ds, false, true))
    for (const auto& phi : pots) {
      const std::string id = p.id + "@" + phi.id;
      if (!c.wanted(id)) continue;
      c.offer(wd, kantorovich_gap(p.f->f, p.g->f, phi.f), where(id, nan));
    }
}

void check_entropy_transport(CheckContext& c) {
  require_probability(c, "entropy_transport");
  require_nonnegative_curvature(c);
  Component* et = c.component("entropy_transport", true);
  Component* two = c.component("two_density", true);
  Component* hwi = c.component("hwi", true);
  Component* kw = c.component("kuwada", true);
  const auto ds = c.densities();
  const DensityField one = uniform(c);
  for (const auto& d : ds) {
    if (!c.wanted(d.id)) continue;
    const double w = w2(d.f, one);
    if (hwi) {
      const FisherInfo fi = fisher_info(d.f);
      if (fi.floor_hits) c.flag("fisher_floor", fi.floor_hits);
      c.offer(hwi, w * std::sqrt(fi.value) - entropy(d.f), where(d.id, nan));
    }
    for (double t : c.cfg.times) {
      if (et) c.offer(et, w * w / (4 * t) - entropy(evolve_density(c.sg, t, d.f)), where(d.id, t));
      if (kw) c.offer(kw, kuwada_gap(c.sg, d.f, t), where(d.id, t));
    }
  }
  if (!two) return;
  for (const Pair& p : density_pairs(c, ds, false, true)) {
    const double w = w2(p.f->f, p.g->f);
    const double eg = entropy(p.g->f);
    for (double t : c.cfg.times)
      c.offer(two, w * w / (4 * t) + eg - entropy(evolve_density(c.sg, t, p.f->f)), where(p.id, t));
  }
}

void check_wasserstein_contraction(CheckContext& c) {
  const bool prob = c.sg.measure().probability();
  const auto N = c.sg.curvature().N;
  Component* sqc = c.component("squared_contraction", true, prob, "needs a probability reference measure");
  Component* printed = c.component("printed_form", false, prob, "needs a probability reference measure");
  Component* dim = c.component("dimensional", true, N.has_value(), "needs a finite dimension N");
  const auto ds = c.densities();
  if (sqc || printed)
    for (const Pair& p : density_pairs(c, ds, false, false)) {
      const double w0 = w2(p.f->f, p.g->f);
      for (double t : c.cfg.times) {
        const double wt = w2(evolve_density(c.sg, t, p.f->f), evolve_density(c.sg, t, p.g->f));
        const double decay = std::exp(-2 * c.K * t);
        c.offer(sqc, decay * w0 * w0 - wt * wt, where(p.id, t));
        c.offer(printed, decay * w0 - wt, where(p.id, t));
      }
    }
  if (!dim) return;
  for (const Pair& p : density_pairs(c, ds, true, true)) {
    const double w0 = w2(p.f->f, p.g->f);
    for (double t : c.cfg.times) {
      const DensityField ft = evolve_density(c.sg, t, p.f->f);
      for (double s : c.cfg.s_values) {
        const double w = w2(ft, evolve_density(c.sg, s, p.g->f));
        c.offer(dim, w0 * w0 + 2 * *N * sq(std::sqrt(t) - std::sqrt(s)) - w * w, where(p.id, t, s));
      }
    }
  }
}

void check_evi(CheckContext& c) {
  require_probability(c, "evi");
  require_nonnegative_curvature(c);
  // asserted at K = 0 only; with K > 0 the K = 0 form is reported
  const bool flat = c.K == 0;
  Component* evi = c.component("evi", flat);
  Component* dq = c.component("difference_quotient", false);
  const auto ds = c.densities();
  for (const Pair& p : density_pairs(c, ds, true, true)) {
    const double w0 = w2(p.f->f, p.g->f);
    const double eg = entropy(p.g->f);
    for (double t : c.cfg.times) {
      const DensityField ft = evolve_density(c.sg, t, p.f->f);
      const double wt = w2(ft, p.g->f);
      c.offer(evi, w0 * w0 + 2 * t * eg - wt * wt - 2 * t * entropy(ft), where(p.id, t));
    }
    if (!dq) continue;
    for (double t : {1e-2, 1e-3}) {
      const DensityField ft = evolve_density(c.sg, t, p.f->f);
      const double wt = w2(ft, p.g->f);
      c.offer(dq, eg - entropy(ft) - (wt * wt - w0 * w0) / (2 * t), where(p.id, t));
    }
  }
}

}  // namespace harnack::detail
