// Gaussian-profile checks: reverse isoperimetry, isoperimetric comparison and
// the set-valued Harnack inequality.
#include "check_context.hpp"

#include <cmath>

namespace harnack::detail {

namespace {

Vector P(const CheckContext& c, double t, const Vector& v) { return apply(c.sg, t, ScalarField(c.g, v)).values; }

bool interior(const Grid& g, Index i) { return g.is_circle() || (i >= 2 && i < g.size() - 2); }

std::vector<FunctionMember> unit_functions(CheckContext& c) {
  auto fs = c.functions();
  for (const auto& m : fs)
    if ((m.f.values.array() < 0).any() || (m.f.values.array() > 1).any())
      throw ConfigError(c.cfg.id + ": member '" + m.id + "' leaves [0, 1]");
  return fs;
}

std::vector<SetMember> nonempty_sets(CheckContext& c) {
  auto sets = c.sets();
  for (const auto& s : sets)
    if (s.set.empty()) throw ConfigError(c.cfg.id + ": set '" + s.id + "' is empty");
  return sets;
}

// Probits of (p, q) pairs; clamped nodes are marked unusable.
Vector probits(CheckContext& c, const Vector& p, const Vector& q, Mask& usable) {
  Vector z(p.size());
  for (Index i = 0; i < p.size(); ++i) {
    const ClampedProbit r = clamped_probit(std::max(p[i], 0.0), std::max(q[i], 0.0));
    z[i] = r.value;
    if (r.clamped && usable[i]) {
      usable[i] = false;
      c.flag("probit_clamped");
    }
  }
  return z;
}

double profile(double p, double q) { return iso_profile_pair(std::max(p, 0.0), std::max(q, 0.0)); }

// min over usable pairs of z(y) + d(x, y)/sqrt(sigma) - z(x)
void probit_lipschitz(CheckContext& c, Component* comp, const std::string& id, double t, const Vector& z,
                      const Mask& usable) {
  if (!comp) return;
  const double rs = 1 / std::sqrt(sigma(c.K, t));
  const Index n = c.g.size();
  for (Index x = 0; x < n; ++x) {
    if (!usable[x]) continue;
    double best = std::numeric_limits<double>::infinity();
    Index arg = x;
    for (Index y = 0; y < n; ++y) {
      if (!usable[y]) continue;
      const double m = z[y] + c.g.distance(x, y) * rs - z[x];
      if (m < best) {
        best = m;
        arg = y;
      }
    }
    c.offer(comp, best, c.at(id, x, arg, t));
  }
}

}  // namespace

void check_reverse_isoperimetry(CheckContext& c) {
  const auto fs = unit_functions(c);
  const auto sets = nonempty_sets(c);
  Component* prof = c.component("profile_gradient", true);
  Component* lip = c.component("probit_lipschitz", true);
  for (double t : c.cfg.times) {
    const double sig = sigma(c.K, t);
    for (const auto& m : fs) {
      const Jet j = apply_jet(c.sg, t, m.f);
      const Vector pc = P(c, t, (1.0 - m.f.values.array()).matrix());
      Vector If(c.g.size());
      for (Index i = 0; i < c.g.size(); ++i) If[i] = iso_profile(m.f[i]);
      const Vector pI = P(c, t, If);
      Mask usable = c.safe(t);
      for (Index i = 0; i < c.g.size(); ++i) {
        if (!usable[i] || !interior(c.g, i)) continue;
        const double I = profile(j.value[i], pc[i]);
        c.offer(prof, I * I - pI[i] * pI[i] - sig * j.d1[i] * j.d1[i], c.at(m.id, i, t));
      }
      if (lip) probit_lipschitz(c, lip, m.id, t, probits(c, j.value, pc, usable), usable);
    }
    for (const auto& s : sets) {
      const SetProbability p = apply_set(c.sg, t, s.set);
      Mask usable = c.safe(t);
      for (Index i = 0; i < c.g.size(); ++i) {
        if (!usable[i]) continue;
        const double I = profile(p.mass[i], p.complement[i]);
        c.offer(prof, I * I - sig * p.gradient[i] * p.gradient[i], c.at(s.id, i, t));
      }
      if (lip) probit_lipschitz(c, lip, s.id, t, probits(c, p.mass, p.complement, usable), usable);
    }
  }
}

void check_isoperimetric_comparison(CheckContext& c) {
  const auto fs = unit_functions(c);
  const auto sets = nonempty_sets(c);
  Component* comp = c.component("profile_comparison", true);
  Component* nb = c.component("neighbourhood", true);
  for (double t : c.cfg.times) {
    const double kt = kappa(c.K, t);
    if (comp)
      for (const auto& m : fs) {
        const Vector df = grad(m.f).values;
        Vector gv(c.g.size());
        for (Index i = 0; i < c.g.size(); ++i) {
          const double I = iso_profile(m.f[i]);
          gv[i] = std::sqrt(I * I + kt * df[i] * df[i]);
        }
        const Vector rhs = P(c, t, gv);
        const Vector p = P(c, t, m.f.values);
        const Vector pc = P(c, t, (1.0 - m.f.values.array()).matrix());
        const Mask& ok = c.safe(t);
        for (Index i = 0; i < c.g.size(); ++i)
          if (ok[i] && interior(c.g, i)) c.offer(comp, rhs[i] - profile(p[i], pc[i]), c.at(m.id, i, t));
      }
    if (!nb) continue;
    for (const auto& s : sets) {
      const SetProbability a = apply_set(c.sg, t, s.set);
      for (double eps : c.cfg.epsilons) {
        const SetProbability e = apply_set(c.sg, t, s.set.dilate(eps));
        Mask usable = c.safe(t);
        const Vector za = probits(c, a.mass, a.complement, usable);
        const Vector ze = probits(c, e.mass, e.complement, usable);
        for (Index y = 0; y < c.g.size(); ++y) {
          if (!usable[y]) continue;
          Location l = c.at(s.id, y, t);
          l.param = eps;
          c.offer(nb, ze[y] - za[y] - eps / std::sqrt(kt), l);
        }
      }
    }
  }
}

void check_isoperimetric_harnack(CheckContext& c) {
  const auto sets = nonempty_sets(c);
  Component* dil = c.component("dilation", true);
  Component* gp = c.component("gaussian_profile", true);
  for (const auto& s : sets)
    for (double t : c.cfg.times) {
      const SetProbability a = apply_set(c.sg, t, s.set);
      const double rs = 1 / std::sqrt(sigma(c.K, t));
      for (auto [x, y] : c.pairs(t, t)) {
        const double d = c.g.distance(x, y);
        const Location l = c.at(s.id, x, y, t);
        const bool upper = a.mass[x] > 0.5;
        if (dil) {
          const SetProbability b = d > 0 ? apply_set(c.sg, t, s.set.dilate(std::exp(-c.K * t) * d)) : a;
          c.offer(dil, upper ? a.complement[x] - b.complement[y] : b.mass[y] - a.mass[x], l);
        }
        if (gp) {
          const ClampedProbit z = clamped_probit(std::max(a.mass[y], 0.0), std::max(a.complement[y], 0.0));
          if (z.clamped) {
            c.flag("probit_clamped");
            continue;
          }
          const double w = z.value + d * rs;
          c.offer(gp, upper ? a.complement[x] - normal_sf(w) : normal_cdf(w) - a.mass[x], l);
        }
      }
    }
}

}  // namespace harnack::detail
