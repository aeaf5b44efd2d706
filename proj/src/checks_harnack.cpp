// Harnack, log-Harnack, reverse log-Sobolev and gradient checks.
#include "check_context.hpp"
#include "harnack/detail/gauss_pieces.hpp"
#include "harnack/hopf_lax.hpp"

#include <cmath>

namespace harnack::detail {

namespace {

Vector P(const CheckContext& c, double t, const Vector& v) { return apply(c.sg, t, ScalarField(c.g, v)).values; }

constexpr double small_ratio = 1e-8;

bool positive(const ScalarField& f) { return (f.values.array() > 0).all(); }

void require_nonneg(const CheckContext& c, const std::vector<FunctionMember>& fs) {
  for (const auto& m : fs)
    if ((m.f.values.array() < 0).any()) throw ConfigError(c.cfg.id + ": member '" + m.id + "' takes negative values");
}

void require_positive(const CheckContext& c, const std::vector<FunctionMember>& fs) {
  for (const auto& m : fs)
    if (!positive(m.f)) throw ConfigError(c.cfg.id + ": member '" + m.id + "' is not bounded away from zero");
}

// interior nodes where second differences are meaningful
bool interior(const Grid& g, Index i) { return g.is_circle() || (i >= 2 && i < g.size() - 2); }

}  // namespace

void check_li_yau_harnack(CheckContext& c) {
  if (c.sg.kind() != SemigroupKind::euclidean) throw ConfigError("li_yau_harnack: euclidean semigroup required");
  const auto fs = c.functions();
  require_nonneg(c, fs);
  const double N = c.sg.curvature().N.value_or(1.0);
  Component* two = c.component("two_time", true);
  Component* inf = c.component("infinitesimal", true);
  for (const auto& m : fs) {
    for (double t : c.cfg.times) {
      const Vector pt = P(c, t, m.f.values);
      if (inf && positive(m.f)) {
        const Vector ly = li_yau_margin(c.sg, t, m.f).values;
        const Mask& ok = c.safe(t);
        // the ratios lose relative precision where P_t f is far below the scale of f
        const double floor = small_ratio * m.f.values.maxCoeff();
        for (Index i = 0; i < c.g.size(); ++i) {
          if (!ok[i]) continue;
          if (pt[i] < floor)
            c.flag("small_value");
          else
            c.offer(inf, ly[i], c.at(m.id, i, t));
        }
      }
      if (!two) continue;
      for (double s : c.cfg.s_values) {
        const Vector pts = P(c, t + s, m.f.values);
        for (auto [x, y] : c.pairs(t, t + s)) {
          const double d = c.g.distance(x, y);
          const double rhs = std::log(pts[y]) + 0.5 * N * std::log((t + s) / t) + d * d / (4 * s);
          Location l = c.at(m.id, x, y, t);
          l.s = s;
          c.offer(two, rhs - std::log(pt[x]), l);
        }
      }
    }
  }
}

void check_bochner(CheckContext& c) {
  Component* cd = c.component("curvature_dimension", true);
  for (const auto& m : c.functions()) {
    const Vector r = gamma2_margin(c.sg, m.f).values;
    for (Index i = 0; i < c.g.size(); ++i)
      if (interior(c.g, i)) c.offer(cd, r[i], c.at(m.id, i, nan));
  }
}

void check_gradient_bound(CheckContext& c) {
  Component* gb = c.component("pointwise", true);
  for (const auto& m : c.functions())
    for (double t : c.cfg.times) {
      const Vector r = gradient_bound_margin(c.sg, t, m.f).values;
      const Mask& ok = c.safe(t);
      for (Index i = 0; i < c.g.size(); ++i)
        if (ok[i] && interior(c.g, i)) c.offer(gb, r[i], c.at(m.id, i, t));
    }
}

void check_cd0n_gradient(CheckContext& c) {
  const auto N = c.sg.curvature().N;
  Component* dim = c.component("dimensional", true, N.has_value(), "needs a finite dimension N");
  Component* weak = c.component("weak", true);
  for (const auto& m : c.functions())
    for (double t : c.cfg.times) {
      const Jet j = apply_jet(c.sg, t, m.f);
      const Vector g2 = apply_gradient_power(c.sg, t, m.f, 2.0);
      Vector lp = j.d2;
      if (c.sg.kind() != SemigroupKind::euclidean) lp = generator(c.sg, ScalarField(c.g, j.value)).values;
      const Mask& ok = c.safe(t);
      const double decay = std::exp(-2 * c.K * t);
      for (Index i = 0; i < c.g.size(); ++i) {
        if (!ok[i] || !interior(c.g, i)) continue;
        const double grad2 = j.d1[i] * j.d1[i];
        c.offer(weak, decay * g2[i] - grad2, c.at(m.id, i, t));
        if (dim) c.offer(dim, g2[i] - 2 * t / *N * lp[i] * lp[i] - grad2, c.at(m.id, i, t));
      }
    }
}

void check_wang_harnack(CheckContext& c) {
  const auto fs = c.functions();
  require_nonneg(c, fs);
  Component* pw = c.component("pointwise", true);
  // alpha -> infinity: the Wang margin for f^{1/alpha} tends to the log-Harnack margin
  Component* lim = c.component("large_exponent", false);
  constexpr double big = 64.0;
  for (const auto& m : fs) {
    const Vector logf = m.f.values.array().log();
    for (double t : c.cfg.times) {
      const double sig = sigma(c.K, t);
      const Vector pt = P(c, t, m.f.values);
      const auto prs = c.pairs(t, t);
      if (pw)
        for (double a : c.cfg.alphas) {
          if (a * logf.maxCoeff() > 700) {
            c.flag("overflow_skipped");
            continue;
          }
          const Vector pa = P(c, t, m.f.values.array().pow(a).matrix());
          for (auto [x, y] : prs) {
            const double d = c.g.distance(x, y);
            Location l = c.at(m.id, x, y, t);
            l.param = a;
            c.offer(pw, std::log(pa[y]) + a * d * d / (2 * (a - 1) * sig) - a * std::log(pt[x]), l);
          }
        }
      if (lim && positive(m.f)) {
        const Vector proot = P(c, t, m.f.values.array().pow(1 / big).matrix());
        const Vector plog = P(c, t, logf);
        for (auto [x, y] : prs) {
          const double d = c.g.distance(x, y);
          const double wang = std::log(pt[y]) + big * d * d / (2 * (big - 1) * sig) - big * std::log(proot[x]);
          const double logh = std::log(pt[y]) + d * d / (2 * sig) - plog[x];
          Location l = c.at(m.id, x, y, t);
          l.param = big;
          c.offer(lim, 1e-2 - std::abs(wang - logh), l);
        }
      }
    }
  }
}

void check_log_harnack(CheckContext& c) {
  const auto fs = c.functions();
  require_positive(c, fs);
  Component* pw = c.component("pointwise", true);
  Component* field = c.component("field_level", true);
  for (const auto& m : fs) {
    const Vector logf = m.f.values.array().log();
    for (double t : c.cfg.times) {
      const double sig = sigma(c.K, t);
      const Vector plog = P(c, t, logf);
      const Vector logp = P(c, t, m.f.values).array().log();
      if (pw)
        for (auto [x, y] : c.pairs(t, t)) {
          const double d = c.g.distance(x, y);
          c.offer(pw, logp[y] + d * d / (2 * sig) - plog[x], c.at(m.id, x, y, t));
        }
      if (field) {
        // Q_s uses d^2/2s, so d^2/(2 sigma) is Q at s = sigma(t); this is Q_{2t} at K = 0
        const Vector q = inf_conv(ScalarField(c.g, logp), sig).field.values;
        const Mask& ok = c.safe(t);
        for (Index i = 0; i < c.g.size(); ++i)
          if (ok[i]) c.offer(field, q[i] - plog[i], c.at(m.id, i, t));
      }
    }
  }
}

void check_reverse_log_sobolev(CheckContext& c) {
  const auto fs = c.functions();
  require_positive(c, fs);
  Component* pw = c.component("pointwise", true);
  for (const auto& m : fs) {
    const Vector flogf = m.f.values.array() * m.f.values.array().log();
    for (double t : c.cfg.times) {
      const double sig = sigma(c.K, t);
      const Jet j = apply_jet(c.sg, t, m.f);
      const Vector pfl = P(c, t, flogf);
      const Mask& ok = c.safe(t);
      for (Index i = 0; i < c.g.size(); ++i) {
        if (!ok[i] || !interior(c.g, i)) continue;
        const double p = j.value[i];
        c.offer(pw, pfl[i] - p * std::log(p) - 0.5 * sig * j.d1[i] * j.d1[i] / p, c.at(m.id, i, t));
      }
    }
  }
}

void check_distributional_harnack(CheckContext& c) {
  const auto fs = c.functions();
  require_nonneg(c, fs);
  Component* dist = c.component("distribution", true);
  // Cauchy-Schwarz step down to Wang's inequality at alpha = 2
  Component* chain = c.component("wang_chain", true);
  for (const auto& m : fs)
    for (double t : c.cfg.times) {
      const double sig = sigma(c.K, t);
      for (auto [x, y] : c.pairs(t, t)) {
        const double lhs = apply_at(c.sg, t, m.f, x);
        const DistributionFunction F = kernel_cdf(c.sg, t, m.f, y);
        const double delta = c.g.distance(x, y) / std::sqrt(sig);
        // the atom at r_j spans [F_{j-1}, F_j]; on it int e^{delta z - delta^2/2} dPhi(z)
        // is the N(delta, 1) mass between the probits of its ends
        double rhs = 0.0, second = 0.0, z_prev = -std::numeric_limits<double>::infinity();
        for (Index k = 0; k < F.atoms(); ++k) {
          const double z = k + 1 == F.atoms() ? std::numeric_limits<double>::infinity() : probit_pair(F.cdf[k], F.tail[k]);
          const double r = F.support[k];
          rhs += r * interval_mass(z_prev - delta, z - delta);
          double dF = F.cdf[k];
          if (k > 0) dF = F.cdf[k - 1] <= 0.5 ? F.cdf[k] - F.cdf[k - 1] : F.tail[k - 1] - F.tail[k];
          second += r * r * dF;
          z_prev = z;
        }
        const Location l = c.at(m.id, x, y, t);
        c.offer(dist, rhs - lhs, l);
        c.offer(chain, std::exp(delta * delta / 2) * std::sqrt(second) - rhs, l);
      }
    }
}

}  // namespace harnack::detail
