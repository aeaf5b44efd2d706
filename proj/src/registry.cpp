#include "check_context.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>

namespace harnack {

namespace detail {
void check_li_yau_harnack(CheckContext&);
void check_bochner(CheckContext&);
void check_gradient_bound(CheckContext&);
void check_wang_harnack(CheckContext&);
void check_log_harnack(CheckContext&);
void check_reverse_log_sobolev(CheckContext&);
void check_distributional_harnack(CheckContext&);
void check_reverse_isoperimetry(CheckContext&);
void check_isoperimetric_comparison(CheckContext&);
void check_isoperimetric_harnack(CheckContext&);
void check_commutation(CheckContext&);
void check_hypercontractivity(CheckContext&);
void check_kantorovich_duality(CheckContext&);
void check_entropy_transport(CheckContext&);
void check_wasserstein_contraction(CheckContext&);
void check_evi(CheckContext&);
void check_cd0n_gradient(CheckContext&);
}  // namespace detail

namespace {

constexpr double pi = 3.14159265358979323846;

struct Entry {
  CheckInfo info;
  const char* family;
  void (*run)(detail::CheckContext&);
};

const std::vector<Entry>& entries() {
  using namespace detail;
  static const std::vector<Entry> table = {
      {{"bochner", "Gamma_2(f) >= K |grad f|^2 + (L f)^2 / N", "circle"}, "bounded", check_bochner},
      {{"cd0n_gradient",
        "|grad P_s f|^2 <= P_s |grad f|^2 - (2s/N) (L P_s f)^2;  |grad P_t f|^2 <= e^{-2Kt} P_t |grad f|^2",
        "euclidean"},
       "bounded", check_cd0n_gradient},
      {{"commutation",
        "P_t(Q_s f) <= Q_{e^{2Kt} s}(P_t f);  P_t(Q_1^eps f) <= Q_1^eps(P_t f);  P_t(Q_1 f) <= Q_1(P_s f) + N (sqrt t - sqrt s)^2",
        "euclidean"},
       "bounded", check_commutation},
      {{"distributional_harnack",
        "P_t f(x) <= e^{-delta^2/2} int e^{delta Phi^{-1}(F(r))} r dF(r), F the law of f under P_t(y, .), delta = d/sqrt(sigma(t))",
        "ornstein_uhlenbeck"},
       "nonneg", check_distributional_harnack},
      {{"entropy_transport",
        "Ent(P_t f) <= W_2^2(f mu, mu)/4t;  Ent(P_t f) <= W_2^2(f mu, g mu)/4t + Ent(g);  Ent(f) <= W_2(f mu, mu) sqrt(I(f));  "
        "W_2^2(P_t f mu, f mu) <= t [Ent(f) - Ent(P_t f)]",
        "ornstein_uhlenbeck"},
       "densities", check_entropy_transport},
      {{"evi", "W_2^2(mu_t, nu) + 2t Ent(P_t f) <= W_2^2(mu, nu) + 2t Ent(g)", "flat_circle"}, "densities", check_evi},
      {{"gradient_bound", "|grad P_t f| <= e^{-Kt} P_t |grad f|", "ornstein_uhlenbeck"}, "bounded", check_gradient_bound},
      {{"hypercontractivity", "log P_t(e^{Q_{2t} psi}) <= P_t psi  (K = 0)", "euclidean"}, "bounded",
       check_hypercontractivity},
      {{"isoperimetric_comparison",
        "I(P_t f) <= P_t sqrt(I(f)^2 + K(t) |grad f|^2);  P_t 1_{A_eps}(y) >= Phi(Phi^{-1}(P_t 1_A(y)) + eps/sqrt(K(t)))",
        "ornstein_uhlenbeck"},
       "unit", check_isoperimetric_comparison},
      {{"isoperimetric_harnack",
        "P_t 1_A(x) <= P_t 1_{A_{d_t}}(y), d_t = e^{-Kt} d(x,y);  P_t 1_A(x) <= Phi(Phi^{-1}(P_t 1_A(y)) + delta)",
        "ornstein_uhlenbeck"},
       "sets", check_isoperimetric_harnack},
      {{"kantorovich_duality", "int Q_1 phi d nu - int phi d mu <= W_2^2(mu, nu)/2", "ornstein_uhlenbeck"}, "densities",
       check_kantorovich_duality},
      {{"li_yau_harnack",
        "P_t f(x) <= P_{t+s} f(y) ((t+s)/t)^{N/2} e^{d^2/4s};  |grad P_t f|^2/(P_t f)^2 - L P_t f/P_t f <= N/2t", "euclidean"},
       "nonneg", check_li_yau_harnack},
      {{"log_harnack", "P_t(log f)(x) <= log P_t f(y) + d^2/(2 sigma(t));  P_t(log f) <= Q_{sigma(t)}(log P_t f)",
        "ornstein_uhlenbeck"},
       "positive", check_log_harnack},
      {{"reverse_isoperimetry",
        "I(P_t f)^2 - (P_t I(f))^2 >= sigma(t) |grad P_t f|^2;  Phi^{-1}(P_t f(x)) <= Phi^{-1}(P_t f(y)) + d/sqrt(sigma(t))",
        "ornstein_uhlenbeck"},
       "unit", check_reverse_isoperimetry},
      {{"reverse_log_sobolev", "(sigma(t)/2) |grad P_t f|^2 / P_t f <= P_t(f log f) - P_t f log P_t f", "ornstein_uhlenbeck"},
       "positive", check_reverse_log_sobolev},
      {{"wang_harnack", "(P_t f(x))^alpha <= P_t(f^alpha)(y) exp(alpha d^2 / (2 (alpha-1) sigma(t)))", "ornstein_uhlenbeck"},
       "nonneg", check_wang_harnack},
      {{"wasserstein_contraction",
        "W_2^2(mu_t, nu_t) <= e^{-2Kt} W_2^2(mu, nu);  W_2^2(mu_t, nu_s) <= W_2^2(mu, nu) + 2N (sqrt t - sqrt s)^2",
        "ornstein_uhlenbeck"},
       "densities", check_wasserstein_contraction},
  };
  return table;
}

const Entry& entry(const std::string& id) {
  for (const Entry& e : entries())
    if (e.info.id == id) return e;
  throw ConfigError("unknown check id '" + id + "'");
}

std::string num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string join(const std::vector<double>& v) {
  std::string s;
  for (size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + num(v[i]);
  return s;
}

void require_positive(const std::vector<double>& v, const char* what, double above = 0.0) {
  for (double x : v)
    if (!(x > above) || !std::isfinite(x))
      throw ConfigError(std::string(what) + " must be finite and > " + num(above) + ", got " + num(x));
}

}  // namespace

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "?";
}

SemigroupSpec SemigroupSpec::defaults(const std::string& kind) {
  SemigroupSpec s;
  s.kind = kind;
  if (kind == "euclidean") {
    s.lower = -16;
    s.upper = 16;
    s.n = 3201;
  } else if (kind == "ornstein_uhlenbeck") {
    s.lower = -10;
    s.upper = 10;
    s.n = 2001;
  } else if (kind == "circle" || kind == "flat_circle") {
    s.n = 256;
    s.length = 2 * pi;
    s.amplitude = kind == "circle" ? 0.5 : 0.0;
  } else {
    throw ConfigError("unknown semigroup kind '" + kind + "'");
  }
  return s;
}

Grid SemigroupSpec::grid() const {
  if (n < 8) throw ConfigError("grid needs at least 8 nodes");
  if (kind == "euclidean" || kind == "ornstein_uhlenbeck") {
    if (!(upper > lower)) throw ConfigError("grid needs lower < upper");
    return Grid::line(lower, upper, n);
  }
  if (kind == "circle" || kind == "flat_circle") {
    if (!(length > 0)) throw ConfigError("circle length must be positive");
    return Grid::circle(length, n);
  }
  throw ConfigError("unknown semigroup kind '" + kind + "'");
}

Semigroup SemigroupSpec::build() const {
  const Grid g = grid();
  if (kind == "euclidean") return Semigroup::euclidean(g);
  if (kind == "ornstein_uhlenbeck") return Semigroup::ornstein_uhlenbeck(g);
  const double a = kind == "flat_circle" ? 0.0 : amplitude;
  const double w = 2 * pi / g.length();
  Vector V(g.size());
  for (Index i = 0; i < g.size(); ++i) V[i] = a * std::cos(w * g.coord(i));
  return Semigroup::diffusion(g, V);
}

SemigroupSpec SemigroupSpec::refined() const {
  SemigroupSpec s = *this;
  s.n = grid().refined().size();
  return s;
}

std::string SemigroupSpec::canonical() const {
  std::string s = "kind=" + kind + ";n=" + std::to_string(n);
  if (exact_kernel()) return s + ";lower=" + num(lower) + ";upper=" + num(upper);
  s += ";length=" + num(length);
  if (kind == "circle") s += ";amplitude=" + num(amplitude);
  return s;
}

std::string CheckConfig::canonical() const {
  std::string comps;
  for (const auto& c : components) comps += (comps.empty() ? "" : ",") + c;
  return "id=" + id + ";" + semigroup.canonical() + ";times=" + join(times) + ";s=" + join(s_values) +
         ";points=" + join(points) + ";alphas=" + join(alphas) + ";epsilons=" + join(epsilons) + ";family=" + family +
         "/" + family_version + ";components=" + comps + ";member=" + only_member + ";tol=" + num(tol) +
         ";seed=" + std::to_string(seed);
}

std::string CheckConfig::digest() const {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(canonical())));
  return buf;
}

const std::vector<CheckInfo>& check_catalog() {
  static const std::vector<CheckInfo> out = [] {
    std::vector<CheckInfo> v;
    for (const Entry& e : entries()) v.push_back(e.info);
    return v;
  }();
  return out;
}

bool is_check(const std::string& id) {
  return std::any_of(entries().begin(), entries().end(), [&](const Entry& e) { return e.info.id == id; });
}

double default_tolerance(const std::string& id, const SemigroupSpec& sg) {
  entry(id);
  double tol = sg.exact_kernel() ? 1e-5 : 1e-3;
  // grid-restricted infima, transport, finite-difference curvature and integrands
  // that are not piecewise linear carry an O(h^2) error of order 1e-5
  if (id == "commutation" || id == "hypercontractivity" || id == "kantorovich_duality" || id == "entropy_transport" ||
      id == "wasserstein_contraction" || id == "evi" || id == "bochner" || id == "log_harnack" ||
      id == "isoperimetric_comparison")
    tol = std::max(tol, 1e-4);
  return tol;
}

CheckConfig complete(CheckConfig c) {
  const Entry& e = entry(c.id);
  if (c.semigroup.kind.empty()) c.semigroup = SemigroupSpec::defaults(e.info.default_semigroup);
  const bool circ = c.semigroup.kind == "circle" || c.semigroup.kind == "flat_circle";
  if (c.times.empty()) c.times = {0.1, 0.5, 1.0};
  if (c.s_values.empty()) c.s_values = {0.2, 1.0};
  if (c.points.empty()) c.points = circ ? std::vector<double>{0.5, 1.5, 3.0, 4.5, 6.0} : std::vector<double>{-2, -1, 0, 1, 2};
  if (c.alphas.empty()) c.alphas = {1.5, 2.0, 4.0};
  if (c.epsilons.empty()) c.epsilons = c.id == "commutation" ? std::vector<double>{0.05} : std::vector<double>{0.1, 0.5};
  if (c.family.empty()) c.family = e.family;
  if (c.tol == 0.0) c.tol = default_tolerance(c.id, c.semigroup);
  return c;
}

const Component* CheckReport::find(const std::string& name) const {
  for (const Component& c : components)
    if (c.name == name) return &c;
  return nullptr;
}

CheckConfig restrict_to(const CheckConfig& cfg, const Component& c) {
  CheckConfig r = complete(cfg);
  r.components = {c.name};
  r.only_member = c.where.member;
  const Location& w = c.where;
  if (std::isfinite(w.t)) r.times = {w.t};
  if (std::isfinite(w.s)) r.s_values = {w.s};
  if (std::isfinite(w.param)) r.alphas = r.epsilons = {w.param};
  if (std::isfinite(w.x) && std::isfinite(w.y)) r.points = {w.x, w.y};
  return r;
}

CheckReport run_check(const CheckConfig& raw) {
  const CheckConfig cfg = complete(raw);
  if (!(cfg.tol > 0)) throw ConfigError("tol must be positive");
  require_positive(cfg.times, "t");
  require_positive(cfg.s_values, "s");
  require_positive(cfg.alphas, "alpha", 1.0);
  require_positive(cfg.epsilons, "epsilon");
  const Entry& e = entry(cfg.id);
  const auto start = std::chrono::steady_clock::now();
  detail::CheckContext ctx(cfg);
  e.run(ctx);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return ctx.finish(ms);
}

namespace detail {

bool disqualifying(const std::string& flag) { return flag == "fisher_floor"; }

CheckContext::CheckContext(const CheckConfig& c) : cfg(c), sg(c.semigroup.build()), g(sg.grid()), K(sg.curvature().K) {
  if (cfg.semigroup.kind == "flat_circle") K = 0.0;
}

Component* CheckContext::component(const std::string& name, bool asserted, bool applicable, const char* why) {
  names_.push_back(name);
  const bool requested = std::find(cfg.components.begin(), cfg.components.end(), name) != cfg.components.end();
  if (!cfg.components.empty() && !requested) return nullptr;
  if (!applicable) {
    if (requested) throw ConfigError(cfg.id + "/" + name + ": " + why);
    return nullptr;
  }
  Component& c = comps_.emplace_back();
  c.name = name;
  c.asserted = asserted;
  return &c;
}

void CheckContext::offer(Component* c, double margin, const Location& where) {
  if (!c) return;
  if (!std::isfinite(margin)) {
    flag("nonfinite");
    return;
  }
  ++c->evaluations;
  if (margin < c->margin) {
    c->margin = margin;
    c->where = where;
  }
}

void CheckContext::flag(const std::string& name, std::int64_t count) { flags_[name] += count; }

std::vector<FunctionMember> CheckContext::functions() {
  if (!is_function_family(cfg.family)) throw ConfigError(cfg.id + ": '" + cfg.family + "' is not a function family");
  std::vector<FunctionMember> out;
  for (auto& m : function_family(cfg.family, g, cfg.seed))
    if (wanted(m.id)) out.push_back(std::move(m));
  return out;
}

std::vector<SetMember> CheckContext::sets() {
  std::vector<SetMember> out;
  for (auto& m : set_family(g))
    if (wanted(m.id)) out.push_back(std::move(m));
  return out;
}

std::vector<DensityMember> CheckContext::densities() { return density_family(sg.measure(), cfg.seed); }

const Mask& CheckContext::safe(double t) {
  auto it = safe_.find(t);
  if (it != safe_.end()) return it->second;
  Mask m = Mask::Constant(g.size(), true);
  if (g.is_line())
    for (Index i = 0; i < g.size(); ++i) m[i] = outside_mass(sg, t, i) < safe_mass;
  return safe_.emplace(t, std::move(m)).first->second;
}

std::vector<std::pair<Index, Index>> CheckContext::pairs(double tx, double ty) {
  std::vector<Index> idx;
  for (double p : cfg.points) {
    if (g.is_line() && (p < g.lower() || p > g.upper())) throw ConfigError("point " + num(p) + " lies outside the grid");
    double q = p;
    if (g.is_circle()) q = g.lower() + std::fmod(std::fmod(p - g.lower(), g.length()) + g.length(), g.length());
    const Index i = g.nearest(q);
    if (std::find(idx.begin(), idx.end(), i) == idx.end()) idx.push_back(i);
  }
  const Mask& sx = safe(tx);
  const Mask& sy = safe(ty);
  std::vector<std::pair<Index, Index>> out;
  for (Index i : idx)
    for (Index j : idx) {
      if (sx[i] && sy[j])
        out.emplace_back(i, j);
      else
        flag("unsafe_pair");
    }
  return out;
}

Location CheckContext::at(const std::string& member, Index x, double t) const {
  Location l;
  l.member = member;
  l.x = g.coord(x);
  l.t = t;
  return l;
}

Location CheckContext::at(const std::string& member, Index x, Index y, double t) const {
  Location l = at(member, x, t);
  l.y = g.coord(y);
  return l;
}

CheckReport CheckContext::finish(double wall_ms) {
  for (const auto& c : cfg.components)
    if (std::find(names_.begin(), names_.end(), c) == names_.end())
      throw ConfigError(cfg.id + ": unknown component '" + c + "'");
  CheckReport r;
  r.id = cfg.id;
  r.digest = cfg.digest();
  r.semigroup = cfg.semigroup.kind;
  r.tol = cfg.tol;
  r.wall_ms = wall_ms;
  r.components.assign(comps_.begin(), comps_.end());
  bool any = false, bad_flag = false;
  for (const auto& [name, count] : flags_) {
    r.flags.push_back(name + ":" + std::to_string(count));
    bad_flag = bad_flag || disqualifying(name);
  }
  for (const Component& c : r.components) {
    if (!c.asserted || c.evaluations == 0) continue;
    any = true;
    if (c.margin < r.margin) {
      r.margin = c.margin;
      r.component = c.name;
      r.where = c.where;
    }
  }
  if (!any) {
    r.flags.push_back("no_asserted_evaluations");
    r.verdict = Verdict::inconclusive;
  } else if (r.margin < -r.tol) {
    r.verdict = Verdict::fail;
  } else {
    r.verdict = bad_flag ? Verdict::inconclusive : Verdict::pass;
  }
  return r;
}

}  // namespace detail

}  // namespace harnack
