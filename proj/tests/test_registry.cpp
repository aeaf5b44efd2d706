#include <doctest.h>

#include "harnack/campaign.hpp"

#include <cmath>
#include <set>

using namespace harnack;

namespace {

CheckConfig small(const std::string& id, const std::string& kind = "ornstein_uhlenbeck") {
  CheckConfig c;
  c.id = id;
  c.semigroup = SemigroupSpec::defaults(kind);
  if (c.semigroup.exact_kernel()) c.semigroup.n = kind == "euclidean" ? 1601 : 801;
  c.times = {0.2, 1.0};
  c.seed = 5;
  return c;
}

bool same_location(const Location& a, const Location& b) {
  auto eq = [](double x, double y) { return (std::isnan(x) && std::isnan(y)) || x == y; };
  return a.member == b.member && eq(a.x, b.x) && eq(a.y, b.y) && eq(a.t, b.t) && eq(a.s, b.s) && eq(a.param, b.param);
}

}  // namespace

TEST_SUITE("inequality_registry") {

TEST_CASE("catalog ids are unique and described") {
  std::set<std::string> ids;
  for (const CheckInfo& c : check_catalog()) {
    CHECK(ids.insert(c.id).second);
    CHECK(!c.statement.empty());
    CHECK(is_check(c.id));
  }
  CHECK(ids.size() == 17);
  CHECK(!is_check("no_such_check"));
}

TEST_CASE("tolerance classes") {
  CHECK(default_tolerance("wang_harnack", SemigroupSpec::defaults("ornstein_uhlenbeck")) == 1e-5);
  CHECK(default_tolerance("log_harnack", SemigroupSpec::defaults("circle")) == 1e-3);
  CHECK(default_tolerance("commutation", SemigroupSpec::defaults("euclidean")) == 1e-4);
  CHECK_THROWS_AS(default_tolerance("no_such_check", SemigroupSpec{}), ConfigError);
}

TEST_CASE("digest is stable and sensitive") {
  const CheckConfig a = complete(small("gradient_bound"));
  CHECK(a.digest() == complete(small("gradient_bound")).digest());
  CHECK(a.digest().size() == 16);
  CheckConfig b = a;
  b.seed = 6;
  CHECK(b.digest() != a.digest());
  b = a;
  b.semigroup.n = 803;
  CHECK(b.digest() != a.digest());
  b = a;
  b.tol *= 2;
  CHECK(b.digest() != a.digest());
}

TEST_CASE("margin locality") {
  // rerunning a component at its recorded worst location reproduces its margin
  for (const auto& [id, kind] : std::vector<std::pair<std::string, std::string>>{{"gradient_bound", "ornstein_uhlenbeck"},
                                                                                  {"log_harnack", "ornstein_uhlenbeck"},
                                                                                  {"wang_harnack", "ornstein_uhlenbeck"},
                                                                                  {"reverse_log_sobolev", "ornstein_uhlenbeck"},
                                                                                  {"isoperimetric_harnack", "ornstein_uhlenbeck"},
                                                                                  {"reverse_isoperimetry", "ornstein_uhlenbeck"},
                                                                                  {"distributional_harnack", "ornstein_uhlenbeck"},
                                                                                  {"entropy_transport", "ornstein_uhlenbeck"},
                                                                                  {"li_yau_harnack", "euclidean"},
                                                                                  {"cd0n_gradient", "euclidean"},
                                                                                  {"bochner", "circle"}}) {
    CAPTURE(id);
    const CheckConfig cfg = small(id, kind);
    const CheckReport r = run_check(cfg);
    REQUIRE(!r.components.empty());
    for (const Component& c : r.components) {
      if (c.evaluations == 0) continue;
      CAPTURE(c.name);
      const CheckReport again = run_check(restrict_to(cfg, c));
      const Component* k = again.find(c.name);
      REQUIRE(k != nullptr);
      CHECK(std::abs(k->margin - c.margin) <= 1e-12);
    }
  }
}

TEST_CASE("reports are deterministic") {
  const CheckConfig cfg = small("isoperimetric_harnack");
  const CheckReport a = run_check(cfg), b = run_check(cfg);
  CHECK(a.margin == b.margin);
  CHECK(a.digest == b.digest);
  CHECK(a.component == b.component);
  CHECK(same_location(a.where, b.where));

  CampaignConfig camp;
  camp.checks = {complete(small("gradient_bound")), complete(small("reverse_log_sobolev")),
                 complete(small("log_harnack"))};
  const std::string one = to_json(run_campaign(camp, {{}, 1}), false);
  const std::string three = to_json(run_campaign(camp, {{}, 3}), false);
  CHECK(one == three);
  CHECK(to_csv(run_campaign(camp, {{}, 2}), false) == to_csv(from_json(one), false));
}

TEST_CASE("monotone tolerance") {
  for (const char* id : {"gradient_bound", "isoperimetric_harnack", "log_harnack"}) {
    CheckConfig cfg = complete(small(id));
    const CheckReport r = run_check(cfg);
    cfg.tol *= 2;
    const CheckReport wide = run_check(cfg);
    if (r.verdict == Verdict::pass) CHECK(wide.verdict == Verdict::pass);
    CHECK(wide.margin == r.margin);
  }
}

TEST_CASE("inapplicable configurations are rejected") {
  CHECK_THROWS_AS(run_check(small("li_yau_harnack", "ornstein_uhlenbeck")), ConfigError);
  CHECK_THROWS_AS(run_check(small("hypercontractivity", "ornstein_uhlenbeck")), ConfigError);
  CheckConfig c = small("gradient_bound");
  c.tol = -1e-5;
  CHECK_THROWS_AS(run_check(c), ConfigError);
  c = small("gradient_bound");
  c.times = {0.5, -1.0};
  CHECK_THROWS_AS(run_check(c), ConfigError);
  c = small("wang_harnack");
  c.alphas = {1.0};
  CHECK_THROWS_AS(run_check(c), ConfigError);
  c = small("gradient_bound");
  c.id = "no_such_check";
  CHECK_THROWS_AS(run_check(c), ConfigError);
  c = small("wasserstein_contraction");
  c.components = {"dimensional"};
  CHECK_THROWS_AS(run_check(c), ConfigError);
}

TEST_CASE("campaign parsing") {
  const CampaignConfig cfg = parse_campaign(R"(seed: 9
checks:
  - id: gradient_bound
    semigroup: {kind: ornstein_uhlenbeck, n: 801}
    t: [0.5]
    tol: 2e-5
  - id: bochner
)");
  REQUIRE(cfg.checks.size() == 2);
  CHECK(cfg.seed == 9);
  CHECK(cfg.checks[0].semigroup.n == 801);
  CHECK(cfg.checks[0].times == std::vector<double>{0.5});
  CHECK(cfg.checks[0].tol == 2e-5);
  CHECK(cfg.checks[1].semigroup.kind == "circle");
  CHECK(cfg.checks[1].seed == 9);

  auto message = [](const std::string& yaml) {
    try {
      parse_campaign(yaml, "c.yaml");
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("checks:\n  - id: nope\n").rfind("c.yaml:2:", 0) == 0);
  CHECK(message("checks:\n  - id: bochner\n    colour: red\n").rfind("c.yaml:3:5:", 0) == 0);
  CHECK(message("checks:\n  - id: bochner\n    tol: -1\n").rfind("c.yaml:3:", 0) == 0);
  CHECK(message("checks:\n  - id: bochner\n    semigroup: torus\n").rfind("c.yaml:3:", 0) == 0);
  CHECK(message("checks: [\n").rfind("c.yaml:", 0) == 0);
  CHECK(message("sed: 1\n").rfind("c.yaml:1:1:", 0) == 0);
}

TEST_CASE("empty campaign") {
  const CampaignResult r = run_campaign(parse_campaign("checks: []\n"));
  CHECK(r.reports.empty());
  CHECK(r.success());
  CHECK(to_csv(r) == "check_id,config_digest,margin,tol,verdict,flags,wall_ms\n");
  CHECK_THROWS_AS(run_campaign(parse_campaign("checks: []\n"), {{"no_such_check"}, 1}), ConfigError);
}

}
