#include "harnack/campaign.hpp"

#include <nlohmann/json.hpp>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

namespace harnack {

namespace {

using json = nlohmann::json;

[[noreturn]] void fail_at(const std::string& origin, const YAML::Node& node, const std::string& msg) {
  const YAML::Mark m = node.Mark();
  throw ConfigError(origin + ":" + std::to_string(m.line + 1) + ":" + std::to_string(m.column + 1) + ": " + msg);
}

template <typename T>
T scalar(const std::string& origin, const YAML::Node& node, const char* what) {
  if (!node.IsScalar()) fail_at(origin, node, std::string(what) + " must be a scalar");
  try {
    return node.as<T>();
  } catch (const YAML::Exception&) {
    fail_at(origin, node, std::string("cannot read ") + what + " from '" + node.Scalar() + "'");
  }
}

std::vector<double> numbers(const std::string& origin, const YAML::Node& node, const char* what) {
  std::vector<double> out;
  if (node.IsScalar()) return {scalar<double>(origin, node, what)};
  if (!node.IsSequence()) fail_at(origin, node, std::string(what) + " must be a number or a list");
  for (const auto& v : node) out.push_back(scalar<double>(origin, v, what));
  return out;
}

std::vector<std::string> strings(const std::string& origin, const YAML::Node& node, const char* what) {
  std::vector<std::string> out;
  if (node.IsScalar()) return {node.Scalar()};
  if (!node.IsSequence()) fail_at(origin, node, std::string(what) + " must be a string or a list");
  for (const auto& v : node) out.push_back(scalar<std::string>(origin, v, what));
  return out;
}

void read_grid(const std::string& origin, const YAML::Node& node, SemigroupSpec& s) {
  if (!node.IsMap()) fail_at(origin, node, "grid must be a map");
  for (const auto& kv : node) {
    const std::string k = kv.first.Scalar();
    if (k == "n")
      s.n = scalar<Index>(origin, kv.second, "n");
    else if (k == "lower")
      s.lower = scalar<double>(origin, kv.second, "lower");
    else if (k == "upper")
      s.upper = scalar<double>(origin, kv.second, "upper");
    else if (k == "length")
      s.length = scalar<double>(origin, kv.second, "length");
    else if (k == "amplitude")
      s.amplitude = scalar<double>(origin, kv.second, "amplitude");
    else if (k != "kind")
      fail_at(origin, kv.first, "unknown grid key '" + k + "'");
  }
}

CheckConfig read_check(const std::string& origin, const YAML::Node& node, std::uint64_t seed) {
  if (!node.IsMap()) fail_at(origin, node, "each check must be a map");
  if (!node["id"]) fail_at(origin, node, "check without id");
  CheckConfig c;
  c.seed = seed;
  c.id = scalar<std::string>(origin, node["id"], "id");
  if (!is_check(c.id)) fail_at(origin, node["id"], "unknown check id '" + c.id + "'");
  std::string kind;
  if (const auto sg = node["semigroup"]) {
    kind = sg.IsMap() ? scalar<std::string>(origin, sg["kind"], "semigroup kind") : scalar<std::string>(origin, sg, "semigroup");
    try {
      c.semigroup = SemigroupSpec::defaults(kind);
    } catch (const ConfigError& e) {
      fail_at(origin, sg, e.what());
    }
    if (sg.IsMap()) read_grid(origin, sg, c.semigroup);
  } else {
    c.semigroup.kind.clear();
  }
  for (const auto& kv : node) {
    const std::string k = kv.first.Scalar();
    const YAML::Node& v = kv.second;
    if (k == "id" || k == "semigroup") continue;
    if (k == "grid") {
      if (c.semigroup.kind.empty()) fail_at(origin, kv.first, "grid given without a semigroup");
      read_grid(origin, v, c.semigroup);
    } else if (k == "times" || k == "t") {
      c.times = numbers(origin, v, "t");
    } else if (k == "s") {
      c.s_values = numbers(origin, v, "s");
    } else if (k == "points") {
      c.points = numbers(origin, v, "points");
    } else if (k == "alpha") {
      c.alphas = numbers(origin, v, "alpha");
    } else if (k == "epsilon") {
      c.epsilons = numbers(origin, v, "epsilon");
    } else if (k == "family") {
      c.family = scalar<std::string>(origin, v, "family");
    } else if (k == "components") {
      c.components = strings(origin, v, "components");
    } else if (k == "member") {
      c.only_member = scalar<std::string>(origin, v, "member");
    } else if (k == "tol") {
      c.tol = scalar<double>(origin, v, "tol");
      if (!(c.tol > 0)) fail_at(origin, v, "tol must be positive");
    } else {
      fail_at(origin, kv.first, "unknown check key '" + k + "'");
    }
  }
  try {
    c = complete(c);
    c.semigroup.grid();
  } catch (const ConfigError& e) {
    fail_at(origin, node, e.what());
  }
  return c;
}

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

json num_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }
double null_or_num(const json& j) { return j.is_null() ? nan : j.get<double>(); }

json to_json(const Location& l) {
  return {{"member", l.member}, {"x", num_or_null(l.x)},         {"y", num_or_null(l.y)},
          {"t", num_or_null(l.t)}, {"s", num_or_null(l.s)}, {"param", num_or_null(l.param)}};
}

Location location_from(const json& j) {
  Location l;
  l.member = j.at("member").get<std::string>();
  l.x = null_or_num(j.at("x"));
  l.y = null_or_num(j.at("y"));
  l.t = null_or_num(j.at("t"));
  l.s = null_or_num(j.at("s"));
  l.param = null_or_num(j.at("param"));
  return l;
}

Verdict verdict_from(const std::string& s) {
  if (s == "pass") return Verdict::pass;
  if (s == "fail") return Verdict::fail;
  return Verdict::inconclusive;
}

template <typename Job>
void parallel_for(size_t count, int threads, Job job) {
  std::atomic<size_t> next{0};
  std::exception_ptr first;
  std::mutex mu;
  auto worker = [&] {
    for (size_t i; (i = next++) < count;) {
      try {
        job(i);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!first) first = std::current_exception();
      }
    }
  };
  const int n = std::max(1, std::min<int>(threads, int(count)));
  std::vector<std::thread> pool;
  for (int k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  if (first) std::rethrow_exception(first);
}

}  // namespace

bool CampaignResult::any_failed() const {
  return std::any_of(reports.begin(), reports.end(), [](const CheckReport& r) { return r.verdict == Verdict::fail; });
}

CampaignConfig parse_campaign(const std::string& text, const std::string& origin) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::ParserException& e) {
    throw ConfigError(origin + ":" + std::to_string(e.mark.line + 1) + ":" + std::to_string(e.mark.column + 1) + ": " +
                      e.msg);
  }
  CampaignConfig cfg;
  if (root.IsNull()) return cfg;
  if (!root.IsMap()) fail_at(origin, root, "top level must be a map");
  for (const auto& kv : root) {
    const std::string k = kv.first.Scalar();
    if (k == "seed")
      cfg.seed = scalar<std::uint64_t>(origin, kv.second, "seed");
    else if (k == "refinement")
      cfg.refinement = scalar<bool>(origin, kv.second, "refinement");
    else if (k != "checks")
      fail_at(origin, kv.first, "unknown top-level key '" + k + "'");
  }
  const YAML::Node checks = root["checks"];
  if (!checks || checks.IsNull()) return cfg;
  if (!checks.IsSequence()) fail_at(origin, checks, "checks must be a list");
  for (const auto& node : checks) cfg.checks.push_back(read_check(origin, node, cfg.seed));
  return cfg;
}

CampaignConfig load_campaign(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path + ": cannot open");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_campaign(ss.str(), path);
}

CampaignConfig default_campaign(std::uint64_t seed) {
  CampaignConfig cfg;
  cfg.seed = seed;
  for (const CheckInfo& info : check_catalog()) {
    CheckConfig c;
    c.id = info.id;
    c.seed = seed;
    c.semigroup = SemigroupSpec::defaults(info.default_semigroup);
    cfg.checks.push_back(complete(c));
  }
  return cfg;
}

CampaignResult run_campaign(const CampaignConfig& cfg, const CampaignOptions& opt) {
  const auto start = std::chrono::steady_clock::now();
  for (const auto& id : opt.only)
    if (!is_check(id)) throw ConfigError("--only: unknown check id '" + id + "'");
  std::vector<CheckConfig> jobs;
  for (const auto& c : cfg.checks)
    if (opt.only.empty() || std::find(opt.only.begin(), opt.only.end(), c.id) != opt.only.end()) jobs.push_back(c);
  const int threads = opt.threads > 0 ? opt.threads : int(std::max(1u, std::thread::hardware_concurrency()));

  CampaignResult out;
  out.reports.resize(jobs.size());
  parallel_for(jobs.size(), threads, [&](size_t i) {
    try {
      out.reports[i] = run_check(jobs[i]);
    } catch (const ConfigError& e) {
      throw ConfigError("checks[" + std::to_string(i) + "] (" + jobs[i].id + "): " + e.what());
    }
  });

  if (cfg.refinement) {
    std::vector<size_t> cand;
    for (size_t i = 0; i < jobs.size(); ++i) {
      const CheckReport& r = out.reports[i];
      if (r.verdict != Verdict::inconclusive && r.margin >= -r.tol && r.margin < -roundoff_floor) cand.push_back(i);
    }
    parallel_for(cand.size(), threads, [&](size_t k) {
      CheckConfig c = jobs[cand[k]];
      c.semigroup = c.semigroup.refined();
      out.reports[cand[k]].refined_margin = run_check(c).margin;
    });
    for (size_t i : cand) {
      const CheckReport& r = out.reports[i];
      ++out.refinement_candidates;
      if (*r.refined_margin > r.margin) ++out.refinement_improved;
    }
    out.refinement_ok =
        out.refinement_candidates == 0 || out.refinement_improved >= refinement_quorum * out.refinement_candidates;
  }
  std::stable_sort(out.reports.begin(), out.reports.end(), [](const CheckReport& a, const CheckReport& b) {
    return a.id != b.id ? a.id < b.id : a.digest < b.digest;
  });
  out.wall_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::string to_csv(const CampaignResult& res, bool timing) {
  std::string s = "check_id,config_digest,margin,tol,verdict,flags,wall_ms\n";
  for (const CheckReport& r : res.reports) {
    std::string flags;
    for (const auto& f : r.flags) flags += (flags.empty() ? "" : ";") + f;
    s += r.id + "," + r.digest + "," + fmt("%.9e", r.margin) + "," + fmt("%.3g", r.tol) + "," + to_string(r.verdict) +
         "," + flags + "," + fmt("%.1f", timing ? r.wall_ms : 0.0) + "\n";
  }
  return s;
}

std::string to_json(const CampaignResult& res, bool timing) {
  json reports = json::array();
  for (const CheckReport& r : res.reports) {
    json comps = json::array();
    for (const Component& c : r.components)
      comps.push_back({{"name", c.name},
                       {"asserted", c.asserted},
                       {"margin", num_or_null(c.margin)},
                       {"evaluations", c.evaluations},
                       {"where", to_json(c.where)}});
    json j = {{"check_id", r.id},
              {"config_digest", r.digest},
              {"semigroup", r.semigroup},
              {"margin", num_or_null(r.margin)},
              {"tol", r.tol},
              {"verdict", to_string(r.verdict)},
              {"component", r.component},
              {"where", to_json(r.where)},
              {"components", comps},
              {"flags", r.flags},
              {"wall_ms", timing ? r.wall_ms : 0.0}};
    if (r.refined_margin) j["refined_margin"] = *r.refined_margin;
    reports.push_back(j);
  }
  json root = {{"reports", reports},
               {"refinement", {{"candidates", res.refinement_candidates},
                               {"improved", res.refinement_improved},
                               {"ok", res.refinement_ok}}},
               {"wall_ms", timing ? res.wall_ms : 0.0}};
  return root.dump(2) + "\n";
}

CampaignResult from_json(const std::string& text) {
  CampaignResult res;
  try {
    const json root = json::parse(text);
    for (const json& j : root.at("reports")) {
      CheckReport r;
      r.id = j.at("check_id").get<std::string>();
      r.digest = j.at("config_digest").get<std::string>();
      r.semigroup = j.at("semigroup").get<std::string>();
      r.margin = j.at("margin").is_null() ? std::numeric_limits<double>::infinity() : j.at("margin").get<double>();
      r.tol = j.at("tol").get<double>();
      r.verdict = verdict_from(j.at("verdict").get<std::string>());
      r.component = j.at("component").get<std::string>();
      r.where = location_from(j.at("where"));
      for (const json& c : j.at("components")) {
        Component k;
        k.name = c.at("name").get<std::string>();
        k.asserted = c.at("asserted").get<bool>();
        k.margin = c.at("margin").is_null() ? std::numeric_limits<double>::infinity() : c.at("margin").get<double>();
        k.evaluations = c.at("evaluations").get<std::int64_t>();
        k.where = location_from(c.at("where"));
        r.components.push_back(k);
      }
      r.flags = j.at("flags").get<std::vector<std::string>>();
      r.wall_ms = j.at("wall_ms").get<double>();
      if (j.contains("refined_margin")) r.refined_margin = j.at("refined_margin").get<double>();
      res.reports.push_back(std::move(r));
    }
    const json& ref = root.at("refinement");
    res.refinement_candidates = ref.at("candidates").get<int>();
    res.refinement_improved = ref.at("improved").get<int>();
    res.refinement_ok = ref.at("ok").get<bool>();
    res.wall_ms = root.at("wall_ms").get<double>();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("report: ") + e.what());
  }
  return res;
}

}  // namespace harnack
