// harnack: run inequality campaigns and print their reports.
#include "harnack/campaign.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

namespace fs = std::filesystem;
using namespace harnack;

namespace {

std::vector<std::string> split(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& s : items) {
    std::stringstream ss(s);
    for (std::string part; std::getline(ss, part, ',');)
      if (!part.empty()) out.push_back(part);
  }
  return out;
}

void write(const fs::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << text;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw ConfigError("cannot read " + p.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void summary(const CampaignResult& r) {
  int pass = 0, fail = 0, inc = 0;
  for (const auto& rep : r.reports) {
    if (rep.verdict == Verdict::pass) ++pass;
    if (rep.verdict == Verdict::fail) ++fail;
    if (rep.verdict == Verdict::inconclusive) ++inc;
    if (rep.verdict != Verdict::pass)
      std::cerr << rep.id << " [" << rep.semigroup << "] " << to_string(rep.verdict) << " margin " << rep.margin
                << " (" << rep.component << ", " << rep.where.member << ")\n";
  }
  std::cerr << r.reports.size() << " reports: " << pass << " pass, " << fail << " fail, " << inc << " inconclusive; "
            << "refinement " << r.refinement_improved << "/" << r.refinement_candidates << " improved"
            << (r.refinement_ok ? "" : " (below quorum)") << "; " << r.wall_ms / 1000 << " s\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Numerical checks of Harnack, transport and isoperimetric inequalities for diffusion semigroups"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run a campaign and write report.csv and report.json");
  std::string config;
  std::vector<std::string> only;
  std::optional<std::uint64_t> seed;
  std::string out_dir = ".";
  int threads = 0;
  bool omit_timing = false;
  run->add_option("--config", config, "Campaign YAML; omitted runs every check with default sweeps");
  run->add_option("--only", only, "Comma-separated check ids")->delimiter(',');
  run->add_option("--seed", seed, "Override the campaign seed");
  run->add_option("--out", out_dir, "Output directory");
  run->add_option("--threads", threads, "Worker threads (0 = hardware concurrency)");
  run->add_flag("--omit-timing", omit_timing, "Write zero wall times so repeated runs are byte-identical");

  auto* list = app.add_subcommand("list", "List check ids with the inequality each one tests");

  auto* report = app.add_subcommand("report", "Print a stored report");
  std::string format = "csv";
  std::string in_dir = ".";
  report->add_option("--format", format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  report->add_option("--in", in_dir, "Directory holding report.json");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  }

  try {
    if (*list) {
      for (const CheckInfo& c : check_catalog())
        std::cout << c.id << "  [" << c.default_semigroup << "]\n    " << c.statement << "\n";
      return 0;
    }
    if (*report) {
      const CampaignResult r = from_json(slurp(fs::path(in_dir) / "report.json"));
      std::cout << (format == "csv" ? to_csv(r) : to_json(r));
      return r.success() ? 0 : 1;
    }
    CampaignConfig cfg = config.empty() ? default_campaign() : load_campaign(config);
    if (seed) {
      cfg.seed = *seed;
      for (auto& c : cfg.checks) c.seed = *seed;
    }
    CampaignOptions opt;
    opt.only = split(only);
    opt.threads = threads;
    const CampaignResult r = run_campaign(cfg, opt);
    fs::create_directories(out_dir);
    write(fs::path(out_dir) / "report.csv", to_csv(r, !omit_timing));
    write(fs::path(out_dir) / "report.json", to_json(r, !omit_timing));
    summary(r);
    return r.success() ? 0 : 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
