#pragma once
// Campaign: a YAML list of check configs run as independent jobs, with the
// refinement rule applied to near-zero negative margins.
#include "harnack/registry.hpp"

#include <string>
#include <vector>

namespace harnack {

struct CampaignConfig {
  std::uint64_t seed = 0;
  bool refinement = true;
  std::vector<CheckConfig> checks;
};

// Errors carry "origin:line:col: message".
CampaignConfig parse_campaign(const std::string& yaml, const std::string& origin = "<string>");
CampaignConfig load_campaign(const std::string& path);
// Every check id with its default sweeps.
CampaignConfig default_campaign(std::uint64_t seed = 20240917);

struct CampaignOptions {
  std::vector<std::string> only;  // check ids; empty runs all
  int threads = 0;                // 0 picks the hardware concurrency
};

// Margins in [-roundoff_floor, 0) are floating-point noise around an equality
// case and are exempt from the refinement rule.
constexpr double roundoff_floor = 1e-10;
constexpr double refinement_quorum = 0.9;

struct CampaignResult {
  std::vector<CheckReport> reports;  // sorted by check id, then digest
  int refinement_candidates = 0;
  int refinement_improved = 0;
  bool refinement_ok = true;
  double wall_ms = 0.0;

  bool any_failed() const;
  bool success() const { return !any_failed() && refinement_ok; }
};

CampaignResult run_campaign(const CampaignConfig& cfg, const CampaignOptions& opt = {});

std::string to_csv(const CampaignResult& r, bool timing = true);
std::string to_json(const CampaignResult& r, bool timing = true);
CampaignResult from_json(const std::string& text);

}  // namespace harnack
