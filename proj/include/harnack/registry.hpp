#pragma once
// Named inequality checks. Each check evaluates one or more components over its
// sweeps and keeps the worst signed margin (margin >= 0 means the inequality holds)
// together with where it occurred.
#include "harnack/semigroup.hpp"

#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace harnack {

// Malformed or inapplicable configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class Verdict { pass, fail, inconclusive };
std::string to_string(Verdict v);

// euclidean | ornstein_uhlenbeck | circle (V = amplitude cos) | flat_circle
struct SemigroupSpec {
  std::string kind = "ornstein_uhlenbeck";
  double lower = -10.0;
  double upper = 10.0;
  double length = 6.283185307179586;
  Index n = 2001;
  double amplitude = 0.5;

  static SemigroupSpec defaults(const std::string& kind);
  Semigroup build() const;
  Grid grid() const;
  SemigroupSpec refined() const;
  bool exact_kernel() const { return kind == "euclidean" || kind == "ornstein_uhlenbeck"; }
  std::string canonical() const;
};

struct CheckConfig {
  std::string id;
  SemigroupSpec semigroup;
  std::vector<double> times;
  std::vector<double> s_values;
  std::vector<double> points;  // pairs are all ordered (x, y) drawn from these
  std::vector<double> alphas;
  std::vector<double> epsilons;
  std::string family;                   // empty selects the check's default
  std::vector<std::string> components;  // empty selects every applicable one
  std::string only_member;              // restrict the family to one member id
  double tol = 0.0;                     // 0 selects the class default
  std::uint64_t seed = 0;

  std::string canonical() const;
  std::string digest() const;
};

// Defaults for the sweeps that the caller left empty, the family and tol.
CheckConfig complete(CheckConfig cfg);

constexpr double nan = std::numeric_limits<double>::quiet_NaN();

struct Location {
  std::string member;
  double x = nan;
  double y = nan;
  double t = nan;
  double s = nan;
  double param = nan;
};

struct Component {
  std::string name;
  bool asserted = true;
  double margin = std::numeric_limits<double>::infinity();
  Location where;
  std::int64_t evaluations = 0;
};

struct CheckReport {
  std::string id;
  std::string digest;
  std::string semigroup;
  double margin = std::numeric_limits<double>::infinity();
  double tol = 0.0;
  std::string component;
  Location where;
  std::vector<Component> components;
  std::vector<std::string> flags;
  Verdict verdict = Verdict::inconclusive;
  double wall_ms = 0.0;
  // filled by the campaign when the margin lies in [-tol, 0)
  std::optional<double> refined_margin;

  const Component* find(const std::string& name) const;
};

struct CheckInfo {
  std::string id;
  std::string statement;
  std::string default_semigroup;
};

const std::vector<CheckInfo>& check_catalog();
bool is_check(const std::string& id);
double default_tolerance(const std::string& id, const SemigroupSpec& sg);

// Throws ConfigError for unknown ids, inapplicable semigroups or bad parameters.
CheckReport run_check(const CheckConfig& cfg);

// Sweeps cut down to the location of a component's worst margin; running it
// reproduces that component's margin.
CheckConfig restrict_to(const CheckConfig& cfg, const Component& c);

// Kernel mass outside the grid below which a point counts as safe.
constexpr double safe_mass = 1e-10;

}  // namespace harnack
