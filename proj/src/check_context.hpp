#pragma once
// Bookkeeping shared by the check implementations.
#include "harnack/families.hpp"
#include "harnack/registry.hpp"

#include <deque>
#include <map>
#include <utility>

namespace harnack::detail {

class CheckContext {
 public:
  explicit CheckContext(const CheckConfig& cfg);

  const CheckConfig& cfg;
  Semigroup sg;
  Grid g;
  double K;

  // A component to evaluate, or nullptr when the config selected other components.
  // Requesting an inapplicable component by name is a ConfigError carrying `why`.
  Component* component(const std::string& name, bool asserted, bool applicable = true, const char* why = "");
  void offer(Component* c, double margin, const Location& where);
  void flag(const std::string& name, std::int64_t count = 1);

  // Member ids may carry a sub-member after '@'; a restriction to "a@b" keeps member "a".
  bool wanted(const std::string& member) const {
    const std::string& o = cfg.only_member;
    return o.empty() || o == member || (o.size() > member.size() && o.compare(0, member.size(), member) == 0 && o[member.size()] == '@');
  }
  std::vector<FunctionMember> functions();
  std::vector<SetMember> sets();
  std::vector<DensityMember> densities();

  // Nodes whose exact kernel keeps all but safe_mass inside the grid.
  const Mask& safe(double t);
  // Ordered pairs of configured points, x safe at time tx and y at ty.
  std::vector<std::pair<Index, Index>> pairs(double tx, double ty);

  Location at(const std::string& member, Index x, double t) const;
  Location at(const std::string& member, Index x, Index y, double t) const;

  CheckReport finish(double wall_ms);

 private:
  std::deque<Component> comps_;
  std::vector<std::string> names_;
  std::map<std::string, std::int64_t> flags_;
  std::map<double, Mask> safe_;
};

bool disqualifying(const std::string& flag);

}  // namespace harnack::detail
