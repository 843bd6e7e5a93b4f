#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "recon/model.hpp"

namespace recon {

struct GroundedAction {
  std::string template_name;
  std::vector<std::string> args;

  auto operator<=>(const GroundedAction&) const = default;
  bool operator==(const GroundedAction&) const = default;

  bool mentions(std::string_view symbol) const;
};

/// Available actions plus the blocked dictionary keyed by serialized unmet precondition.
struct ActionGraph {
  std::vector<GroundedAction> available;
  std::map<std::string, std::vector<GroundedAction>> blocked;
  std::map<GroundedAction, std::vector<Literal>> unmet;  // per blocked action, in precondition order

  bool is_available(const GroundedAction& action) const;
};

/// Schema order, then lexicographic args. Instance args within one action are distinct.
std::vector<GroundedAction> ground(const RobotModels& models);

std::vector<Literal> ground_patterns(const ActionSchema& schema, const std::vector<AtomPattern>& patterns,
                                     const GroundedAction& action);

ActionGraph evaluate(const Domain& domain, const std::vector<GroundedAction>& grounded,
                     const std::set<Literal>& state);

inline ActionGraph derive_graph(const RobotModels& models) {
  return evaluate(models.domain, ground(models), models.world.state);
}

struct Available {
  GroundedAction action;
};
struct Blocked {
  GroundedAction action;
  std::vector<Literal> unmet;
};
struct Absent {};
using Availability = std::variant<Available, Blocked, Absent>;

/// First action of `template_name` (mentioning `object_instance` when given), available first.
Availability find_action(const ActionGraph& graph, std::string_view template_name,
                         const std::optional<std::string>& object_instance);

/// Applies the add/delete effects of an action to the world (simulator bookkeeping).
WorldModel apply_effects(const RobotModels& models, const GroundedAction& action);

/// Blocked dictionary rendered the way the robot logs it:
///   # Dictionary containing ... \n{'key': [['tpl', 'arg', ...]], ...}
std::string dump_blocked(const ActionGraph& graph);

}  // namespace recon
