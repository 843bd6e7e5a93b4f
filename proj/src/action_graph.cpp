#include "recon/action_graph.hpp"

#include <algorithm>

#include "recon/error.hpp"

namespace recon {

bool GroundedAction::mentions(std::string_view symbol) const {
  return std::find(args.begin(), args.end(), symbol) != args.end();
}

bool ActionGraph::is_available(const GroundedAction& action) const {
  return std::find(available.begin(), available.end(), action) != available.end();
}

std::vector<GroundedAction> ground(const RobotModels& models) {
  std::vector<GroundedAction> out;
  for (const auto& schema : models.domain.schemas) {
    std::vector<std::vector<std::string>> choices;
    for (const auto& param : schema.params) {
      std::vector<std::string> options;
      if (param.is_effector()) {
        for (const auto& e : models.effectors) options.push_back(e.name);
      } else {
        for (const auto& inst : models.world.instances) {
          if (models.domain.admits(param, inst.class_name)) options.push_back(inst.symbol());
        }
      }
      std::sort(options.begin(), options.end());
      choices.push_back(std::move(options));
    }
    if (std::any_of(choices.begin(), choices.end(), [](const auto& c) { return c.empty(); })) continue;

    std::vector<std::size_t> index(choices.size(), 0);
    while (true) {
      GroundedAction action{schema.template_name, {}};
      std::set<std::string> used_instances;
      bool distinct = true;
      for (std::size_t i = 0; i < choices.size(); ++i) {
        const auto& sym = choices[i][index[i]];
        if (!schema.params[i].is_effector() && !used_instances.insert(sym).second) distinct = false;
        action.args.push_back(sym);
      }
      if (distinct) out.push_back(std::move(action));
      // Odometer increment, last parameter fastest: yields lexicographic arg order.
      bool done = true;
      for (std::size_t k = choices.size(); k-- > 0;) {
        if (++index[k] < choices[k].size()) {
          done = false;
          break;
        }
        index[k] = 0;
      }
      if (done) break;
    }
  }
  return out;
}

std::vector<Literal> ground_patterns(const ActionSchema& schema, const std::vector<AtomPattern>& patterns,
                                     const GroundedAction& action) {
  std::vector<Literal> out;
  out.reserve(patterns.size());
  for (const auto& pattern : patterns) {
    Literal lit{pattern.predicate, {}};
    for (const auto& var : pattern.vars) {
      const auto idx = schema.param_index(var);
      if (idx == std::string::npos || idx >= action.args.size()) {
        throw Error(Errc::argument, "action " + action.template_name + " does not bind " + var);
      }
      lit.args.push_back(action.args[idx]);
    }
    out.push_back(std::move(lit));
  }
  return out;
}

ActionGraph evaluate(const Domain& domain, const std::vector<GroundedAction>& grounded,
                     const std::set<Literal>& state) {
  ActionGraph graph;
  for (const auto& action : grounded) {
    const auto* schema = domain.find_schema(action.template_name);
    if (schema == nullptr) throw Error(Errc::argument, "unknown action template " + action.template_name);
    std::vector<Literal> missing;
    for (auto& lit : ground_patterns(*schema, schema->preconditions, action)) {
      if (!state.contains(lit) && std::find(missing.begin(), missing.end(), lit) == missing.end()) {
        missing.push_back(std::move(lit));
      }
    }
    if (missing.empty()) {
      graph.available.push_back(action);
      continue;
    }
    for (const auto& lit : missing) graph.blocked[serialize_literal(lit)].push_back(action);
    graph.unmet.emplace(action, std::move(missing));
  }
  return graph;
}

Availability find_action(const ActionGraph& graph, std::string_view template_name,
                         const std::optional<std::string>& object_instance) {
  auto wanted = [&](const GroundedAction& a) {
    return a.template_name == template_name && (!object_instance || a.mentions(*object_instance));
  };
  for (const auto& a : graph.available) {
    if (wanted(a)) return Available{a};
  }
  for (const auto& [action, unmet] : graph.unmet) {
    if (wanted(action)) return Blocked{action, unmet};
  }
  return Absent{};
}

WorldModel apply_effects(const RobotModels& models, const GroundedAction& action) {
  const auto* schema = models.domain.find_schema(action.template_name);
  if (schema == nullptr) throw Error(Errc::argument, "unknown action template " + action.template_name);
  if (action.args.size() != schema->params.size()) {
    throw Error(Errc::argument, "wrong argument count for " + action.template_name);
  }
  RobotModels next = models;
  for (const auto& lit : ground_patterns(*schema, schema->delete_effects, action)) next.world.state.erase(lit);
  for (const auto& lit : ground_patterns(*schema, schema->add_effects, action)) {
    next.world = overwrite_literal(next, lit, true);
  }
  return next.world;
}

std::string dump_blocked(const ActionGraph& graph) {
  std::string out =
      "# Dictionary containing the disabled actions as values in lists\n"
      "# and the respective unmet preconditions as keys\n{";
  bool first_key = true;
  for (const auto& [key, actions] : graph.blocked) {
    if (!first_key) out += ",\n ";
    first_key = false;
    out += "'" + key + "': [";
    for (std::size_t i = 0; i < actions.size(); ++i) {
      if (i > 0) out += ", ";
      out += "['" + actions[i].template_name + "'";
      for (const auto& arg : actions[i].args) out += ", '" + arg + "'";
      out += "]";
    }
    out += "]";
  }
  out += "}\n";
  return out;
}

}  // namespace recon
