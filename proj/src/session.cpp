#include "recon/session.hpp"

#include <spdlog/spdlog.h>

#include "recon/error.hpp"
#include "recon/llm_parse.hpp"

namespace recon {

using nlohmann::json;

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::idle: return "idle";
    case Phase::explained: return "explained";
    case Phase::recovering: return "recovering";
  }
  return "?";
}

Session::Session(Scenario scenario, EngineConfig config)
    : name_(std::move(scenario.name)),
      models_(std::move(scenario.models)),
      scene_(std::move(scenario.scene)),
      config_(std::move(config)) {
  lexicon_ = lexicon_for(models_, scenario.lexicon, config_.use_glosses);
  matcher_ = config_.matcher ? config_.matcher : std::make_shared<DeterministicMatcher>();
  if (scene_) models_ = perceive(*scene_, std::move(models_));
  graph_ = derive_graph(models_);
}

void Session::say(std::string role, std::string text) { history_.push_back({std::move(role), std::move(text)}); }

Explanation Session::explain(const ParsedQuery& query) {
  graph_ = derive_graph(models_);
  Explanation ex = classify(query, models_, graph_, *matcher_, lexicon_);
  render(ex, config_.render_style, models_, graph_, lexicon_, config_.chat.get(), config_.model);
  return ex;
}

Explanation Session::query(std::string_view text) {
  if (phase_ == Phase::recovering) {
    throw Error(Errc::phase, "a recovery is pending; send an end-effector pose or a move first");
  }
  ParsedQuery parsed;
  std::vector<std::string> notes;
  bool done = false;
  if (config_.llm_parsing && config_.chat) {
    try {
      parsed = llm_parse_query(*config_.chat, config_.model, text);
      done = true;
    } catch (const BackendError& e) {
      notes.push_back(std::string("query extraction fallback: ") + e.what());
    }
  }
  if (!done) parsed = parse_query(text);

  Explanation ex = explain(parsed);
  ex.notes.insert(ex.notes.begin(), notes.begin(), notes.end());
  say("user", std::string(text));
  say("robot", ex.rendered);
  last_ = ex;
  last_recovery_.reset();
  phase_ = Phase::explained;
  ++version_;
  return ex;
}

RecoveryOutcome Session::finish_recovery(RecoveryOutcome outcome) {
  graph_ = derive_graph(models_);
  if (outcome.kind == RecoveryKind::object_added_via_perception || outcome.kind == RecoveryKind::object_added_via_ee ||
      outcome.kind == RecoveryKind::state_overwritten) {
    Explanation again = explain(last_->query);
    outcome.message = "Thank you, I have corrected the issue. " + again.rendered;
    outcome.reclassified = again;
    last_ = std::move(again);
  }
  if (outcome.kind != RecoveryKind::movement_suggested && !(outcome.kind == RecoveryKind::no_oracle_match &&
                                                            outcome.awaiting_class)) {
    phase_ = Phase::idle;
    awaiting_class_.reset();
    awaiting_noun_.reset();
    suggested_move_.reset();
  } else {
    phase_ = Phase::recovering;
  }
  say("robot", outcome.message);
  last_recovery_ = outcome;
  ++version_;
  return outcome;
}

RecoveryOutcome Session::await_end_effector(RecoveryOutcome outcome, const std::string& class_name,
                                            const std::string& noun) {
  outcome.kind = RecoveryKind::no_oracle_match;
  outcome.awaiting_class = class_name;
  awaiting_class_ = class_name;
  awaiting_noun_ = noun;
  suggested_move_.reset();
  outcome.message += "Please drive my end effector to the " + noun + " so that I can add it at that pose.";
  return outcome;
}

RecoveryOutcome Session::case_object(const ObjectAssertion& assertion) {
  const std::string phrase = assertion.object.text();
  RecoveryOutcome out;

  // The class to add if the camera cannot help: the rebutted object, else the explanation's class.
  auto fallback_class = [&]() -> std::optional<std::string> {
    auto m = match_object(phrase, models_.odb.names(), lexicon_);
    return m.matched ? m.matched : last_->matched_class;
  };

  std::optional<OracleMatch> seen;
  try {
    seen = oracle_match(scene_ ? &*scene_ : nullptr, phrase, *matcher_, lexicon_);
  } catch (const Error& e) {
    if (e.code() != Errc::oracle_unavailable) throw;
    auto cls = fallback_class();
    if (!cls) {
      out.message = "I do not know what the " + phrase + " is, so I cannot add it.";
      return out;
    }
    out.message = "I cannot check my camera right now. ";
    return await_end_effector(out, *cls, phrase);
  }
  if (!seen) {
    auto cls = fallback_class();
    if (!cls) {
      out.message = "I cannot find the " + phrase + " in my camera image and I do not know it.";
      return out;
    }
    out.message = "I cannot find the " + phrase + " in my camera image. ";
    return await_end_effector(out, *cls, phrase);
  }
  out.oracle = seen;
  if (!models_.odb.contains(seen->class_name)) {
    out.message = "I can see the " + phrase + ", but it is not part of my object database, so I cannot add it.";
    return out;
  }
  if (seen->visible) {
    const WorldModel before = models_.world;
    models_ = perceive(*scene_, std::move(models_));
    out.events = diff_worlds(before, models_.world, "perception");
    if (!out.events.empty()) {
      out.kind = RecoveryKind::object_added_via_perception;
      return out;
    }
    out.message = "I can see the " + phrase + " but could not place it in my world model. ";
    return await_end_effector(out, seen->class_name, phrase);
  }
  if (auto move = suggest_movement(*scene_, seen->target)) {
    out.kind = RecoveryKind::movement_suggested;
    out.suggested_move = move;
    out.awaiting_class = seen->class_name;
    awaiting_class_ = seen->class_name;
    awaiting_noun_ = phrase;
    suggested_move_ = move;
    std::string why = "outside my field of view";
    if (seen->occluder) {
      const auto* occ = scene_->find(*seen->occluder);
      why = "hidden behind the " + display_name(lexicon_, occ->class_name);
    }
    std::string how = describe_move(*move);
    how = how.starts_with("turn ") ? "turn me " + how.substr(5) : "move me " + how;
    out.message = "The " + phrase + " is " + why + ". If you " + how + ", I should be able to see it.";
    return out;
  }
  out.message = "I cannot get a clear view of the " + phrase + ". ";
  return await_end_effector(out, seen->class_name, phrase);
}

RecoveryOutcome Session::rebuttal(std::string_view text) {
  if (phase_ != Phase::explained || !last_) throw Error(Errc::phase, "there is no explanation to rebut");
  const DivergenceKind kind = last_->divergence.kind();
  RecoveryOutcome out;

  if (kind == DivergenceKind::general_object || kind == DivergenceKind::general_action) {
    say("user", std::string(text));
    out.kind = RecoveryKind::not_recoverable;
    out.message = kind == DivergenceKind::general_object
                      ? "I cannot fix this on my own: an expert has to teach me this new object first."
                      : "I cannot fix this on my own: an expert has to teach me this new skill first.";
    return finish_recovery(out);
  }

  const RebuttalHint hint = kind == DivergenceKind::specific_action ? RebuttalHint::state : RebuttalHint::object;
  std::optional<Rebuttal> parsed;
  if (config_.llm_parsing && config_.chat) {
    try {
      parsed = llm_parse_rebuttal(*config_.chat, config_.model, last_->rendered, text);
    } catch (const BackendError& e) {
      spdlog::warn("rebuttal extraction fallback: {}", e.what());
    }
  }
  if (!parsed) parsed = parse_rebuttal(text, hint);

  if (parsed->is_object() && (kind == DivergenceKind::specific_object || kind == DivergenceKind::false_divergence)) {
    auto outcome = case_object(std::get<ObjectAssertion>(parsed->payload));
    say("user", std::string(text));
    return finish_recovery(std::move(outcome));
  }
  if (parsed->is_state() && kind == DivergenceKind::specific_action) {
    const auto& blocked = std::get<SpecificAction>(last_->divergence.payload);
    auto outcome = overwrite_from_assertion(models_, blocked, std::get<StateAssertion>(parsed->payload), lexicon_);
    say("user", std::string(text));
    return finish_recovery(std::move(outcome));
  }
  throw Error(Errc::clarification, kind == DivergenceKind::specific_action
                                       ? "Which state is different from what I believe?"
                                       : "Which object do you mean?");
}

RecoveryOutcome Session::ee_pose(const Pose& pose) {
  if (phase_ != Phase::recovering || !awaiting_class_) {
    throw Error(Errc::phase, "no object is waiting for an end-effector pose");
  }
  auto outcome = add_object_via_ee(models_, *awaiting_class_, pose);
  return finish_recovery(std::move(outcome));
}

MoveResult Session::apply_move(const BaseMove& move) {
  if (!scene_) throw Error(Errc::not_found, "scenario has no scene");
  Scene moved = recon::apply_move(*scene_, move);
  scene_ = std::move(moved);
  MoveResult result{move, {}, std::nullopt};
  const WorldModel before = models_.world;
  models_ = perceive(*scene_, std::move(models_));
  result.events = diff_worlds(before, models_.world, "perception");
  graph_ = derive_graph(models_);

  if (phase_ == Phase::recovering && awaiting_class_) {
    const std::string cls = *awaiting_class_;
    const bool added = std::any_of(result.events.begin(), result.events.end(), [&](const StateChange& c) {
      auto parts = split_instance_symbol(c.subject);
      return c.type == "instance_added" && parts && parts->first == cls;
    });
    RecoveryOutcome out;
    out.events = result.events;
    if (added) {
      out.kind = RecoveryKind::object_added_via_perception;
      result.recovery = finish_recovery(std::move(out));
    } else {
      out.message = "I still cannot see the " + awaiting_noun_.value_or(cls) + ". ";
      out = await_end_effector(std::move(out), cls, awaiting_noun_.value_or(cls));
      result.recovery = finish_recovery(std::move(out));
    }
    return result;
  }
  ++version_;
  return result;
}

std::vector<StateChange> Session::execute(const GroundedAction& action) {
  if (!graph_.is_available(action)) {
    throw Error(Errc::argument, "action " + action.template_name + " is not available");
  }
  const WorldModel before = models_.world;
  models_.world = apply_effects(models_, action);
  graph_ = derive_graph(models_);
  ++version_;
  return diff_worlds(before, models_.world, "execution");
}

void Session::alter_scene(std::int64_t id, const SceneChange& change) {
  if (!scene_) throw Error(Errc::not_found, "scenario has no scene");
  scene_ = remove_or_alter_object(*scene_, id, change);
  ++version_;
}

json to_json(const ActionGraph& graph) {
  json available = json::array();
  for (const auto& a : graph.available) available.push_back(to_json(a));
  json blocked = json::object();
  for (const auto& [key, actions] : graph.blocked) {
    json list = json::array();
    for (const auto& a : actions) list.push_back(to_json(a));
    blocked[key] = list;
  }
  return {{"available", available}, {"blocked", blocked}, {"blocked_text", dump_blocked(graph)}};
}

json to_json(const SceneView& v) {
  json out = json::array();
  for (const auto& o : v.objects) {
    out.push_back({{"id", o.id},
                   {"visible", o.visible},
                   {"in_fov", o.in_fov},
                   {"occluder", o.occluder ? json(*o.occluder) : json(nullptr)},
                   {"distance", o.distance}});
  }
  return out;
}

json Session::state() const {
  json instances = json::array();
  for (const auto& i : models_.world.instances) instances.push_back(to_json(i));
  json literals = json::array();
  for (const auto& l : models_.world.state) literals.push_back(serialize_literal(l));
  json history = json::array();
  for (const auto& t : history_) history.push_back({{"role", t.role}, {"text", t.text}});
  json scene = nullptr;
  if (scene_) {
    scene = to_json(*scene_);
    scene["view"] = to_json(view(*scene_));
  }
  return {{"scenario", name_},
          {"version", version_},
          {"phase", to_string(phase_)},
          {"world", {{"instances", instances}, {"state", literals}, {"next_id", models_.world.next_id}}},
          {"effectors", [&] {
             json e = json::array();
             for (const auto& eff : models_.effectors) e.push_back(eff.name);
             return e;
           }()},
          {"graph", to_json(graph_)},
          {"scene", scene},
          {"history", history},
          {"last_explanation", last_ ? to_json(*last_) : json(nullptr)},
          {"last_recovery", last_recovery_ ? to_json(*last_recovery_) : json(nullptr)},
          {"pending",
           {{"awaiting_class", awaiting_class_ ? json(*awaiting_class_) : json(nullptr)},
            {"suggested_move", suggested_move_ ? to_json(*suggested_move_) : json(nullptr)}}}};
}

}  // namespace recon
