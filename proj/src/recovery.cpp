#include "recon/recovery.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>

#include "recon/error.hpp"

namespace recon {

using nlohmann::json;

std::string_view to_string(RecoveryKind kind) {
  switch (kind) {
    case RecoveryKind::object_added_via_perception: return "object_added_via_perception";
    case RecoveryKind::object_added_via_ee: return "object_added_via_ee";
    case RecoveryKind::state_overwritten: return "state_overwritten";
    case RecoveryKind::movement_suggested: return "movement_suggested";
    case RecoveryKind::no_oracle_match: return "no_oracle_match";
    case RecoveryKind::not_recoverable: return "not_recoverable";
  }
  return "?";
}

std::vector<StateChange> diff_worlds(const WorldModel& before, const WorldModel& after,
                                     const std::string& provenance) {
  std::vector<StateChange> out;
  for (const auto& inst : after.instances) {
    if (!before.find(inst.symbol())) out.push_back({"instance_added", inst.symbol(), provenance});
  }
  for (const auto& inst : before.instances) {
    if (!after.find(inst.symbol())) out.push_back({"instance_removed", inst.symbol(), provenance});
  }
  for (const auto& lit : before.state) {
    if (!after.state.contains(lit)) out.push_back({"literal_removed", serialize_literal(lit), provenance});
  }
  for (const auto& lit : after.state) {
    if (!before.state.contains(lit)) out.push_back({"literal_added", serialize_literal(lit), provenance});
  }
  return out;
}

std::optional<OracleMatch> oracle_match(const Scene* scene, const std::string& phrase, const ObjectMatcher& matcher,
                                        const Lexicon& lexicon) {
  if (scene == nullptr) throw Error(Errc::oracle_unavailable, "no scene or external oracle configured");
  std::vector<std::string> classes;
  for (const auto& o : scene->objects) {
    if (std::find(classes.begin(), classes.end(), o.class_name) == classes.end()) classes.push_back(o.class_name);
  }
  MatchResult m;
  try {
    m = matcher.match(phrase, classes, lexicon);
  } catch (const Error&) {
    m = match_object(phrase, classes, lexicon);
  }
  if (!m.matched) return std::nullopt;

  const SceneView seen = view(*scene);
  const SceneObject* pick = nullptr;
  for (const auto& o : scene->objects) {
    if (o.class_name != *m.matched) continue;
    if (pick == nullptr) pick = &o;
    if (seen.find(o.id)->visible) {
      pick = &o;
      break;
    }
  }
  const auto* v = seen.find(pick->id);
  return OracleMatch{pick->id, pick->class_name, v->visible, v->in_fov, v->occluder};
}

std::vector<BaseMove> movement_candidates(const Scene& scene, std::int64_t target) {
  const SceneObject* obj = scene.find(target);
  if (obj == nullptr) return {};
  auto facing = [&](Vec2 from) {
    const Vec2 to = obj->position - from;
    return wrap_angle(std::atan2(to.y, to.x) - scene.robot.heading);
  };
  std::vector<BaseMove> out{{{0.0, 0.0}, 0.0}, {{0.0, 0.0}, facing(scene.robot.position)}};
  // N, NE, E, SE, S, SW, W, NW with N = +y.
  for (double dist : {0.5, 1.0}) {
    for (int k = 0; k < 8; ++k) {
      const double bearing = std::numbers::pi / 2 - k * std::numbers::pi / 4;
      const Vec2 delta{dist * std::cos(bearing), dist * std::sin(bearing)};
      out.push_back({delta, facing(scene.robot.position + delta)});
    }
  }
  return out;
}

std::optional<BaseMove> suggest_movement(const Scene& scene, std::int64_t target) {
  for (const auto& move : movement_candidates(scene, target)) {
    if (norm(move.delta) > scene.max_step + 1e-12 || std::abs(move.heading_change) > scene.max_turn + 1e-12) {
      continue;
    }
    const SceneView seen = view(apply_move(scene, move));
    const auto* v = seen.find(target);
    if (v != nullptr && v->visible) return move;
  }
  return std::nullopt;
}

std::string describe_move(const BaseMove& move) {
  static const char* names[] = {"east", "north-east", "north", "north-west", "west", "south-west", "south", "south-east"};
  char buf[96];
  const double dist = norm(move.delta);
  if (dist < 1e-9) {
    if (std::abs(move.heading_change) < 1e-9) return "stay where I am";
    std::snprintf(buf, sizeof buf, "turn %s by %.0f degrees", move.heading_change > 0 ? "left" : "right",
                  std::abs(move.heading_change) * 180.0 / std::numbers::pi);
    return buf;
  }
  const double angle = std::atan2(move.delta.y, move.delta.x);
  int sector = static_cast<int>(std::lround(angle / (std::numbers::pi / 4)));
  sector = ((sector % 8) + 8) % 8;
  std::snprintf(buf, sizeof buf, "%.1f m %s", dist, names[sector]);
  return buf;
}

RecoveryOutcome add_object_via_ee(RobotModels& models, const std::string& class_name, const Pose& ee_pose) {
  RecoveryOutcome out;
  if (!models.odb.contains(class_name)) {
    out.kind = RecoveryKind::not_recoverable;
    out.message = "I do not know objects of type " + class_name + ", so I cannot add one to my world model.";
    return out;
  }
  const WorldModel before = models.world;
  auto [world, inst] = insert_instance(models, class_name, ee_pose);
  models.world = std::move(world);
  out.kind = RecoveryKind::object_added_via_ee;
  out.events = diff_worlds(before, models.world, "end_effector");
  out.message = "I added " + inst.symbol() + " at the end-effector pose.";
  return out;
}

namespace {

std::set<std::string> token_set(const Lexicon& lex, std::string_view text) {
  auto v = lex.normalize(text);
  return {v.begin(), v.end()};
}

// Surface forms of a predicate: its name (with `not_` read as "not") and its aka phrases.
std::vector<std::set<std::string>> predicate_forms(const RobotModels& models, const Lexicon& lex,
                                                   const std::string& predicate) {
  std::string spaced = predicate;
  std::replace(spaced.begin(), spaced.end(), '_', ' ');
  std::vector<std::set<std::string>> out{token_set(lex, spaced)};
  if (const auto* decl = models.domain.find_predicate(predicate)) {
    for (const auto& aka : decl->aka) out.push_back(token_set(lex, aka));
  }
  return out;
}

bool subject_matches(const std::set<std::string>& subject, const Literal& literal, const Lexicon& lex) {
  if (subject.empty()) return true;  // "it is free"
  const std::vector<std::string> q(subject.begin(), subject.end());
  return std::any_of(literal.args.begin(), literal.args.end(), [&](const std::string& arg) {
    return match_score(q, lex.candidate_tokens(arg)) >= kMatchThreshold;
  });
}

}  // namespace

Literal resolve_state_assertion(const StateAssertion& assertion, const SpecificAction& blocked,
                                const RobotModels& models, const Lexicon& lexicon) {
  const auto subject = token_set(lexicon, assertion.subject_phrase);
  const auto condition = token_set(lexicon, assertion.condition_phrase);
  if (condition.empty()) throw Error(Errc::clarification, "which state do you mean?");
  for (const auto& unmet : blocked.unmet) {
    std::vector<Literal> forms{unmet};
    if (auto pair = models.domain.paired_predicate(unmet.predicate)) forms.push_back({*pair, unmet.args});
    for (const auto& lit : forms) {
      if (!subject_matches(subject, lit, lexicon)) continue;
      if (models.world.state.contains(lit)) continue;  // restates the current belief, unblocks nothing
      for (const auto& f : predicate_forms(models, lexicon, lit.predicate)) {
        if (f == condition) return lit;
      }
    }
  }
  throw Error(Errc::clarification, "I could not relate \"" + assertion.subject_phrase + " is " +
                                       assertion.condition_phrase + "\" to the precondition blocking the action");
}

RecoveryOutcome overwrite_from_assertion(RobotModels& models, const SpecificAction& blocked,
                                         const StateAssertion& assertion, const Lexicon& lexicon) {
  const Literal lit = resolve_state_assertion(assertion, blocked, models, lexicon);
  const WorldModel before = models.world;
  models.world = overwrite_literal(models, lit, true);
  RecoveryOutcome out;
  out.kind = RecoveryKind::state_overwritten;
  out.events = diff_worlds(before, models.world, "user_assertion");
  out.message = "I set " + serialize_literal(lit) + " in my world model.";
  return out;
}

json to_json(const StateChange& c) {
  return {{"type", c.type}, {"subject", c.subject}, {"provenance", c.provenance}};
}

json to_json(const OracleMatch& m) {
  return {{"target", m.target},
          {"class", m.class_name},
          {"visible", m.visible},
          {"in_fov", m.in_fov},
          {"occluder", m.occluder ? json(*m.occluder) : json(nullptr)}};
}

json to_json(const BaseMove& m) {
  return {{"delta", {m.delta.x, m.delta.y}}, {"heading_change", m.heading_change}, {"text", describe_move(m)}};
}

json to_json(const RecoveryOutcome& o) {
  json events = json::array();
  for (const auto& e : o.events) events.push_back(to_json(e));
  return {{"kind", to_string(o.kind)},
          {"events", events},
          {"message", o.message},
          {"oracle", o.oracle ? to_json(*o.oracle) : json(nullptr)},
          {"suggested_move", o.suggested_move ? to_json(*o.suggested_move) : json(nullptr)},
          {"awaiting_class", o.awaiting_class ? json(*o.awaiting_class) : json(nullptr)},
          {"reclassified", o.reclassified ? to_json(*o.reclassified) : json(nullptr)}};
}

}  // namespace recon
