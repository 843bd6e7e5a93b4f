#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "recon/lexicon.hpp"
#include "recon/matcher.hpp"
#include "recon/model.hpp"
#include "recon/nl.hpp"
#include "recon/reconciler.hpp"
#include "recon/scene.hpp"

namespace recon {

enum class RecoveryKind {
  object_added_via_perception,
  object_added_via_ee,
  state_overwritten,
  movement_suggested,  // Case 1 intermediate: occluded target, base move pending
  no_oracle_match,
  not_recoverable,
};

std::string_view to_string(RecoveryKind kind);

/// One change to the robot's beliefs. `type` is instance_added, literal_added or literal_removed.
struct StateChange {
  std::string type;
  std::string subject;  // instance symbol or serialized literal
  std::string provenance;  // perception | end_effector | user_assertion
  bool operator==(const StateChange&) const = default;
};

/// Instance and literal differences between two worlds, instances first.
std::vector<StateChange> diff_worlds(const WorldModel& before, const WorldModel& after, const std::string& provenance);

struct OracleMatch {
  std::int64_t target = 0;
  std::string class_name;
  bool visible = false;
  bool in_fov = false;
  std::optional<std::int64_t> occluder;
};

struct RecoveryOutcome {
  RecoveryKind kind = RecoveryKind::not_recoverable;
  std::vector<StateChange> events;
  std::string message;
  std::optional<OracleMatch> oracle;
  std::optional<BaseMove> suggested_move;
  std::optional<std::string> awaiting_class;  // class to insert once an EE pose arrives
  std::optional<Explanation> reclassified;
};

/// Simulated oracle: matches the phrase against the classes present in the scene, then reports
/// the visibility of the first object of the matched class (scene order, visible ones first).
/// Throws Errc::oracle_unavailable when there is no scene.
std::optional<OracleMatch> oracle_match(const Scene* scene, const std::string& phrase, const ObjectMatcher& matcher,
                                        const Lexicon& lexicon);

/// Candidate base moves in evaluation order: zero move, turn in place, then the eight compass
/// headings (N = +y) at 0.5 m and at 1.0 m, each turning to face the target.
std::vector<BaseMove> movement_candidates(const Scene& scene, std::int64_t target);

/// First candidate within the scene's move bounds after which the target is visible.
std::optional<BaseMove> suggest_movement(const Scene& scene, std::int64_t target);

/// "1.0 m north" style description of a move.
std::string describe_move(const BaseMove& move);

/// Inserts an instance of `class_name` at the end-effector pose. A class outside the object
/// database yields not_recoverable and leaves `models` untouched.
RecoveryOutcome add_object_via_ee(RobotModels& models, const std::string& class_name, const Pose& ee_pose);

/// Literal a state assertion asks to make true, chosen among the unmet preconditions of `blocked`
/// and their `not_` pairs. Throws Errc::clarification when nothing matches.
Literal resolve_state_assertion(const StateAssertion& assertion, const SpecificAction& blocked,
                                const RobotModels& models, const Lexicon& lexicon);

/// Case 2: overwrites the world with the resolved literal.
RecoveryOutcome overwrite_from_assertion(RobotModels& models, const SpecificAction& blocked,
                                         const StateAssertion& assertion, const Lexicon& lexicon);

nlohmann::json to_json(const StateChange& change);
nlohmann::json to_json(const OracleMatch& match);
nlohmann::json to_json(const BaseMove& move);
nlohmann::json to_json(const RecoveryOutcome& outcome);

}  // namespace recon
