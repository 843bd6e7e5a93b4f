#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recon/action_graph.hpp"
#include "recon/chat.hpp"
#include "recon/lexicon.hpp"
#include "recon/matcher.hpp"
#include "recon/reconciler.hpp"
#include "recon/recovery.hpp"
#include "recon/scenario.hpp"

namespace recon {

enum class Phase { idle, explained, recovering };

std::string_view to_string(Phase phase);

struct EngineConfig {
  std::shared_ptr<const ObjectMatcher> matcher;  // null: deterministic
  std::shared_ptr<ChatClient> chat;              // null: no LLM features
  std::string model;
  bool llm_parsing = false;  // query/rebuttal extraction through `chat`
  RenderStyle render_style = RenderStyle::template_text;
  bool use_glosses = true;
};

struct Turn {
  std::string role;  // user | robot
  std::string text;
};

struct MoveResult {
  BaseMove move;
  std::vector<StateChange> events;  // what perception added after the move
  std::optional<RecoveryOutcome> recovery;
};

/// One reconciliation dialogue. Not thread-safe; the owner serializes calls.
/// Every successful mutating call increments the version exactly once.
class Session {
 public:
  /// Runs perception once when the scenario has a scene.
  Session(Scenario scenario, EngineConfig config = {});

  /// Phase idle or explained. Throws Errc::unparseable, Errc::phase.
  Explanation query(std::string_view text);

  /// Phase explained. Throws Errc::clarification (no mutation), Errc::phase.
  RecoveryOutcome rebuttal(std::string_view text);

  /// Phase recovering with an object awaiting a pose. Throws Errc::phase.
  RecoveryOutcome ee_pose(const Pose& pose);

  /// Any phase; re-runs perception. Throws Errc::out_of_bounds, Errc::not_found (no scene).
  MoveResult apply_move(const BaseMove& move);

  /// Applies an available action's effects to the beliefs (simulated execution).
  std::vector<StateChange> execute(const GroundedAction& action);

  /// Changes ground truth only.
  void alter_scene(std::int64_t id, const SceneChange& change);

  Phase phase() const { return phase_; }
  std::uint64_t version() const { return version_; }
  const std::string& scenario_name() const { return name_; }
  const RobotModels& models() const { return models_; }
  const std::optional<Scene>& scene() const { return scene_; }
  const ActionGraph& graph() const { return graph_; }
  const Lexicon& lexicon() const { return lexicon_; }
  const std::vector<Turn>& history() const { return history_; }
  const std::optional<Explanation>& last_explanation() const { return last_; }
  const std::optional<RecoveryOutcome>& last_recovery() const { return last_recovery_; }

  nlohmann::json state() const;

 private:
  Explanation explain(const ParsedQuery& query);
  RecoveryOutcome finish_recovery(RecoveryOutcome outcome);
  RecoveryOutcome await_end_effector(RecoveryOutcome outcome, const std::string& class_name,
                                     const std::string& noun);
  RecoveryOutcome case_object(const ObjectAssertion& assertion);
  void say(std::string role, std::string text);

  std::string name_;
  RobotModels models_;
  std::optional<Scene> scene_;
  Lexicon lexicon_;
  EngineConfig config_;
  std::shared_ptr<const ObjectMatcher> matcher_;
  ActionGraph graph_;
  Phase phase_ = Phase::idle;
  std::uint64_t version_ = 0;
  std::vector<Turn> history_;
  std::optional<Explanation> last_;
  std::optional<RecoveryOutcome> last_recovery_;
  std::optional<std::string> awaiting_class_;
  std::optional<std::string> awaiting_noun_;
  std::optional<BaseMove> suggested_move_;
};

nlohmann::json to_json(const ActionGraph& graph);
nlohmann::json to_json(const SceneView& view);

}  // namespace recon
