#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

#include "recon/action_graph.hpp"
#include "recon/chat.hpp"
#include "recon/lexicon.hpp"
#include "recon/matcher.hpp"
#include "recon/model.hpp"
#include "recon/nl.hpp"

namespace recon {

enum class DivergenceKind { general_object, specific_object, general_action, specific_action, false_divergence };

/// "D_GO", "D_SO", "D_GA", "D_SA", "FD".
std::string_view to_string(DivergenceKind kind);
std::optional<DivergenceKind> divergence_from_string(std::string_view text);

struct GeneralObject {
  std::string phrase;
};
struct SpecificObject {
  std::string class_name;
  std::string phrase;
};
struct GeneralAction {
  std::string action_phrase;
  std::optional<std::string> object_phrase;
};
struct SpecificAction {
  GroundedAction action;
  std::vector<Literal> unmet;  // nonempty
};
struct FalseDivergence {
  GroundedAction action;
};

struct Divergence {
  std::variant<GeneralObject, SpecificObject, GeneralAction, SpecificAction, FalseDivergence> payload;
  DivergenceKind kind() const;
};

struct TraceStep {
  int step = 0;  // 1..4
  std::string outcome;
  std::string detail;
};

struct Explanation {
  ParsedQuery query;
  Divergence divergence;
  std::optional<std::string> matched_class;
  std::vector<TraceStep> trace;
  std::string rendered;
  std::string render_style;  // template | llm
  std::string matcher;       // backend that produced the step 1 decision
  std::vector<std::string> notes;
};

/// Runs the four explanation steps in order and stops at the first decisive one.
/// A failing matcher backend falls back to the deterministic matcher (noted in the trace);
/// the result is rendered with the template style.
Explanation classify(const ParsedQuery& query, const RobotModels& models, const ActionGraph& graph,
                     const ObjectMatcher& matcher, const Lexicon& lexicon);

/// Deterministic first-person sentence for an explanation.
std::string render_template(const Explanation& explanation, const RobotModels& models, const ActionGraph& graph,
                            const Lexicon& lexicon);

enum class RenderStyle { template_text, llm };

/// Sets `rendered` and `render_style`. The llm style paraphrases the template sentence through
/// `client`; on any backend failure it keeps the template sentence and adds a note.
void render(Explanation& explanation, RenderStyle style, const RobotModels& models, const ActionGraph& graph,
            const Lexicon& lexicon, ChatClient* client = nullptr, const std::string& model = {});

/// Human-readable phrase for a state literal ("the gripper is free").
std::string describe_literal(const Literal& literal, const RobotModels& models, const Lexicon& lexicon);

nlohmann::json to_json(const Divergence& divergence);
nlohmann::json to_json(const Explanation& explanation);
nlohmann::json to_json(const GroundedAction& action);

}  // namespace recon
