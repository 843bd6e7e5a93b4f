#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <json.hpp>

namespace recon {

struct ObjectPhrase {
  std::string noun;
  std::vector<std::string> adjectives;

  std::string text() const;  // adjectives then noun, space separated
  bool operator==(const ObjectPhrase&) const = default;
};

struct ParsedQuery {
  std::string action_phrase;
  std::optional<ObjectPhrase> object;
  std::string raw;
};

struct ObjectAssertion {
  ObjectPhrase object;
};

struct StateAssertion {
  std::string subject_phrase;
  std::string condition_phrase;  // "free", "closed", "not closed"
};

struct Rebuttal {
  std::variant<ObjectAssertion, StateAssertion> payload;
  std::string raw;

  bool is_object() const { return std::holds_alternative<ObjectAssertion>(payload); }
  bool is_state() const { return std::holds_alternative<StateAssertion>(payload); }
};

/// What the rebuttal parser knows about the explanation being rebutted.
enum class RebuttalHint { none, object, state };

/// Template grammar for "Why can(not) I/you {action} {object}?"-style questions.
/// Throws Errc::unparseable when no action can be found.
ParsedQuery parse_query(std::string_view text);

/// Object vs state assertion. Throws Errc::clarification when unclassifiable.
Rebuttal parse_rebuttal(std::string_view text, RebuttalHint hint = RebuttalHint::none);

/// Locates the last `Final answer` marker and parses the first balanced JSON value after it.
/// Throws Errc::extraction.
nlohmann::json extract_final_answer(std::string_view text);

nlohmann::json to_json(const ParsedQuery& query);
nlohmann::json to_json(const Rebuttal& rebuttal);
ParsedQuery parsed_query_from_json(const nlohmann::json& node, std::string_view raw);

}  // namespace recon
