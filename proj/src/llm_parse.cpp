#include "recon/llm_parse.hpp"

#include "recon/error.hpp"
#include "recon/prompts.hpp"

namespace recon {

using nlohmann::json;

namespace {

ChatRequest single_prompt(const std::string& model, std::string text) {
  ChatRequest req;
  req.model = model;
  req.messages.push_back({"user", std::move(text)});
  return req;
}

std::string string_field(const json& node, const char* key) {
  auto it = node.find(key);
  return it != node.end() && it->is_string() ? it->get<std::string>() : std::string{};
}

}  // namespace

ParsedQuery llm_parse_query(ChatClient& client, const std::string& model, std::string_view text) {
  auto answer = complete_with_final_answer(
      client, single_prompt(model, fill_prompt(prompt_text("query_extraction"), {{"query", std::string(text)}})));
  return parsed_query_from_json(answer.value, text);
}

Rebuttal llm_parse_rebuttal(ChatClient& client, const std::string& model, const std::string& explanation,
                            std::string_view text) {
  auto answer = complete_with_final_answer(
      client, single_prompt(model, fill_prompt(prompt_text("rebuttal"),
                                               {{"explanation", explanation}, {"rebuttal", std::string(text)}})));
  const json& v = answer.value;
  Rebuttal out;
  out.raw = std::string(text);
  const std::string kind = v.is_object() ? string_field(v, "kind") : std::string{};
  if (kind == "object_assertion" && v.contains("object") && v["object"].is_object()) {
    ObjectPhrase p;
    p.noun = string_field(v["object"], "noun");
    if (auto a = v["object"].find("adjectives"); a != v["object"].end() && a->is_array()) {
      for (const auto& adj : *a) {
        if (adj.is_string()) p.adjectives.push_back(adj.get<std::string>());
      }
    }
    if (!p.noun.empty()) {
      out.payload = ObjectAssertion{std::move(p)};
      return out;
    }
  }
  if (kind == "state_assertion") {
    StateAssertion s{string_field(v, "subject"), string_field(v, "condition")};
    if (!s.condition_phrase.empty()) {
      out.payload = std::move(s);
      return out;
    }
  }
  throw Error(Errc::clarification, "could not tell what the rebuttal asserts");
}

}  // namespace recon
