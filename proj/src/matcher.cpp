#include "recon/matcher.hpp"

#include <algorithm>

#include "recon/error.hpp"
#include "recon/prompts.hpp"

namespace recon {

using nlohmann::json;

double match_score(const std::vector<std::string>& phrase_tokens, const std::set<std::string>& candidate_tokens) {
  const std::set<std::string> query(phrase_tokens.begin(), phrase_tokens.end());
  if (query.empty()) return 0.0;
  std::size_t hits = 0;
  for (const auto& t : query) hits += candidate_tokens.contains(t) ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(query.size());
}

namespace {

bool colours_agree(const std::vector<std::string>& query, const std::set<std::string>& candidate, const Lexicon& lex) {
  std::set<std::string> q;
  for (const auto& t : query) {
    if (lex.is_color(t)) q.insert(t);
  }
  bool candidate_has_colour = false;
  for (const auto& t : candidate) {
    if (!lex.is_color(t)) continue;
    candidate_has_colour = true;
    if (q.contains(t)) return true;
  }
  return q.empty() || !candidate_has_colour;
}

struct Scored {
  std::string symbol;
  double score;
  std::size_t size;
  bool eligible;
};

std::vector<Scored> score_all(const std::string& phrase, const std::vector<std::string>& candidates,
                              const Lexicon& lexicon) {
  const auto query = lexicon.normalize(phrase);
  std::vector<Scored> out;
  for (const auto& c : candidates) {
    const auto tokens = lexicon.candidate_tokens(c);
    const double s = match_score(query, tokens);
    out.push_back({c, s, tokens.size(), s >= kMatchThreshold && colours_agree(query, tokens, lexicon)});
  }
  std::sort(out.begin(), out.end(), [](const Scored& a, const Scored& b) {
    if (a.score != b.score) return a.score > b.score;
    if (a.size != b.size) return a.size < b.size;
    return a.symbol < b.symbol;
  });
  return out;
}

}  // namespace

MatchResult match_object(const std::string& phrase, const std::vector<std::string>& candidates,
                         const Lexicon& lexicon) {
  MatchResult result;
  result.backend = "deterministic";
  result.candidates_considered = candidates.size();
  const auto scored = score_all(phrase, candidates, lexicon);
  if (!scored.empty()) result.score = scored.front().score;
  for (const auto& s : scored) {
    if (s.eligible) {
      result.matched = s.symbol;
      result.score = s.score;
      break;
    }
  }
  return result;
}

ChatRequest LlmMatcher::build_request(const std::string& phrase, const std::vector<std::string>& candidates,
                                      const Lexicon& lexicon) const {
  json list = json::array();
  for (const auto& c : candidates) {
    std::string entry = c;
    if (lexicon.use_glosses) {
      if (auto it = lexicon.glosses.find(c.substr(0, c.find('$'))); it != lexicon.glosses.end()) {
        std::string gloss;
        for (const auto& g : it->second) gloss += (gloss.empty() ? "" : ", ") + g;
        entry += " (" + gloss + ")";
      }
    }
    list.push_back(entry);
  }
  ChatRequest req;
  req.model = model_;
  req.messages.push_back(
      {"user", fill_prompt(prompt_text("object_match"),
                           {{"object_mentioned", json::array({phrase}).dump()}, {"odb_list", list.dump()}})});
  return req;
}

MatchResult LlmMatcher::match(const std::string& phrase, const std::vector<std::string>& candidates,
                              const Lexicon& lexicon) const {
  MatchResult result;
  result.backend = "llm";
  result.candidates_considered = candidates.size();
  if (candidates.empty()) return result;

  auto answer = complete_with_final_answer(*client_, build_request(phrase, candidates, lexicon));
  const auto& value = answer.value;
  if (!value.is_object() || !value.contains("yes") || !value["yes"].is_array()) {
    throw BackendError(BackendErrc::extraction, "Final answer lacks a 'yes' list: " + value.dump());
  }
  if (value["yes"].empty()) return result;

  // The prompt only answers yes/no; the candidate the model named in its reasoning wins.
  const auto thought_end = answer.text.rfind("inal answer");
  const std::string reasoning = answer.text.substr(0, thought_end);
  std::vector<std::string> mentioned;
  for (const auto& c : candidates) {
    if (reasoning.find(c) != std::string::npos) mentioned.push_back(c);
  }
  const auto ranked = match_object(phrase, mentioned.empty() ? candidates : mentioned, lexicon);
  if (ranked.matched) {
    result.matched = ranked.matched;
  } else {
    auto pool = mentioned.empty() ? candidates : mentioned;
    const auto query = lexicon.normalize(phrase);
    result.matched = *std::max_element(pool.begin(), pool.end(), [&](const auto& a, const auto& b) {
      const double sa = match_score(query, lexicon.candidate_tokens(a));
      const double sb = match_score(query, lexicon.candidate_tokens(b));
      return sa != sb ? sa < sb : a > b;
    });
  }
  result.score = 1.0;
  return result;
}

std::vector<const ActionSchema*> match_actions(const std::string& verb_phrase, const Domain& domain,
                                               const std::optional<std::string>& matched_class,
                                               const Lexicon& lexicon) {
  const auto verb_tokens = lexicon.normalize(verb_phrase);
  const std::set<std::string> wanted(verb_tokens.begin(), verb_tokens.end());
  std::vector<const ActionSchema*> out;
  for (const auto& schema : domain.schemas) {
    bool hit = false;
    for (const auto& verb : schema.verbs) {
      for (const auto& t : lexicon.normalize(verb)) hit = hit || wanted.contains(t);
    }
    if (!hit) continue;
    if (matched_class) {
      const bool admits = std::any_of(schema.params.begin(), schema.params.end(), [&](const Param& p) {
        return !p.is_effector() && domain.admits(p, *matched_class);
      });
      if (!admits) continue;
    }
    out.push_back(&schema);
  }
  return out;
}

const ActionSchema* match_action(const std::string& verb_phrase, const Domain& domain,
                                 const std::optional<std::string>& matched_class, const Lexicon& lexicon) {
  auto all = match_actions(verb_phrase, domain, matched_class, lexicon);
  return all.empty() ? nullptr : all.front();
}

}  // namespace recon
