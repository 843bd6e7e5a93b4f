#include "recon/nl.hpp"

#include <algorithm>
#include <cctype>
#include <set>

#include "recon/error.hpp"

namespace recon {

using nlohmann::json;

namespace {

const std::string kBoundary = "|";

// Words plus clause-boundary markers for , . ? ! ; :
std::vector<std::string> clause_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  auto flush = [&] {
    if (!cur.empty()) out.push_back(std::move(cur));
    cur.clear();
  };
  std::string ascii(text);
  // Typographic apostrophe (U+2019) behaves like '.
  for (std::size_t pos; (pos = ascii.find("\xe2\x80\x99")) != std::string::npos;) ascii.replace(pos, 3, "'");
  for (char ch : ascii) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (ch == '\'' || ch == '-') {
      continue;
    } else {
      flush();
      if (std::string_view(",.?!;:").find(ch) != std::string_view::npos) {
        if (out.empty() || out.back() != kBoundary) out.push_back(kBoundary);
      }
    }
  }
  flush();
  return out;
}

bool in(const std::set<std::string>& set, const std::string& w) { return set.contains(w); }

const std::set<std::string> kTriggers = {"not", "cannot", "cant", "unable", "couldnt", "wont",
                                         "doesnt", "dont", "didnt", "isnt", "arent"};
const std::set<std::string> kLeadFiller = {"why", "how", "come", "hey", "robot", "please", "can", "could",
                                           "would", "will", "you", "i", "we", "do", "does", "is", "it",
                                           "so", "ok", "okay", "what", "about", "lets", "let", "us",
                                           "me", "edan", "well", "but", "and", "try", "to"};
const std::set<std::string> kSubjectFiller = {"i", "you", "we", "robot", "the", "it", "be", "able", "to",
                                              "even", "just", "still", "yet", "really", "seem", "seems",
                                              "manage", "me", "us", "edan", "currently"};
const std::set<std::string> kParticles = {"up", "down", "out", "off", "away", "over"};
const std::set<std::string> kDeterminers = {"the", "a", "an", "my", "this", "that", "these", "those", "some",
                                            "your", "any", "our", "with", "from", "into", "in", "on",
                                            "to", "of", "for", "at"};
const std::set<std::string> kNounStops = {"now", "please", "again", "here", "there", "today", "anymore",
                                          "right", "what", "why", "when", "because", "and", "or", "but",
                                          "if", "so", "then", "with", "from", "into", "to", "on", "in",
                                          "for", "of", "at", "by", "using", "yet", "already", "either",
                                          "is", "are", "behind", "next", "near", "over", "under", "first",
                                          "too", "anyway", "instead"};
const std::set<std::string> kPronouns = {"it", "them", "this", "that", "something", "anything"};
const std::set<std::string> kNotVerbs = {"the", "a", "an", "my", "your", "it", "this", "that", "is", "are"};

const std::set<std::string> kRebuttalFiller = {"but", "no", "actually", "well", "hey", "robot", "look", "listen",
                                               "oh", "however", "yes", "right", "now", "edan", "so", "and",
                                               "wait", "hmm", "sorry", "currently", "in", "fact"};
const std::set<std::string> kCopulas = {"is", "are", "s", "isnt", "arent", "was", "were"};
const std::set<std::string> kAdverbs = {"actually", "really", "definitely", "already", "now", "right",
                                        "totally", "completely", "indeed", "still", "currently", "obviously",
                                        "clearly", "in", "fact", "just", "certainly", "surely", "very"};
const std::set<std::string> kPresence = {"there", "here", "present", "visible", "nearby", "around"};
// "the bowl is behind the box": a location, so the sentence claims the object exists.
const std::set<std::string> kLocatives = {"behind", "under", "underneath", "beneath", "next", "near", "beside",
                                          "by", "on", "in", "inside", "over", "at", "left", "front", "beyond"};

ObjectPhrase noun_phrase(const std::vector<std::string>& words, std::size_t& i) {
  while (i < words.size() && in(kDeterminers, words[i])) ++i;
  std::vector<std::string> chunk;
  while (i < words.size() && words[i] != kBoundary && !in(kNounStops, words[i])) chunk.push_back(words[i++]);
  ObjectPhrase phrase;
  if (chunk.empty()) return phrase;
  phrase.noun = chunk.back();
  chunk.pop_back();
  phrase.adjectives = std::move(chunk);
  return phrase;
}

[[noreturn]] void unparseable(std::string_view text) {
  throw Error(Errc::unparseable, "could not find an action in '" + std::string(text) +
                                     "'; please rephrase, e.g. \"Why can you not grasp the mug?\"");
}

}  // namespace

std::string ObjectPhrase::text() const {
  std::string out;
  for (const auto& a : adjectives) out += a + " ";
  return out + noun;
}

ParsedQuery parse_query(std::string_view text) {
  const auto words = clause_words(text);
  std::size_t i = words.size();
  for (std::size_t k = 0; k < words.size(); ++k) {
    if (in(kTriggers, words[k])) {
      i = k + 1;
      break;
    }
  }
  if (i == words.size() || i > words.size()) {
    i = 0;
    while (i < words.size() && (words[i] == kBoundary || in(kLeadFiller, words[i]))) ++i;
  }
  while (i < words.size() && (words[i] == kBoundary || in(kSubjectFiller, words[i]))) ++i;
  if (i >= words.size() || in(kNotVerbs, words[i]) || in(kTriggers, words[i])) unparseable(text);

  ParsedQuery query;
  query.raw = std::string(text);
  query.action_phrase = words[i++];
  if (i < words.size() && in(kParticles, words[i])) query.action_phrase += " " + words[i++];

  if (i < words.size() && in(kPronouns, words[i])) {
    ++i;
    if (i < words.size() && in(kParticles, words[i])) query.action_phrase += " " + words[i++];
  }
  auto object = noun_phrase(words, i);
  if (!object.noun.empty() && !in(kPronouns, object.noun)) query.object = std::move(object);
  return query;
}

Rebuttal parse_rebuttal(std::string_view text, RebuttalHint hint) {
  auto words = clause_words(text);
  Rebuttal out;
  out.raw = std::string(text);

  std::size_t i = 0;
  while (i < words.size() && (words[i] == kBoundary || in(kRebuttalFiller, words[i]))) ++i;
  std::vector<std::string> rest(words.begin() + static_cast<std::ptrdiff_t>(i), words.end());

  auto object_after = [&](std::size_t from) -> std::optional<Rebuttal> {
    std::size_t j = from;
    auto np = noun_phrase(rest, j);
    if (np.noun.empty() || in(kPronouns, np.noun)) return std::nullopt;
    Rebuttal r;
    r.raw = out.raw;
    r.payload = ObjectAssertion{std::move(np)};
    return r;
  };

  // "there is a green cup (there)", "there's ..."
  for (std::size_t k = 0; k < rest.size(); ++k) {
    if ((rest[k] == "there" && k + 1 < rest.size() && (rest[k + 1] == "is" || rest[k + 1] == "are")) ||
        rest[k] == "theres") {
      if (auto r = object_after(k + (rest[k] == "theres" ? 1 : 2))) return *r;
    }
    if (rest[k] == "see" || (rest[k] == "look" && k + 1 < rest.size() && rest[k + 1] == "at")) {
      if (auto r = object_after(k + (rest[k] == "see" ? 1 : 2))) return *r;
    }
  }

  // "<subject> is <condition>"
  for (std::size_t k = 0; k < rest.size(); ++k) {
    if (!in(kCopulas, rest[k]) || rest[k] == kBoundary) continue;
    std::vector<std::string> subject;
    for (std::size_t s = 0; s < k; ++s) {
      if (rest[s] == kBoundary) {
        subject.clear();
        continue;
      }
      if (!in(kDeterminers, rest[s]) && !in(kRebuttalFiller, rest[s])) subject.push_back(rest[s]);
    }
    std::vector<std::string> condition;
    if (rest[k] == "isnt" || rest[k] == "arent") condition.push_back("not");
    for (std::size_t c = k + 1; c < rest.size() && rest[c] != kBoundary; ++c) {
      if (!in(kAdverbs, rest[c])) condition.push_back(rest[c]);
    }
    if (subject.empty() || condition.empty()) continue;
    std::string subject_text;
    for (const auto& w : subject) subject_text += (subject_text.empty() ? "" : " ") + w;
    if (in(kPresence, condition.front()) || in(kLocatives, condition.front()) || condition.front() == "right") {
      ObjectPhrase np{subject.back(), {subject.begin(), subject.end() - 1}};
      out.payload = ObjectAssertion{std::move(np)};
      return out;
    }
    std::string condition_text;
    for (const auto& w : condition) condition_text += (condition_text.empty() ? "" : " ") + w;
    out.payload = StateAssertion{subject_text, condition_text};
    return out;
  }

  if (hint == RebuttalHint::object) {
    if (auto r = object_after(0)) return *r;
  }
  throw Error(Errc::clarification, "I did not understand '" + std::string(text) +
                                       "'. Please tell me which object is there, or what state something is in.");
}

json extract_final_answer(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  const auto marker = lower.rfind("final answer");
  if (marker == std::string::npos) throw Error(Errc::extraction, "no 'Final answer' marker in model output");

  std::size_t i = marker + std::string_view("final answer").size();
  auto skip_noise = [&] {
    while (i < text.size()) {
      const char c = text[i];
      if (std::isspace(static_cast<unsigned char>(c)) || c == ':' || c == '*' || c == '`' || c == '-' || c == '=') {
        ++i;
      } else if (lower.compare(i, 4, "json") == 0) {
        i += 4;
      } else {
        break;
      }
    }
  };
  skip_noise();
  if (i >= text.size()) throw Error(Errc::extraction, "nothing after the 'Final answer' marker");

  const char open = text[i];
  if (open == '{' || open == '[') {
    int depth = 0;
    bool in_string = false;
    bool escaped = false;
    for (std::size_t j = i; j < text.size(); ++j) {
      const char c = text[j];
      if (in_string) {
        if (escaped) escaped = false;
        else if (c == '\\') escaped = true;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{' || c == '[') ++depth;
      else if (c == '}' || c == ']') {
        if (--depth == 0) {
          try {
            return json::parse(text.substr(i, j - i + 1));
          } catch (const json::exception& e) {
            throw Error(Errc::extraction, std::string("malformed JSON after 'Final answer': ") + e.what());
          }
        }
      }
    }
    throw Error(Errc::extraction, "unbalanced JSON after 'Final answer'");
  }
  if (open == '"') {
    std::size_t j = i + 1;
    bool escaped = false;
    for (; j < text.size(); ++j) {
      if (escaped) escaped = false;
      else if (text[j] == '\\') escaped = true;
      else if (text[j] == '"') break;
    }
    if (j >= text.size()) throw Error(Errc::extraction, "unterminated string after 'Final answer'");
    try {
      return json::parse(text.substr(i, j - i + 1));
    } catch (const json::exception& e) {
      throw Error(Errc::extraction, e.what());
    }
  }
  std::size_t j = i;
  while (j < text.size() && (std::isalnum(static_cast<unsigned char>(text[j])) || text[j] == '.' || text[j] == '-' ||
                             text[j] == '+')) {
    ++j;
  }
  std::string token(lower.substr(i, j - i));
  while (!token.empty() && token.back() == '.') token.pop_back();
  if (token == "true") return true;
  if (token == "false") return false;
  if (token == "null") return nullptr;
  if (!token.empty() && (std::isdigit(static_cast<unsigned char>(token.front())) || token.front() == '-')) {
    try {
      return json::parse(token);
    } catch (const json::exception&) {
    }
  }
  throw Error(Errc::extraction, "no JSON value after 'Final answer'");
}

json to_json(const ParsedQuery& query) {
  json out = {{"action", query.action_phrase}, {"raw", query.raw}, {"object", nullptr}};
  if (query.object) out["object"] = {{"noun", query.object->noun}, {"adjectives", query.object->adjectives}};
  return out;
}

json to_json(const Rebuttal& rebuttal) {
  if (const auto* o = std::get_if<ObjectAssertion>(&rebuttal.payload)) {
    return {{"kind", "object_assertion"},
            {"object", {{"noun", o->object.noun}, {"adjectives", o->object.adjectives}}},
            {"raw", rebuttal.raw}};
  }
  const auto& s = std::get<StateAssertion>(rebuttal.payload);
  return {{"kind", "state_assertion"},
          {"subject", s.subject_phrase},
          {"condition", s.condition_phrase},
          {"raw", rebuttal.raw}};
}

ParsedQuery parsed_query_from_json(const json& node, std::string_view raw) {
  ParsedQuery q;
  q.raw = std::string(raw);
  if (!node.is_object() || !node.contains("action") || !node["action"].is_string() ||
      node["action"].get<std::string>().empty()) {
    throw Error(Errc::unparseable, "extraction did not name an action");
  }
  q.action_phrase = node["action"].get<std::string>();
  if (auto it = node.find("object"); it != node.end() && it->is_object()) {
    ObjectPhrase p;
    if (auto n = it->find("noun"); n != it->end() && n->is_string()) p.noun = n->get<std::string>();
    if (auto a = it->find("adjectives"); a != it->end() && a->is_array()) {
      for (const auto& adj : *a) {
        if (adj.is_string()) p.adjectives.push_back(adj.get<std::string>());
      }
    }
    if (!p.noun.empty()) q.object = std::move(p);
  }
  return q;
}

}  // namespace recon
