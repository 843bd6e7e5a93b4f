#include "recon/lexicon.hpp"

#include <cctype>

#include "recon/literal.hpp"
#include "recon/model.hpp"
#include "recon/scenario.hpp"

namespace recon {

namespace {

std::string join(const std::vector<std::string>& words, std::size_t from, std::size_t count) {
  std::string out;
  for (std::size_t i = from; i < from + count; ++i) {
    if (i > from) out += ' ';
    out += words[i];
  }
  return out;
}

std::string_view class_part(std::string_view symbol) {
  return symbol.substr(0, symbol.find('$'));
}

}  // namespace

std::vector<std::string> raw_words(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (std::isalnum(c)) {
      cur += static_cast<char>(std::tolower(c));
    } else if (ch == '\'' || ch == '-') {
      continue;
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

std::string strip_plural(std::string token) {
  if (token.size() > 3 && token.back() == 's') token.pop_back();
  return token;
}

std::string Lexicon::canonical(const std::string& token) const {
  auto it = synonyms.find(token);
  return it == synonyms.end() ? token : it->second;
}

std::vector<std::string> Lexicon::normalize(std::string_view text) const {
  std::vector<std::string> words = raw_words(text);
  // Longest multi-word phrase first.
  std::vector<std::string> merged;
  for (std::size_t i = 0; i < words.size();) {
    bool replaced = false;
    for (std::size_t len = std::min<std::size_t>(3, words.size() - i); len >= 2 && !replaced; --len) {
      auto it = phrase_synonyms.find(join(words, i, len));
      if (it != phrase_synonyms.end()) {
        merged.push_back(it->second);
        i += len;
        replaced = true;
      }
    }
    if (!replaced) merged.push_back(words[i++]);
  }
  std::vector<std::string> out;
  for (auto& w : merged) {
    if (stopwords.contains(w)) continue;
    if (auto it = phrase_synonyms.find(w); it != phrase_synonyms.end()) {
      out.push_back(it->second);
      continue;
    }
    std::string token = canonical(w);
    if (token == w) token = canonical(strip_plural(w));
    if (!stopwords.contains(token)) out.push_back(std::move(token));
  }
  return out;
}

std::vector<std::string> Lexicon::symbol_tokens(std::string_view symbol) const {
  std::string spaced;
  for (char c : symbol) {
    spaced += (c == '_' || c == '$' || std::isdigit(static_cast<unsigned char>(c))) ? ' ' : c;
  }
  return normalize(spaced);
}

std::set<std::string> Lexicon::candidate_tokens(std::string_view symbol) const {
  auto base = symbol_tokens(symbol);
  std::set<std::string> out(base.begin(), base.end());
  const std::string cls(class_part(symbol));
  if (auto it = aliases.find(cls); it != aliases.end()) {
    for (const auto& a : it->second) {
      for (auto& t : normalize(a)) out.insert(std::move(t));
    }
  }
  if (use_glosses) {
    if (auto it = glosses.find(cls); it != glosses.end()) {
      for (const auto& g : it->second) {
        for (auto& t : normalize(g)) out.insert(std::move(t));
      }
    }
  }
  return out;
}

Lexicon default_lexicon() {
  Lexicon lex;
  lex.synonyms = {
      {"greenish", "green"},   {"blueish", "blue"},     {"bluish", "blue"},     {"reddish", "red"},
      {"yellowish", "yellow"}, {"purplish", "purple"},  {"lilac", "purple"},    {"violet", "purple"},
      {"grey", "gray"},        {"greyish", "gray"},     {"grayish", "gray"},    {"whitish", "white"},
      {"blackish", "black"},   {"pinkish", "pink"},     {"orangish", "orange"}, {"brownish", "brown"},
      {"cup", "mug"},          {"pick", "grasp"},       {"grab", "grasp"},      {"take", "grasp"},
      {"lift", "grasp"},       {"pickup", "grasp"},     {"shut", "close"},      {"drop", "release"},
      {"opened", "open"},
  };
  lex.phrase_synonyms = {
      {"pick up", "grasp"},  {"pick it up", "grasp"}, {"put down", "release"}, {"let go", "release"},
      {"set down", "release"}, {"pour from", "pour"}, {"pour into", "pour"},
  };
  lex.colors = {"red", "green", "blue", "yellow", "purple", "orange", "pink",
                "white", "black", "brown", "gray", "peach"};
  lex.stopwords = {"the", "a", "an", "this", "that", "these", "those", "my", "your", "his", "her",
                   "its", "our", "their", "some", "any", "of", "with", "there", "here", "is", "are",
                   "it", "please", "now", "on", "in", "at", "to", "from", "into", "one", "thing",
                   "object", "item", "again"};
  return lex;
}

Lexicon lexicon_for(const RobotModels& models, const LexiconExtras& extras, bool use_glosses) {
  Lexicon lex = default_lexicon();
  lex.use_glosses = use_glosses;
  for (const auto& c : models.odb.classes()) {
    if (!c.synonyms.empty()) lex.aliases[c.name] = c.synonyms;
    if (!c.gloss.empty()) lex.glosses[c.name] = c.gloss;
  }
  for (const auto& e : models.effectors) {
    if (!e.synonyms.empty()) lex.aliases[e.name] = e.synonyms;
  }
  for (const auto& [surface, canon] : extras.synonyms) {
    if (surface.find(' ') != std::string::npos) {
      lex.phrase_synonyms[surface] = canon;
    } else {
      lex.synonyms[surface] = canon;
    }
  }
  for (const auto& c : extras.colors) lex.colors.insert(c);
  return lex;
}

std::string display_name(const Lexicon& lexicon, std::string_view symbol) {
  const std::string cls(class_part(symbol));
  if (auto it = lexicon.aliases.find(cls); it != lexicon.aliases.end() && !it->second.empty()) {
    return it->second.front();
  }
  std::string out;
  for (char c : cls) out += c == '_' ? ' ' : c;
  return out;
}

}  // namespace recon
