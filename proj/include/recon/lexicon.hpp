#pragma once

#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace recon {

struct RobotModels;
struct LexiconExtras;

/// Token normalization vocabulary shared by the matchers and parsers.
/// Lookups are total: unknown tokens map to themselves.
struct Lexicon {
  std::map<std::string, std::string> synonyms;         // surface token -> canonical token
  std::map<std::string, std::string> phrase_synonyms;  // "pick up" -> "grasp"
  std::set<std::string> colors;
  std::set<std::string> stopwords;
  std::map<std::string, std::vector<std::string>> aliases;  // symbol base -> extra surface tokens
  std::map<std::string, std::vector<std::string>> glosses;  // class -> translation tokens
  bool use_glosses = true;

  std::string canonical(const std::string& token) const;
  bool is_color(const std::string& canonical_token) const { return colors.contains(canonical_token); }

  /// lowercase, phrase synonyms, strip punctuation, drop stopwords, strip plural `s`, map synonyms.
  std::vector<std::string> normalize(std::string_view text) const;

  /// Content tokens of a robot symbol: split on `_`, `$` and digits, then normalized.
  std::vector<std::string> symbol_tokens(std::string_view symbol) const;

  /// symbol_tokens plus aliases and (when enabled) glosses of the symbol's class.
  std::set<std::string> candidate_tokens(std::string_view symbol) const;
};

/// Lowercases and splits on anything that is not a letter or digit; apostrophes and hyphens
/// are deleted so "can't" -> "cant" and "blue-ish" -> "blueish".
std::vector<std::string> raw_words(std::string_view text);

std::string strip_plural(std::string token);

Lexicon default_lexicon();

/// Default lexicon extended with the scenario's classes, effectors and extras.
Lexicon lexicon_for(const RobotModels& models, const LexiconExtras& extras, bool use_glosses);

/// Human-readable noun for a robot symbol (first alias, else class name with spaces).
std::string display_name(const Lexicon& lexicon, std::string_view symbol);

}  // namespace recon
