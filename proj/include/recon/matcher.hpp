#pragma once

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "recon/chat.hpp"
#include "recon/domain.hpp"
#include "recon/lexicon.hpp"

namespace recon {

inline constexpr double kMatchThreshold = 0.5;

struct MatchResult {
  std::optional<std::string> matched;
  double score = 0.0;
  std::size_t candidates_considered = 0;
  std::string backend;
};

/// Token-overlap score |Q ∩ C| / |Q| of a phrase against one candidate symbol.
double match_score(const std::vector<std::string>& phrase_tokens, const std::set<std::string>& candidate_tokens);

/// Deterministic matcher: score >= 0.5 and colour agreement; ties by score, fewer candidate
/// tokens, then lexicographic symbol.
MatchResult match_object(const std::string& phrase, const std::vector<std::string>& candidates,
                         const Lexicon& lexicon);

class ObjectMatcher {
 public:
  virtual ~ObjectMatcher() = default;
  virtual MatchResult match(const std::string& phrase, const std::vector<std::string>& candidates,
                            const Lexicon& lexicon) const = 0;
  virtual std::string name() const = 0;
};

class DeterministicMatcher final : public ObjectMatcher {
 public:
  MatchResult match(const std::string& phrase, const std::vector<std::string>& candidates,
                    const Lexicon& lexicon) const override {
    return match_object(phrase, candidates, lexicon);
  }
  std::string name() const override { return "deterministic"; }
};

/// Object-database prompt (Thought / Final answer with "yes"/"no" lists) against a chat backend.
class LlmMatcher final : public ObjectMatcher {
 public:
  LlmMatcher(std::shared_ptr<ChatClient> client, std::string model)
      : client_(std::move(client)), model_(std::move(model)) {}

  /// Throws BackendError on transport or extraction failure.
  MatchResult match(const std::string& phrase, const std::vector<std::string>& candidates,
                    const Lexicon& lexicon) const override;
  std::string name() const override { return "llm"; }

  ChatRequest build_request(const std::string& phrase, const std::vector<std::string>& candidates,
                            const Lexicon& lexicon) const;

 private:
  std::shared_ptr<ChatClient> client_;
  std::string model_;
};

/// Schemas whose verbs intersect the normalized verb tokens, restricted to schemas admitting
/// `matched_class` when given. Source order.
std::vector<const ActionSchema*> match_actions(const std::string& verb_phrase, const Domain& domain,
                                               const std::optional<std::string>& matched_class,
                                               const Lexicon& lexicon);

const ActionSchema* match_action(const std::string& verb_phrase, const Domain& domain,
                                 const std::optional<std::string>& matched_class, const Lexicon& lexicon);

}  // namespace recon
