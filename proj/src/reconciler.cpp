#include "recon/reconciler.hpp"

#include <algorithm>

#include <spdlog/spdlog.h>

#include "recon/error.hpp"
#include "recon/prompts.hpp"

namespace recon {

using nlohmann::json;

std::string_view to_string(DivergenceKind kind) {
  switch (kind) {
    case DivergenceKind::general_object: return "D_GO";
    case DivergenceKind::specific_object: return "D_SO";
    case DivergenceKind::general_action: return "D_GA";
    case DivergenceKind::specific_action: return "D_SA";
    case DivergenceKind::false_divergence: return "FD";
  }
  return "?";
}

std::optional<DivergenceKind> divergence_from_string(std::string_view text) {
  for (auto k : {DivergenceKind::general_object, DivergenceKind::specific_object, DivergenceKind::general_action,
                 DivergenceKind::specific_action, DivergenceKind::false_divergence}) {
    if (to_string(k) == text) return k;
  }
  return std::nullopt;
}

DivergenceKind Divergence::kind() const {
  return static_cast<DivergenceKind>(payload.index());
}

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (const auto& p : parts) {
    if (!out.empty()) out += sep;
    out += p;
  }
  return out;
}

std::string action_text(const GroundedAction& a) {
  return a.template_name + "(" + join(a.args, ", ") + ")";
}

bool has_class_arg(const GroundedAction& action, const RobotModels& models, const std::string& cls) {
  return std::any_of(action.args.begin(), action.args.end(), [&](const std::string& arg) {
    auto parts = split_instance_symbol(arg);
    return parts && parts->first == cls && models.world.find(arg);
  });
}

}  // namespace

Explanation classify(const ParsedQuery& query, const RobotModels& models, const ActionGraph& graph,
                     const ObjectMatcher& matcher, const Lexicon& lexicon) {
  Explanation ex;
  ex.query = query;
  ex.matcher = matcher.name();
  const bool has_object = query.object.has_value();
  const std::string phrase = has_object ? query.object->text() : std::string{};

  // Step 1: object database.
  if (has_object) {
    const auto candidates = models.odb.names();
    MatchResult m;
    try {
      m = matcher.match(phrase, candidates, lexicon);
    } catch (const Error& e) {
      spdlog::warn("matcher '{}' failed, using deterministic: {}", matcher.name(), e.what());
      ex.notes.push_back(std::string("matcher fallback: ") + e.what());
      ex.matcher = "deterministic";
      m = match_object(phrase, candidates, lexicon);
    }
    if (!m.matched) {
      ex.trace.push_back({1, "no_match", phrase});
      ex.divergence.payload = GeneralObject{phrase};
      ex.rendered = render_template(ex, models, graph, lexicon);
      ex.render_style = "template";
      return ex;
    }
    ex.matched_class = m.matched;
    ex.trace.push_back({1, "match", *m.matched});
  } else {
    ex.trace.push_back({1, "skipped", "no object in query"});
  }

  const auto schemas = match_actions(query.action_phrase, models.domain, ex.matched_class, lexicon);
  auto relevant = [&](const GroundedAction& a) {
    return !ex.matched_class || has_class_arg(a, models, *ex.matched_class);
  };

  // Step 2: available actions.
  for (const auto* schema : schemas) {
    for (const auto& a : graph.available) {
      if (a.template_name == schema->template_name && relevant(a)) {
        ex.trace.push_back({2, "available", action_text(a)});
        ex.divergence.payload = FalseDivergence{a};
        ex.rendered = render_template(ex, models, graph, lexicon);
        ex.render_style = "template";
        return ex;
      }
    }
  }
  ex.trace.push_back({2, "not_available", schemas.empty() ? "no schema for '" + query.action_phrase + "'"
                                                          : std::to_string(schemas.size()) + " schema(s) checked"});

  // Step 3: world model.
  std::vector<ObjectInstance> instances;
  if (ex.matched_class) {
    instances = instances_of(models.world, *ex.matched_class);
    if (instances.empty()) {
      ex.trace.push_back({3, "no_instance", *ex.matched_class});
      ex.divergence.payload = SpecificObject{*ex.matched_class, phrase};
      ex.rendered = render_template(ex, models, graph, lexicon);
      ex.render_style = "template";
      return ex;
    }
    std::vector<std::string> symbols;
    for (const auto& i : instances) symbols.push_back(i.symbol());
    ex.trace.push_back({3, "instances", join(symbols, ", ")});
  } else {
    ex.trace.push_back({3, "skipped", "no object in query"});
  }

  // Step 4: blocked actions.
  for (const auto* schema : schemas) {
    std::vector<std::optional<std::string>> targets;
    if (instances.empty()) targets.push_back(std::nullopt);
    for (const auto& i : instances) targets.push_back(i.symbol());
    for (const auto& target : targets) {
      auto found = find_action(graph, schema->template_name, target);
      if (auto* b = std::get_if<Blocked>(&found)) {
        std::vector<std::string> keys;
        for (const auto& l : b->unmet) keys.push_back(serialize_literal(l));
        ex.trace.push_back({4, "blocked", action_text(b->action) + " unmet: " + join(keys, ", ")});
        ex.divergence.payload = SpecificAction{b->action, b->unmet};
        ex.rendered = render_template(ex, models, graph, lexicon);
        ex.render_style = "template";
        return ex;
      }
    }
  }
  std::string detail = "neither available nor blocked";
  if (!schemas.empty()) detail += " (schema matched but no grounding for the object)";
  ex.trace.push_back({4, "absent", detail});
  ex.divergence.payload =
      GeneralAction{query.action_phrase, has_object ? std::optional<std::string>(phrase) : std::nullopt};
  ex.rendered = render_template(ex, models, graph, lexicon);
  ex.render_style = "template";
  return ex;
}

std::string describe_literal(const Literal& literal, const RobotModels& models, const Lexicon& lexicon) {
  std::string pred = literal.predicate;
  const auto* decl = models.domain.find_predicate(pred);
  if (pred.starts_with(kNegationPrefix) && decl && !decl->aka.empty()) {
    pred = decl->aka.front();  // not_closed reads better as "open"
  } else {
    if (pred.starts_with(kNegationPrefix)) pred = "not " + pred.substr(kNegationPrefix.size());
    std::replace(pred.begin(), pred.end(), '_', ' ');
  }
  auto noun = [&](const std::string& s) { return "the " + display_name(lexicon, s); };
  switch (literal.args.size()) {
    case 0: return pred + " holds";
    case 1: return noun(literal.args[0]) + " is " + pred;
    default: {
      std::vector<std::string> rest;
      for (std::size_t i = 1; i < literal.args.size(); ++i) rest.push_back(noun(literal.args[i]));
      return noun(literal.args[0]) + " is " + pred + " " + join(rest, " and ");
    }
  }
}

namespace {

std::string object_noun(const Explanation& ex, const GroundedAction& action, const RobotModels& models,
                        const Lexicon& lexicon) {
  if (ex.query.object) return ex.query.object->text();
  for (const auto& arg : action.args) {
    if (!models.is_effector(arg)) return display_name(lexicon, arg);
  }
  return {};
}

std::string verb_and_object(const std::string& verb, const std::string& noun) {
  return noun.empty() ? verb : verb + " the " + noun;
}

// A grounded action that would make `literal` true, preferring available ones.
std::optional<GroundedAction> achiever(const Literal& literal, const RobotModels& models,
                                       const ActionGraph& graph) {
  auto adds = [&](const GroundedAction& a) {
    const auto* schema = models.domain.find_schema(a.template_name);
    if (!schema) return false;
    const auto effects = ground_patterns(*schema, schema->add_effects, a);
    return std::find(effects.begin(), effects.end(), literal) != effects.end();
  };
  for (const auto& a : graph.available) {
    if (adds(a)) return a;
  }
  for (const auto& [a, unmet] : graph.unmet) {
    if (adds(a)) return a;
  }
  return std::nullopt;
}

}  // namespace

std::string render_template(const Explanation& ex, const RobotModels& models, const ActionGraph& graph,
                            const Lexicon& lexicon) {
  const std::string& verb = ex.query.action_phrase;
  return std::visit(
      [&](const auto& p) -> std::string {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GeneralObject>) {
          return "I am sorry, I do not know what the " + p.phrase +
                 " is. It is not in my object database, so I cannot " +
                 verb_and_object(verb, p.phrase) + ".";
        } else if constexpr (std::is_same_v<T, SpecificObject>) {
          return "The " + p.phrase + " is not in my world model: I have not located one, so I cannot " +
                 verb_and_object(verb, p.phrase) + ".";
        } else if constexpr (std::is_same_v<T, GeneralAction>) {
          return "I am sorry, I have not been trained to " + verb_and_object(verb, p.object_phrase.value_or("")) +
                 ". That action is neither available nor blocked for me.";
        } else if constexpr (std::is_same_v<T, FalseDivergence>) {
          return "According to my world model I should be able to " +
                 verb_and_object(verb, object_noun(ex, p.action, models, lexicon)) + " right now.";
        } else {
          const auto& first = p.unmet.front();
          const std::string target = verb_and_object(verb, object_noun(ex, p.action, models, lexicon));
          std::string sentence;
          const auto fix = achiever(first, models, graph);
          const bool object_subject = !first.args.empty() && !models.is_effector(first.args.front());
          if (fix && object_subject) {
            const auto* schema = models.domain.find_schema(fix->template_name);
            sentence = "You need to " + schema->verbs.front() + " the " + display_name(lexicon, first.args.front()) +
                       " first. Only then can I " + target + ".";
          } else {
            sentence = "You need to make sure that " + describe_literal(first, models, lexicon) +
                       " before I can " + target + ".";
          }
          if (p.unmet.size() > 1) {
            sentence += " " + std::to_string(p.unmet.size() - 1) + " more precondition" +
                        (p.unmet.size() > 2 ? "s are" : " is") + " also unmet.";
          }
          return sentence;
        }
      },
      ex.divergence.payload);
}

void render(Explanation& ex, RenderStyle style, const RobotModels& models, const ActionGraph& graph,
            const Lexicon& lexicon, ChatClient* client, const std::string& model) {
  ex.rendered = render_template(ex, models, graph, lexicon);
  ex.render_style = "template";
  if (style != RenderStyle::llm) return;
  if (!client) {
    ex.notes.push_back("llm render unavailable: no backend");
    return;
  }
  ChatRequest req;
  req.model = model;
  req.messages.push_back({"user", fill_prompt(prompt_text("paraphrase"),
                                              {{"divergence", std::string(to_string(ex.divergence.kind()))},
                                               {"content", ex.rendered}})});
  try {
    auto answer = complete_with_final_answer(*client, req);
    if (!answer.value.is_object() || !answer.value.contains("reply") || !answer.value["reply"].is_string() ||
        answer.value["reply"].get<std::string>().empty()) {
      throw BackendError(BackendErrc::extraction, "no 'reply' string in final answer");
    }
    ex.rendered = answer.value["reply"].get<std::string>();
    ex.render_style = "llm";
  } catch (const Error& e) {
    ex.notes.push_back(std::string("llm render fallback: ") + e.what());
  }
}

json to_json(const GroundedAction& action) {
  json out = json::array({action.template_name});
  for (const auto& a : action.args) out.push_back(a);
  return out;
}

json to_json(const Divergence& d) {
  json out{{"kind", to_string(d.kind())}};
  std::visit(
      [&](const auto& p) {
        using T = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<T, GeneralObject>) {
          out["phrase"] = p.phrase;
        } else if constexpr (std::is_same_v<T, SpecificObject>) {
          out["class"] = p.class_name;
          out["phrase"] = p.phrase;
        } else if constexpr (std::is_same_v<T, GeneralAction>) {
          out["action_phrase"] = p.action_phrase;
          out["object_phrase"] = p.object_phrase ? json(*p.object_phrase) : json(nullptr);
        } else if constexpr (std::is_same_v<T, SpecificAction>) {
          out["action"] = to_json(p.action);
          json unmet = json::array();
          for (const auto& l : p.unmet) unmet.push_back(serialize_literal(l));
          out["unmet"] = unmet;
        } else {
          out["action"] = to_json(p.action);
        }
      },
      d.payload);
  return out;
}

json to_json(const Explanation& ex) {
  json trace = json::array();
  for (const auto& s : ex.trace) trace.push_back({{"step", s.step}, {"outcome", s.outcome}, {"detail", s.detail}});
  return {{"query", to_json(ex.query)},
          {"divergence", to_json(ex.divergence)},
          {"matched_class", ex.matched_class ? json(*ex.matched_class) : json(nullptr)},
          {"trace", trace},
          {"rendered", ex.rendered},
          {"render_style", ex.render_style},
          {"matcher", ex.matcher},
          {"notes", ex.notes}};
}

}  // namespace recon
