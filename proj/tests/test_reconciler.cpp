#include <doctest.h>

#include <fstream>
#include <map>

#include "recon/action_graph.hpp"
#include "recon/error.hpp"
#include "recon/reconciler.hpp"
#include "support.hpp"

using namespace recon;
using recon::test::Gen;
using recon::test::golden;
using nlohmann::json;

namespace {

Explanation ask(const Scenario& sc, const std::string& text) {
  const auto lex = lexicon_for(sc.models, sc.lexicon, true);
  return classify(parse_query(text), sc.models, derive_graph(sc.models), DeterministicMatcher{}, lex);
}

class BrokenMatcher final : public ObjectMatcher {
 public:
  MatchResult match(const std::string&, const std::vector<std::string>&, const Lexicon&) const override {
    throw BackendError(BackendErrc::transport, "down");
  }
  std::string name() const override { return "llm"; }
};

// Class table for the generated scenarios: the alias the user says and the schemas it may take part in.
struct ClassInfo {
  std::string name;
  std::string alias;
};
const std::vector<ClassInfo> kClasses = {{"mug_peach", "mug"},
                                         {"thermos_blue", "thermos"},
                                         {"apple_green", "apple"},
                                         {"op_microwave", "microwave"},
                                         {"drawer_handle", "drawer"}};

const std::map<std::string, std::vector<std::string>> kVerbTemplates = {
    {"grasp", {"grasp_sct.yml"}},
    {"pick up", {"grasp_sct.yml"}},
    {"release", {"release_sct.yml"}},
    {"open", {"open_microwave_sct.yml", "open_drawer_sct.yml"}},
    {"close", {"close_microwave_sct.yml", "close_drawer_sct.yml"}},
    {"pour", {"pour_from_sct.yml"}},
    {"cut", {}},
};

const std::map<std::string, std::set<std::string>> kAdmits = {
    {"grasp_sct.yml", {"mug_peach", "thermos_blue", "apple_green"}},
    {"release_sct.yml", {"mug_peach", "thermos_blue", "apple_green"}},
    {"open_microwave_sct.yml", {"op_microwave"}},
    {"close_microwave_sct.yml", {"op_microwave"}},
    {"open_drawer_sct.yml", {"drawer_handle"}},
    {"close_drawer_sct.yml", {"drawer_handle"}},
    {"pour_from_sct.yml", {"thermos_blue", "mug_peach"}},
};

const std::vector<std::string> kSchemaOrder = {"grasp_sct.yml",          "release_sct.yml",
                                               "open_microwave_sct.yml", "close_microwave_sct.yml",
                                               "open_drawer_sct.yml",    "close_drawer_sct.yml",
                                               "pour_from_sct.yml"};

json household_domain() {
  std::ifstream in(recon::test::scenario_path("microwave_closed"));
  return json::parse(in)["domain"];
}

struct Generated {
  json doc;
  std::set<std::string> odb;
  std::string verb;
  std::optional<std::string> alias;
};

Generated generate(Gen& g, const json& domain) {
  Generated out;
  json odb = json::array();
  for (const auto& c : kClasses) {
    if (g.coin(0.75)) {
      out.odb.insert(c.name);
      odb.push_back({{"name", c.name}, {"synonyms", {c.alias}}});
    }
  }
  json instances = json::array();
  std::set<std::string> state;
  std::vector<std::string> present(out.odb.begin(), out.odb.end());
  const int n = present.empty() ? 0 : g.uniform(0, 4);
  std::vector<std::string> symbols;
  for (int i = 0; i < n; ++i) {
    const auto& cls = g.pick(present);
    const auto sym = cls + "$" + std::to_string(i + 1);
    instances.push_back({{"class", cls}, {"id", i + 1}, {"pose", {0.1 * i, 0, 0}}});
    symbols.push_back(sym);
    if (g.coin(0.8)) state.insert("located_" + sym);
    const int door = g.uniform(0, 2);
    if (door == 1) state.insert("closed_" + sym);
    if (door == 2) state.insert("not_closed_" + sym);
    if (g.coin(0.3)) state.insert("filled_" + sym);
  }
  if (!symbols.empty() && g.coin(0.35)) {
    state.insert("bind_" + g.pick(symbols) + " edan_hand");
  } else if (g.coin(0.8)) {
    state.insert("free_edan_hand");
  }
  out.doc = {{"name", "generated"},
             {"object_database", odb},
             {"effectors", {{{"name", "edan_hand"}, {"synonyms", {"gripper"}}}}},
             {"domain", domain},
             {"world", {{"instances", instances}, {"state", state}, {"next_id", n + 1}}}};
  std::vector<std::string> verbs;
  for (const auto& [v, _] : kVerbTemplates) verbs.push_back(v);
  out.verb = g.pick(verbs);
  const int obj = g.uniform(0, 6);
  if (obj < 5) out.alias = kClasses[static_cast<std::size_t>(obj)].alias;
  if (obj == 5) out.alias = "pineapple";
  return out;
}

struct Expected {
  DivergenceKind kind;
  std::optional<GroundedAction> action;
  std::set<std::string> first_blocked_schema;  // acceptable templates for a D_SA answer
};

// Walks the four questions directly over the graph, without the classifier's helpers.
Expected oracle(const Generated& gen, const RobotModels& models, const ActionGraph& graph) {
  std::optional<std::string> cls;
  if (gen.alias) {
    for (const auto& c : kClasses) {
      if (c.alias == *gen.alias && gen.odb.contains(c.name)) cls = c.name;
    }
    if (!cls) return {DivergenceKind::general_object, std::nullopt, {}};
  }
  std::vector<std::string> templates;
  for (const auto& t : kSchemaOrder) {
    const auto& vt = kVerbTemplates.at(gen.verb);
    if (std::find(vt.begin(), vt.end(), t) == vt.end()) continue;
    if (cls && !kAdmits.at(t).contains(*cls)) continue;
    templates.push_back(t);
  }
  auto about = [&](const GroundedAction& a) {
    if (!cls) return true;
    for (const auto& arg : a.args) {
      if (arg.rfind(*cls + "$", 0) == 0) return true;
    }
    return false;
  };
  for (const auto& t : templates) {
    for (const auto& a : graph.available) {
      if (a.template_name == t && about(a)) return {DivergenceKind::false_divergence, a, {}};
    }
  }
  if (cls) {
    bool any = false;
    for (const auto& i : models.world.instances) any = any || i.class_name == *cls;
    if (!any) return {DivergenceKind::specific_object, std::nullopt, {}};
  }
  for (const auto& t : templates) {
    for (const auto& [a, unmet] : graph.unmet) {
      if (a.template_name == t && about(a)) return {DivergenceKind::specific_action, std::nullopt, {t}};
    }
  }
  return {DivergenceKind::general_action, std::nullopt, {}};
}

}  // namespace

TEST_CASE("walkthrough frames") {
  struct Case {
    const char* frame;
    const char* query;
    DivergenceKind kind;
  };
  const Case cases[] = {
      {"walk_unknown_object", "Why can you not pick up the pineapple?", DivergenceKind::general_object},
      {"walk_unknown_skill", "Why can you not cut the apple?", DivergenceKind::general_action},
      {"walk_mug_unseen", "Why can you not pick up the mug?", DivergenceKind::specific_object},
      {"walk_mug_seen", "Why can you not pick up the mug now?", DivergenceKind::false_divergence},
      {"walk_hand_busy", "Why can you not pick up the thermos?", DivergenceKind::specific_action},
  };
  for (const auto& c : cases) {
    CAPTURE(c.frame);
    auto ex = ask(golden(c.frame), c.query);
    CHECK(ex.divergence.kind() == c.kind);
    CHECK_FALSE(ex.rendered.empty());
    CHECK(ex.render_style == "template");
    CHECK_FALSE(ex.trace.empty());
  }
  auto sa = ask(golden("walk_hand_busy"), "Why can you not pick up the thermos?");
  const auto& payload = std::get<SpecificAction>(sa.divergence.payload);
  CHECK(payload.action.template_name == "grasp_sct.yml");
  REQUIRE_FALSE(payload.unmet.empty());
  auto go = ask(golden("walk_unknown_object"), "Why can you not pick up the pineapple?");
  CHECK(std::get<GeneralObject>(go.divergence.payload).phrase == "pineapple");
  CHECK(go.trace.size() == 1);
}

TEST_CASE("closed microwave explanation names the missing state and its achiever") {
  auto ex = ask(golden("microwave_closed"), "Why can I not close the microwave?");
  REQUIRE(ex.divergence.kind() == DivergenceKind::specific_action);
  const auto& sa = std::get<SpecificAction>(ex.divergence.payload);
  CHECK(sa.action == GroundedAction{"close_microwave_sct.yml", {"op_microwave$1", "edan_hand"}});
  REQUIRE(sa.unmet.size() == 1);
  CHECK(serialize_literal(sa.unmet[0]) == "not_closed_op_microwave$1");
  CHECK(ex.rendered == "You need to open the microwave first. Only then can I close the microwave.");
  auto j = to_json(ex);
  CHECK(j["divergence"]["kind"] == "D_SA");
}

TEST_CASE("matcher failure falls back to the deterministic matcher") {
  auto sc = golden("walk_hand_busy");
  const auto lex = lexicon_for(sc.models, sc.lexicon, true);
  auto ex = classify(parse_query("Why can you not pick up the thermos?"), sc.models, derive_graph(sc.models),
                     BrokenMatcher{}, lex);
  CHECK(ex.divergence.kind() == DivergenceKind::specific_action);
  CHECK(ex.matcher == "deterministic");
  REQUIRE_FALSE(ex.notes.empty());
  CHECK(ex.notes[0].find("transport") != std::string::npos);
}

TEST_CASE("llm rendering without a backend keeps the template") {
  auto sc = golden("microwave_closed");
  const auto lex = lexicon_for(sc.models, sc.lexicon, true);
  const auto graph = derive_graph(sc.models);
  auto ex = classify(parse_query("Why can I not close the microwave?"), sc.models, graph, DeterministicMatcher{}, lex);
  const auto before = ex.rendered;
  render(ex, RenderStyle::llm, sc.models, graph, lex, nullptr, "");
  CHECK(ex.rendered == before);
  CHECK(ex.render_style == "template");
  CHECK_FALSE(ex.notes.empty());
}

TEST_CASE("classification is total and follows the question order on generated scenarios") {
  Gen g(0x5eed0009);
  const auto domain = household_domain();
  std::map<DivergenceKind, int> seen;
  for (int trial = 0; trial < 1500; ++trial) {
    auto gen = generate(g, domain);
    const std::string query =
        "Why can you not " + gen.verb + (gen.alias ? " the " + *gen.alias : std::string()) + "?";
    CAPTURE(gen.doc.dump());
    CAPTURE(query);
    auto sc = load_scenario(gen.doc);
    const auto graph = derive_graph(sc.models);
    const auto lex = lexicon_for(sc.models, sc.lexicon, true);
    Explanation ex;
    REQUIRE_NOTHROW(ex = classify(parse_query(query), sc.models, graph, DeterministicMatcher{}, lex));
    const auto want = oracle(gen, sc.models, graph);
    CHECK(ex.divergence.kind() == want.kind);
    CHECK_FALSE(ex.rendered.empty());
    ++seen[ex.divergence.kind()];
    if (want.kind == DivergenceKind::false_divergence && ex.divergence.kind() == want.kind) {
      CHECK(std::get<FalseDivergence>(ex.divergence.payload).action == *want.action);
      CHECK(graph.is_available(*want.action));
    }
    if (want.kind == DivergenceKind::specific_action && ex.divergence.kind() == want.kind) {
      const auto& sa = std::get<SpecificAction>(ex.divergence.payload);
      CHECK(want.first_blocked_schema.contains(sa.action.template_name));
      REQUIRE(graph.unmet.contains(sa.action));
      CHECK(sa.unmet == graph.unmet.at(sa.action));
      CHECK_FALSE(sa.unmet.empty());
      CHECK_FALSE(graph.is_available(sa.action));
    }
    // The trace stops at the deciding step.
    const int last = ex.trace.back().step;
    switch (ex.divergence.kind()) {
      case DivergenceKind::general_object: CHECK(last == 1); break;
      case DivergenceKind::false_divergence: CHECK(last == 2); break;
      case DivergenceKind::specific_object: CHECK(last == 3); break;
      default: CHECK(last == 4); break;
    }
  }
  for (auto k : {DivergenceKind::general_object, DivergenceKind::specific_object, DivergenceKind::general_action,
                 DivergenceKind::specific_action, DivergenceKind::false_divergence}) {
    CAPTURE(to_string(k));
    CHECK(seen[k] >= 30);
  }
  MESSAGE("GO " << seen[DivergenceKind::general_object] << " SO " << seen[DivergenceKind::specific_object] << " GA "
                << seen[DivergenceKind::general_action] << " SA " << seen[DivergenceKind::specific_action] << " FD "
                << seen[DivergenceKind::false_divergence]);
}

TEST_CASE("divergence names round trip") {
  for (auto k : {DivergenceKind::general_object, DivergenceKind::specific_object, DivergenceKind::general_action,
                 DivergenceKind::specific_action, DivergenceKind::false_divergence}) {
    CHECK(divergence_from_string(to_string(k)) == k);
  }
  CHECK_FALSE(divergence_from_string("D_XX"));
}
