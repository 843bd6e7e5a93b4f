#include <doctest.h>

#include <algorithm>
#include <map>
#include <set>

#include "recon/action_graph.hpp"
#include "recon/error.hpp"
#include "support.hpp"

using namespace recon;
using recon::test::Gen;
using recon::test::golden;
using nlohmann::json;

namespace {

const char* kOpenDump =
    "# Dictionary containing the disabled actions as values in lists\n"
    "# and the respective unmet preconditions as keys\n"
    "{'bind_mug_green$2 right_arm': [['release_sct.yml', 'mug_green$2', 'right_arm']],\n"
    " 'closed_op_microwave$1': [['open_microwave_sct.yml', 'op_microwave$1', 'right_arm']]}\n";

const std::vector<std::string> kDomain = {
    "predicate free(?e: effector)",
    "predicate located(?o: any)",
    "predicate bind(?o: any, ?e: effector)",
    "predicate closed(?o: any)",
    "predicate not_closed(?o: any)",
    "predicate on(?a: any, ?b: any)",
    "grasp_sct.yml(?o: cupa | boxb, ?e: effector) verbs: grasp; pre: free ?e, located ?o; eff: +bind ?o ?e, -free ?e",
    "release_sct.yml(?o: cupa | boxb, ?e: effector) verbs: release; pre: bind ?o ?e; eff: +free ?e, -bind ?o ?e",
    "open_sct.yml(?o: ovenc, ?e: effector) verbs: open; pre: closed ?o, free ?e; eff: +not_closed ?o, -closed ?o",
    "stack_sct.yml(?a: cupa | boxb, ?b: boxb, ?e: effector) verbs: stack; pre: bind ?a ?e, located ?b; eff: +on ?a ?b",
};

struct Schema {
  std::string name;
  std::vector<std::vector<std::string>> param_classes;  // empty: effector
  std::vector<std::pair<std::string, std::vector<int>>> pre;
};

// The same schemas as kDomain, written out by hand for the oracle.
const std::vector<Schema> kSchemas = {
    {"grasp_sct.yml", {{"cupa", "boxb"}, {}}, {{"free", {1}}, {"located", {0}}}},
    {"release_sct.yml", {{"cupa", "boxb"}, {}}, {{"bind", {0, 1}}}},
    {"open_sct.yml", {{"ovenc"}, {}}, {{"closed", {0}}, {"free", {1}}}},
    {"stack_sct.yml", {{"cupa", "boxb"}, {"boxb"}, {}}, {{"bind", {0, 2}}, {"located", {1}}}},
};

struct RandomWorld {
  json doc;
  std::vector<std::pair<std::string, std::string>> instances;  // symbol, class
  std::vector<std::string> effectors;
  std::set<std::string> state;
};

RandomWorld random_world(Gen& g) {
  RandomWorld w;
  const std::vector<std::string> classes = {"cupa", "boxb", "ovenc"};
  const int n = g.uniform(0, 4);
  json instances = json::array();
  for (int i = 0; i < n; ++i) {
    const std::string cls = g.pick(classes);
    instances.push_back({{"class", cls}, {"id", i + 1}, {"pose", {0, 0, 0}}});
    w.instances.push_back({cls + "$" + std::to_string(i + 1), cls});
  }
  json effectors = json::array();
  const int e = g.uniform(1, 2);
  for (int i = 0; i < e; ++i) {
    w.effectors.push_back(i == 0 ? "hand_a" : "hand_b");
    effectors.push_back({{"name", w.effectors.back()}});
  }
  for (const auto& h : w.effectors) {
    if (g.coin()) w.state.insert("free_" + h);
  }
  for (const auto& [sym, cls] : w.instances) {
    if (g.coin(0.7)) w.state.insert("located_" + sym);
    const int door = g.uniform(0, 2);
    if (door == 1) w.state.insert("closed_" + sym);
    if (door == 2) w.state.insert("not_closed_" + sym);
    for (const auto& h : w.effectors) {
      if (g.coin(0.2)) w.state.insert("bind_" + sym + " " + h);
    }
    for (const auto& [other, c2] : w.instances) {
      if (other != sym && g.coin(0.1)) w.state.insert("on_" + sym + " " + other);
    }
  }
  json odb = json::array();
  for (const auto& c : classes) odb.push_back({{"name", c}});
  w.doc = {{"name", "random"},
           {"object_database", odb},
           {"effectors", effectors},
           {"domain", kDomain},
           {"world", {{"instances", instances}, {"state", w.state}, {"next_id", n + 1}}}};
  return w;
}

// Brute force: every typed, instance-distinct assignment and its unmet preconditions.
std::map<GroundedAction, std::vector<std::string>> oracle(const RandomWorld& w) {
  std::map<GroundedAction, std::vector<std::string>> out;
  for (const auto& s : kSchemas) {
    std::vector<std::vector<std::string>> options;
    for (const auto& pc : s.param_classes) {
      std::vector<std::string> opt;
      if (pc.empty()) {
        opt = w.effectors;
      } else {
        for (const auto& [sym, cls] : w.instances) {
          if (std::find(pc.begin(), pc.end(), cls) != pc.end()) opt.push_back(sym);
        }
      }
      options.push_back(opt);
    }
    std::vector<std::vector<std::string>> combos{{}};
    for (const auto& opt : options) {
      std::vector<std::vector<std::string>> next;
      for (const auto& c : combos) {
        for (const auto& o : opt) {
          auto d = c;
          d.push_back(o);
          next.push_back(d);
        }
      }
      combos = next;
    }
    for (const auto& args : combos) {
      std::set<std::string> inst;
      bool distinct = true;
      for (std::size_t i = 0; i < args.size(); ++i) {
        if (!s.param_classes[i].empty() && !inst.insert(args[i]).second) distinct = false;
      }
      if (!distinct) continue;
      std::vector<std::string> unmet;
      for (const auto& [pred, idx] : s.pre) {
        std::string lit = pred + "_";
        for (std::size_t k = 0; k < idx.size(); ++k) lit += (k ? " " : "") + args[static_cast<std::size_t>(idx[k])];
        if (!w.state.contains(lit)) unmet.push_back(lit);
      }
      out[GroundedAction{s.name, args}] = unmet;
    }
  }
  return out;
}

}  // namespace

TEST_CASE("blocked dictionaries") {
  auto a = golden("microwave_closed_busy");
  auto b = golden("microwave_open_busy");
  CHECK(dump_blocked(derive_graph(b.models)) == kOpenDump);

  SUBCASE("overwriting the microwave to open turns A into B") {
    auto models = a.models;
    models.world = overwrite_literal(models, {"not_closed", {"op_microwave$1"}}, true);
    CHECK(dump_blocked(derive_graph(models)) == kOpenDump);
  }
  SUBCASE("available actions in A") {
    auto g = derive_graph(a.models);
    CHECK(g.is_available({"open_microwave_sct.yml", {"op_microwave$1", "right_arm"}}));
    CHECK(g.is_available({"grasp_sct.yml", {"mug_green$2", "right_arm"}}));
    CHECK_FALSE(g.is_available({"close_microwave_sct.yml", {"op_microwave$1", "right_arm"}}));
  }
}

TEST_CASE("empty world has no actions") {
  auto g = derive_graph(golden("empty").models);
  CHECK(g.available.empty());
  CHECK(g.blocked.empty());
  CHECK(dump_blocked(g).find("{}") != std::string::npos);
}

TEST_CASE("find_action") {
  auto models = golden("microwave_closed_busy").models;
  auto g = derive_graph(models);
  auto av = find_action(g, "close_microwave_sct.yml", std::string("op_microwave$1"));
  REQUIRE(std::holds_alternative<Blocked>(av));
  const auto& b = std::get<Blocked>(av);
  REQUIRE(b.unmet.size() == 1);
  CHECK(serialize_literal(b.unmet[0]) == "not_closed_op_microwave$1");
  CHECK(std::holds_alternative<Available>(find_action(g, "grasp_sct.yml", std::nullopt)));
  CHECK(std::holds_alternative<Absent>(find_action(g, "cut_sct.yml", std::nullopt)));
  CHECK(std::holds_alternative<Absent>(find_action(g, "grasp_sct.yml", std::string("op_microwave$1"))));
}

TEST_CASE("apply_effects adds and deletes") {
  auto models = golden("microwave_closed_busy").models;
  auto after = apply_effects(models, {"open_microwave_sct.yml", {"op_microwave$1", "right_arm"}});
  CHECK(after.state.contains(Literal{"not_closed", {"op_microwave$1"}}));
  CHECK_FALSE(after.state.contains(Literal{"closed", {"op_microwave$1"}}));
}

TEST_CASE("action graph partition and brute-force equivalence over 600 random worlds") {
  Gen g(0x5eed0001);
  int blocked_seen = 0;
  int available_seen = 0;
  for (int trial = 0; trial < 600; ++trial) {
    auto w = random_world(g);
    CAPTURE(w.doc.dump());
    auto models = load_scenario(w.doc).models;
    auto graph = derive_graph(models);
    auto expect = oracle(w);

    std::set<GroundedAction> grounded;
    for (const auto& a : ground(models)) grounded.insert(a);
    std::set<GroundedAction> expected_keys;
    for (const auto& [a, u] : expect) expected_keys.insert(a);
    REQUIRE(grounded == expected_keys);

    for (const auto& [action, unmet] : expect) {
      const bool avail = graph.is_available(action);
      CHECK(avail == unmet.empty());
      CHECK(avail != graph.unmet.contains(action));  // exactly one side of the partition
      if (!unmet.empty()) {
        std::vector<std::string> got;
        for (const auto& l : graph.unmet.at(action)) got.push_back(serialize_literal(l));
        CHECK(got == unmet);
        for (const auto& key : unmet) {
          const auto& list = graph.blocked.at(key);
          CHECK(std::count(list.begin(), list.end(), action) == 1);
        }
      }
      (avail ? available_seen : blocked_seen)++;
    }
    // Every key lists only actions that really miss it.
    for (const auto& [key, actions] : graph.blocked) {
      for (const auto& a : actions) {
        const auto& u = expect.at(a);
        CHECK(std::find(u.begin(), u.end(), key) != u.end());
      }
    }
  }
  CHECK(blocked_seen > 100);
  CHECK(available_seen > 100);
}
