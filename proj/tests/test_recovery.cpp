#include <doctest.h>

#include <algorithm>

#include "recon/action_graph.hpp"
#include "recon/error.hpp"
#include "recon/recovery.hpp"
#include "recon/session.hpp"
#include "support.hpp"

using namespace recon;
using recon::test::Gen;
using recon::test::golden;

namespace {

bool has_event(const std::vector<StateChange>& events, const std::string& type, const std::string& subject) {
  return std::any_of(events.begin(), events.end(),
                     [&](const StateChange& c) { return c.type == type && c.subject == subject; });
}

// Surface words a user would use for a literal the generated worlds can miss.
std::optional<StateAssertion> assertion_for(const Literal& lit) {
  const std::string& a = lit.args.at(0);
  const std::string subject = a == "edan_hand" ? "gripper" : a.substr(0, a.find('_'));
  if (lit.predicate == "free") return StateAssertion{subject, "free"};
  if (lit.predicate == "closed") return StateAssertion{subject, "closed"};
  if (lit.predicate == "not_closed") return StateAssertion{subject, "open"};
  if (lit.predicate == "located") return StateAssertion{subject, "seen"};
  if (lit.predicate == "filled") return StateAssertion{subject, "full"};
  return std::nullopt;
}

}  // namespace

TEST_CASE("microwave state overwrite") {
  Session s(golden("microwave_closed"));
  s.query("Why can I not close the microwave?");
  const auto v = s.version();
  auto r = s.rebuttal("But the microwave is open!");
  CHECK(r.kind == RecoveryKind::state_overwritten);
  CHECK(has_event(r.events, "literal_added", "not_closed_op_microwave$1"));
  CHECK(has_event(r.events, "literal_removed", "closed_op_microwave$1"));
  for (const auto& e : r.events) CHECK(e.provenance == "user_assertion");
  REQUIRE(r.reclassified);
  CHECK(r.reclassified->divergence.kind() == DivergenceKind::false_divergence);
  CHECK(s.graph().is_available({"close_microwave_sct.yml", {"op_microwave$1", "edan_hand"}}));
  CHECK(s.phase() == Phase::idle);
  CHECK(s.version() == v + 1);
}

TEST_CASE("negated condition resolves to the same literal") {
  Session s(golden("microwave_closed"));
  s.query("Why can I not close the microwave?");
  auto r = s.rebuttal("The microwave isn't closed");
  CHECK(r.kind == RecoveryKind::state_overwritten);
  CHECK(has_event(r.events, "literal_added", "not_closed_op_microwave$1"));
}

TEST_CASE("an unrelated assertion asks for clarification and changes nothing") {
  Session s(golden("microwave_closed"));
  s.query("Why can I not close the microwave?");
  const auto before = s.models().world;
  const auto v = s.version();
  const auto turns = s.history().size();
  for (const char* text : {"But the mug is full!", "The gripper is free!", "The microwave is closed"}) {
    CAPTURE(std::string(text));
    try {
      s.rebuttal(text);
      FAIL("accepted");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::clarification);
    }
    CHECK(s.models().world == before);
    CHECK(s.version() == v);
    CHECK(s.phase() == Phase::explained);
    CHECK(s.history().size() == turns);
  }
  // Still answerable afterwards.
  CHECK(s.rebuttal("But the microwave is open!").kind == RecoveryKind::state_overwritten);
}

TEST_CASE("end-effector insertion") {
  auto models = golden("microwave_closed").models;
  const auto before = models.world;
  auto bad = add_object_via_ee(models, "pineapple", {0, 0, 0});
  CHECK(bad.kind == RecoveryKind::not_recoverable);
  CHECK(models.world == before);

  auto ok = add_object_via_ee(models, "mug_peach", {0.5, 0.1, 0.8});
  CHECK(ok.kind == RecoveryKind::object_added_via_ee);
  const std::string sym = "mug_peach$" + std::to_string(before.next_id);
  CHECK(has_event(ok.events, "instance_added", sym));
  CHECK(has_event(ok.events, "literal_added", "located_" + sym));
  CHECK(models.world.next_id == before.next_id + 1);
  CHECK(models.world.find(sym)->pose == Pose{0.5, 0.1, 0.8});
}

TEST_CASE("object rebuttal without a camera waits for the end effector") {
  Session s(golden("walk_mug_unseen"));
  auto ex = s.query("Why can you not pick up the mug?");
  REQUIRE(ex.divergence.kind() == DivergenceKind::specific_object);
  auto r = s.rebuttal("There is a mug right there!");
  CHECK(r.kind == RecoveryKind::no_oracle_match);
  CHECK(r.awaiting_class == "mug_peach");
  CHECK(s.phase() == Phase::recovering);
  CHECK_THROWS_AS(s.query("Why can you not pick up the mug?"), Error);
  auto done = s.ee_pose({0.4, 0.0, 0.8});
  CHECK(done.kind == RecoveryKind::object_added_via_ee);
  REQUIRE(done.reclassified);
  CHECK(done.reclassified->divergence.kind() != DivergenceKind::specific_object);
  CHECK(s.phase() == Phase::idle);
}

TEST_CASE("general divergences are not recoverable by the user") {
  Session go(golden("walk_unknown_object"));
  go.query("Why can you not pick up the pineapple?");
  auto r = go.rebuttal("It is right there!");
  CHECK(r.kind == RecoveryKind::not_recoverable);
  CHECK(r.message.find("expert") != std::string::npos);
  CHECK(go.phase() == Phase::idle);

  Session ga(golden("walk_unknown_skill"));
  ga.query("Why can you not cut the apple?");
  CHECK(ga.rebuttal("Just cut it").kind == RecoveryKind::not_recoverable);
}

TEST_CASE("occluded object: suggest, move, perceive") {
  Session s(golden("occluded_mug"));
  s.query("Why can I not grasp the greenish cup?");
  auto r = s.rebuttal("There is a green cup there!");
  REQUIRE(r.kind == RecoveryKind::movement_suggested);
  REQUIRE(r.oracle);
  CHECK_FALSE(r.oracle->visible);
  CHECK(r.oracle->occluder == 2);
  REQUIRE(r.suggested_move);
  // The suggested move actually reveals the mug.
  auto after = recon::apply_move(*s.scene(), *r.suggested_move);
  CHECK(view(after).find(1)->visible);
  auto m = s.apply_move(*r.suggested_move);
  REQUIRE(m.recovery);
  CHECK(m.recovery->kind == RecoveryKind::object_added_via_perception);
  CHECK(has_event(m.events, "instance_added", "mug_green$1"));
}

TEST_CASE("an unhelpful move falls back to the end effector") {
  Session s(golden("occluded_mug"));
  s.query("Why can I not grasp the greenish cup?");
  auto r = s.rebuttal("There is a green cup there!");
  REQUIRE(r.kind == RecoveryKind::movement_suggested);
  auto m = s.apply_move({{0.0, -0.5}, 0.0});
  REQUIRE(m.recovery);
  CHECK(m.recovery->kind == RecoveryKind::no_oracle_match);
  CHECK(m.recovery->awaiting_class == "mug_green");
  CHECK(s.ee_pose({2.0, 0.0, 0.8}).kind == RecoveryKind::object_added_via_ee);
}

TEST_CASE("overwrites unblock the action and never break unrelated ones") {
  Gen g(0x5eed000a);
  const auto base = golden("microwave_closed");
  const std::vector<std::string> pool = {"closed_op_microwave$1", "not_closed_op_microwave$1", "free_edan_hand",
                                         "located_mug_peach$2",   "located_op_microwave$1",    "filled_mug_peach$2",
                                         "bind_mug_peach$2 edan_hand"};
  const std::vector<std::string> queries = {"Why can I not close the microwave?", "Why can I not open the microwave?",
                                            "Why can I not grasp the mug?", "Why can I not release the mug?"};
  int exercised = 0;
  for (int trial = 0; trial < 400; ++trial) {
    auto models = base.models;
    models.world.state.clear();
    for (const auto& l : pool) {
      if (g.coin(0.45)) models.world = overwrite_literal(models, *models.domain.parse_literal(l), true);
    }
    Scenario sc = base;
    sc.models = models;
    Session s(sc);
    auto ex = s.query(g.pick(queries));
    if (ex.divergence.kind() != DivergenceKind::specific_action) continue;
    const auto blocked = std::get<SpecificAction>(ex.divergence.payload);
    for (const auto& lit : blocked.unmet) {
      auto assertion = assertion_for(lit);
      if (!assertion) continue;
      CAPTURE(serialize_literal(lit));
      auto m = models;
      const auto before_graph = derive_graph(m);
      const auto lex = lexicon_for(m, sc.lexicon, true);
      RecoveryOutcome out;
      REQUIRE_NOTHROW(out = overwrite_from_assertion(m, blocked, *assertion, lex));
      ++exercised;
      CHECK(m.world.state.contains(lit));
      const auto after_graph = derive_graph(m);
      if (after_graph.unmet.contains(blocked.action)) {
        const auto& still = after_graph.unmet.at(blocked.action);
        CHECK(std::find(still.begin(), still.end(), lit) == still.end());
        CHECK(still.size() < blocked.unmet.size());
      } else {
        CHECK(after_graph.is_available(blocked.action));
      }
      std::set<std::string> removed;
      for (const auto& e : out.events) {
        if (e.type == "literal_removed") removed.insert(e.subject);
      }
      for (const auto& a : before_graph.available) {
        const auto& schema = *std::find_if(m.domain.schemas.begin(), m.domain.schemas.end(),
                                           [&](const auto& sch) { return sch.template_name == a.template_name; });
        bool touched = false;
        for (const auto& p : ground_patterns(schema, schema.preconditions, a)) {
          touched = touched || removed.contains(serialize_literal(p));
        }
        if (!touched) CHECK(after_graph.is_available(a));
      }
    }
  }
  CHECK(exercised > 50);
}

TEST_CASE("every golden blocked or missing-object case recovers without regressions") {
  struct Case {
    const char* scenario;
    const char* query;
    const char* rebuttal;
    GroundedAction target;  // blocked or ungroundable before, available after
  };
  const Case cases[] = {
      {"walk_mug_unseen", "Why can you not pick up the mug?", "There is a mug right there!",
       {"grasp_sct.yml", {"mug_peach$?", "edan_hand"}}},
      {"walk_hand_busy", "Why can you not pick up the thermos?", "Right now the gripper is free!",
       {"grasp_sct.yml", {"thermos_blue$664", "edan_hand"}}},
      {"occluded_mug", "Why can I not grasp the greenish cup?", "There is a green cup there!",
       {"grasp_sct.yml", {"mug_green$1", "edan_hand"}}},
      {"microwave_closed", "Why can I not close the microwave?", "But the microwave is open!",
       {"close_microwave_sct.yml", {"op_microwave$1", "edan_hand"}}},
  };
  for (const auto& c : cases) {
    CAPTURE(c.scenario);
    Session s(golden(c.scenario));
    auto ex = s.query(c.query);
    const auto kind = ex.divergence.kind();
    REQUIRE((kind == DivergenceKind::specific_action || kind == DivergenceKind::specific_object));
    const auto before = s.graph();
    auto r = s.rebuttal(c.rebuttal);
    if (r.kind == RecoveryKind::movement_suggested) r = *s.apply_move(*r.suggested_move).recovery;
    if (r.kind == RecoveryKind::no_oracle_match) r = s.ee_pose({0.5, 0.0, 0.8});
    REQUIRE(r.reclassified);
    CHECK(r.reclassified->divergence.kind() == DivergenceKind::false_divergence);

    GroundedAction target = c.target;
    if (target.args[0].ends_with("$?")) {
      const auto cls = target.args[0].substr(0, target.args[0].size() - 2);
      REQUIRE_FALSE(instances_of(s.models().world, cls).empty());
      target.args[0] = instances_of(s.models().world, cls).back().symbol();
    }
    CHECK_FALSE(before.is_available(target));
    CHECK(s.graph().is_available(target));

    std::set<std::string> removed;
    for (const auto& e : r.events) {
      if (e.type == "literal_removed") removed.insert(e.subject);
    }
    for (const auto& a : before.available) {
      const auto& schema = *std::find_if(s.models().domain.schemas.begin(), s.models().domain.schemas.end(),
                                         [&](const auto& sch) { return sch.template_name == a.template_name; });
      bool touched = false;
      for (const auto& p : ground_patterns(schema, schema.preconditions, a)) {
        touched = touched || removed.contains(serialize_literal(p));
      }
      if (!touched) CHECK(s.graph().is_available(a));
    }
  }
}
