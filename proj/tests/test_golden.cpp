#include <doctest.h>

#include "recon/action_graph.hpp"
#include "recon/session.hpp"
#include "support.hpp"

using namespace recon;
using recon::test::golden;

TEST_CASE("blocked dictionary with the microwave closed") {
  auto s = golden("microwave_closed_busy");
  const auto graph = derive_graph(s.models);
  CHECK(dump_blocked(graph) ==
        "# Dictionary containing the disabled actions as values in lists\n"
        "# and the respective unmet preconditions as keys\n"
        "{'bind_mug_green$2 right_arm': [['release_sct.yml', 'mug_green$2', 'right_arm']],\n"
        " 'not_closed_op_microwave$1': [['close_microwave_sct.yml', 'op_microwave$1', 'right_arm']]}\n");
}

TEST_CASE("walkthrough frames") {
  const char* frames[] = {"walk_unknown_object", "walk_unknown_skill", "walk_mug_unseen", "walk_mug_seen", "walk_hand_busy"};
  const char* queries[] = {"Why can you not pick up the pineapple?", "Why can you not cut the apple?",
                           "Why can you not pick up the mug?", "Why can you not pick up the mug now?",
                           "Why can you not pick up the thermos?"};
  const char* kinds[] = {"D_GO", "D_GA", "D_SO", "FD", "D_SA"};
  for (int k = 0; k < 5; ++k) {
    Session session(golden(frames[k]));
    auto ex = session.query(queries[k]);
    INFO(ex.rendered);
    CHECK(to_string(ex.divergence.kind()) == kinds[k]);
    MESSAGE(ex.rendered);
  }
}

TEST_CASE("closed microwave explanation") {
  Session session(golden("microwave_closed"));
  auto ex = session.query("Why can I not close the microwave?");
  CHECK(to_string(ex.divergence.kind()) == "D_SA");
  MESSAGE(ex.rendered);
}

TEST_CASE("occluded mug session") {
  Session session(golden("occluded_mug"));
  auto ex = session.query("Why can I not grasp the greenish cup?");
  CHECK(to_string(ex.divergence.kind()) == "D_SO");
  MESSAGE(ex.rendered);
  auto r = session.rebuttal("There is a green cup there!");
  CHECK(r.kind == RecoveryKind::movement_suggested);
  MESSAGE(r.message);
  auto m = session.apply_move(*r.suggested_move);
  REQUIRE(m.recovery);
  CHECK(m.recovery->kind == RecoveryKind::object_added_via_perception);
  MESSAGE(m.recovery->message);
  MESSAGE(session.state().dump(2));
}
