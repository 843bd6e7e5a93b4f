#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <thread>

#include <httplib.h>

#include "recon/error.hpp"
#include "recon/service.hpp"
#include "support.hpp"

using namespace recon;
using nlohmann::json;

namespace {

ServiceConfig config() {
  ServiceConfig c;
  c.scenario_dir = recon::test::source_dir() / "scenarios";
  c.port = 0;
  return c;
}

std::string create(SessionService& svc, const std::string& scenario) {
  auto r = svc.handle("POST", "/v1/sessions", json{{"scenario", scenario}}.dump());
  REQUIRE(r.status == 200);
  return r.body["id"];
}

// Parses "id/event/data" frames out of an SSE byte stream.
std::vector<json> parse_frames(const std::string& text) {
  std::vector<json> out;
  std::size_t pos = 0;
  while (true) {
    auto end = text.find("\n\n", pos);
    if (end == std::string::npos) break;
    const std::string frame = text.substr(pos, end - pos);
    pos = end + 2;
    auto d = frame.find("data: ");
    if (d == std::string::npos) continue;
    out.push_back(json::parse(frame.substr(d + 6, frame.find('\n', d) - d - 6)));
  }
  return out;
}

}  // namespace

TEST_CASE("scenario listing") {
  SessionService svc(config());
  auto r = svc.handle("GET", "/v1/scenarios", "");
  CHECK(r.status == 200);
  bool occluded_mug = false;
  for (const auto& s : r.body["scenarios"]) {
    if (s["id"] == "occluded_mug") occluded_mug = s["scene"].get<bool>();
  }
  CHECK(occluded_mug);
}

TEST_CASE("session lifecycle and status codes") {
  SessionService svc(config());
  const auto id = create(svc, "microwave_closed");
  const std::string base = "/v1/sessions/" + id;

  CHECK(svc.handle("POST", "/v1/sessions", R"({"scenario": "nope"})").status == 404);
  CHECK(svc.handle("POST", "/v1/sessions", R"({"scenario": "../etc"})").status == 404);
  CHECK(svc.handle("POST", "/v1/sessions", R"({})").status == 422);
  auto bad = svc.handle("POST", "/v1/sessions", "{not json");
  CHECK(bad.status == 400);
  CHECK(bad.body["code"] == "bad_request");
  CHECK(svc.handle("GET", "/v1/sessions/zzz/state", "").status == 404);
  CHECK(svc.handle("GET", "/v2/whatever", "").status == 404);

  auto phase = svc.handle("POST", base + "/rebuttal", R"({"text": "But the microwave is open!"})");
  CHECK(phase.status == 409);
  CHECK(phase.body["code"] == "phase_violation");

  auto empty = svc.handle("POST", base + "/query", R"({"text": ""})");
  CHECK(empty.status == 422);
  CHECK(empty.body["code"] == "unparseable");
  CHECK(empty.body.contains("message"));
  CHECK(empty.body.contains("detail"));

  auto q = svc.handle("POST", base + "/query", R"({"text": "Why can I not close the microwave?"})");
  REQUIRE(q.status == 200);
  CHECK(q.body["explanation"]["divergence"]["kind"] == "D_SA");
  CHECK(q.body["version"] == 1);

  auto clar = svc.handle("POST", base + "/rebuttal", R"({"text": "But the mug is full!"})");
  CHECK(clar.status == 422);
  CHECK(clar.body["code"] == "clarification_needed");

  auto r = svc.handle("POST", base + "/rebuttal", R"({"text": "But the microwave is open!"})");
  REQUIRE(r.status == 200);
  CHECK(r.body["recovery"]["kind"] == "state_overwritten");
  auto st = svc.handle("GET", base + "/state", "");
  CHECK(st.body["version"] == 2);
  CHECK(st.body["graph"]["blocked"].contains("not_closed_op_microwave$1") == false);

  CHECK(svc.handle("POST", base + "/move", R"({"delta": [0.1, 0]})").status == 404);  // no scene
  CHECK(svc.handle("POST", base + "/ee-pose", R"({"pose": [1, 2]})").status == 422);

  auto events = svc.events(id, std::nullopt);
  REQUIRE(events.size() == 3);
  CHECK(events[0].type == "created");
  CHECK(events[1].type == "explanation");
  CHECK(events[2].type == "recovery");
  CHECK(svc.events(id, 1).size() == 1);

  CHECK(svc.handle("DELETE", base, "").status == 200);
  CHECK(svc.handle("DELETE", base, "").status == 404);
  CHECK_FALSE(svc.has_session(id));
}

TEST_CASE("move routes") {
  SessionService svc(config());
  const auto id = create(svc, "occluded_mug");
  const std::string base = "/v1/sessions/" + id;
  CHECK(svc.handle("POST", base + "/move", R"({"suggested": true})").status == 409);
  CHECK(svc.handle("POST", base + "/move", R"({"delta": [5, 0]})").body["code"] == "out_of_bounds");
  svc.handle("POST", base + "/query", R"({"text": "Why can I not grasp the greenish cup?"})");
  auto r = svc.handle("POST", base + "/rebuttal", R"({"text": "There is a green cup there!"})");
  CHECK(r.body["recovery"]["kind"] == "movement_suggested");
  auto m = svc.handle("POST", base + "/move", R"({"suggested": true})");
  REQUIRE(m.status == 200);
  CHECK(m.body["recovery"]["kind"] == "object_added_via_perception");
  bool grasp = false;
  for (const auto& a : m.body["state"]["graph"]["available"]) {
    grasp = grasp || (a[0] == "grasp_sct.yml" && a[1] == "mug_green$1");
  }
  CHECK(grasp);
}

TEST_CASE("event log matches state and resumes after a version") {
  SessionService svc(config());
  const auto id = create(svc, "microwave_closed");
  const std::string base = "/v1/sessions/" + id;
  svc.handle("POST", base + "/query", R"({"text": "Why can I not close the microwave?"})");
  svc.handle("POST", base + "/rebuttal", R"({"text": "But the microwave is open!"})");
  auto all = svc.events(id, std::nullopt);
  auto state = svc.handle("GET", base + "/state", "").body;
  state.erase("session");
  CHECK(all.back().data["state"] == state);
  CHECK(all.back().version == state["version"].get<std::uint64_t>());
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i].version == all[i - 1].version + 1);

  // A waiter wakes up when the next mutation lands.
  std::thread later([&] {
    std::this_thread::sleep_for(std::chrono::milliseconds(100));
    svc.handle("POST", base + "/query", R"({"text": "Why can I not open the microwave?"})");
  });
  auto fresh = svc.events(id, all.back().version, std::chrono::seconds(5));
  later.join();
  REQUIRE(fresh.size() == 1);
  CHECK(fresh[0].type == "explanation");
  CHECK(format_sse(fresh[0]).rfind("id: 3\nevent: explanation\ndata: {", 0) == 0);
}

TEST_CASE("concurrent sessions stay isolated") {
  SessionService svc(config());
  std::vector<std::string> ids;
  for (int i = 0; i < 8; ++i) ids.push_back(create(svc, "microwave_closed"));
  std::vector<std::thread> threads;
  for (int i = 0; i < 8; ++i) {
    threads.emplace_back([&, i] {
      const std::string base = "/v1/sessions/" + ids[i];
      for (int k = 0; k < 5; ++k) svc.handle("POST", base + "/query", R"({"text": "Why can I not close the microwave?"})");
      if (i % 2 == 0) svc.handle("POST", base + "/rebuttal", R"({"text": "But the microwave is open!"})");
    });
  }
  for (auto& t : threads) t.join();
  for (int i = 0; i < 8; ++i) {
    auto st = svc.handle("GET", "/v1/sessions/" + ids[i] + "/state", "").body;
    CHECK(st["version"] == (i % 2 == 0 ? 6 : 5));
    const auto& lits = st["world"]["state"];
    const bool open = std::find(lits.begin(), lits.end(), "not_closed_op_microwave$1") != lits.end();
    CHECK(open == (i % 2 == 0));
  }
}

TEST_CASE("live HTTP with event stream replay") {
  auto cfg = config();
  const auto static_dir = std::filesystem::temp_directory_path() / "recon_static_test";
  std::filesystem::create_directories(static_dir);
  std::ofstream(static_dir / "index.html") << "<html>cockpit</html>";
  cfg.static_dir = static_dir;
  HttpService http(cfg);
  const int port = http.start();
  REQUIRE(port > 0);
  httplib::Client cli("127.0.0.1", port);

  auto res = cli.Post("/v1/sessions", R"({"scenario": "microwave_closed"})", "application/json");
  REQUIRE(res);
  CHECK(res->status == 200);
  const std::string id = json::parse(res->body)["id"];
  const std::string base = "/v1/sessions/" + id;
  res = cli.Post(base + "/query", R"({"text": "Why can I not close the microwave?"})", "application/json");
  CHECK(json::parse(res->body)["explanation"]["divergence"]["kind"] == "D_SA");
  res = cli.Post(base + "/rebuttal", R"({"text": "But the microwave is open!"})", "application/json");
  CHECK(res->status == 200);
  res = cli.Post(base + "/query", R"({"text": ""})", "application/json");
  CHECK(res->status == 422);
  res = cli.Get("/v1/nothing/here");
  CHECK(res->status == 404);
  res = cli.Get("/index.html");
  REQUIRE(res);
  CHECK(res->body.find("cockpit") != std::string::npos);

  auto state = json::parse(cli.Get(base + "/state")->body);
  state.erase("session");

  // Replay everything after version 0, stop once the latest version arrived.
  std::string stream;
  httplib::Client sse("127.0.0.1", port);
  sse.set_read_timeout(10, 0);
  httplib::Headers headers{{"Last-Event-ID", "0"}};
  sse.Get(base + "/events", headers, [&](const char* data, std::size_t len) {
    stream.append(data, len);
    auto frames = parse_frames(stream);
    return frames.empty() || frames.back()["version"] != state["version"];
  });
  auto frames = parse_frames(stream);
  REQUIRE(frames.size() == 2);
  CHECK(frames[0]["type"] == "explanation");
  CHECK(frames.back()["state"] == state);

  res = cli.Get("/v1/sessions/zzz/events");
  CHECK(res->status == 404);
  res = cli.Get(base + "/events?after=abc");
  CHECK(res->status == 400);
  http.stop();
  std::filesystem::remove_all(static_dir);
}

TEST_CASE("binding an occupied port fails cleanly") {
  auto cfg = config();
  HttpService first(cfg);
  const int port = first.start();
  cfg.port = port;
  HttpService second(cfg);
  try {
    second.bind();
    FAIL("bound twice");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::argument);
  }
  first.stop();
}
