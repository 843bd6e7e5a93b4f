#include "recon/service.hpp"

#include <atomic>
#include <condition_variable>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "recon/error.hpp"
#include "recon/scenario.hpp"

namespace recon {

using nlohmann::json;
namespace fs = std::filesystem;

std::string format_sse(const SessionEvent& event) {
  return "id: " + std::to_string(event.version) + "\nevent: " + event.type + "\ndata: " + event.data.dump() + "\n\n";
}

namespace {

int status_for(Errc code) {
  switch (code) {
    case Errc::not_found: return 404;
    case Errc::phase: return 409;
    case Errc::unparseable:
    case Errc::clarification:
    case Errc::out_of_bounds:
    case Errc::argument:
    case Errc::load:
    case Errc::not_in_database:
    case Errc::oracle_unavailable: return 422;
    case Errc::backend:
    case Errc::extraction: return 502;
    default: return 500;
  }
}

ApiResponse error_response(int status, std::string code, std::string message, json detail = json::object()) {
  return {status, {{"code", std::move(code)}, {"message", std::move(message)}, {"detail", std::move(detail)}}};
}

ApiResponse error_response(const Error& e) {
  json detail = json::object();
  if (auto* s = dynamic_cast<const SyntaxError*>(&e)) detail = {{"line", s->line()}, {"column", s->column()}};
  if (auto* b = dynamic_cast<const BackendError*>(&e)) detail = {{"category", to_string(b->category())}};
  if (e.code() == Errc::unparseable || e.code() == Errc::clarification) detail["clarification"] = e.what();
  return error_response(status_for(e.code()), std::string(to_string(e.code())), e.what(), std::move(detail));
}

std::vector<std::string> split_path(std::string_view path) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < path.size()) {
    const auto j = path.find('/', i);
    const auto end = j == std::string_view::npos ? path.size() : j;
    if (end > i) out.emplace_back(path.substr(i, end - i));
    i = end + 1;
  }
  return out;
}

std::string required_text(const json& body) {
  auto it = body.find("text");
  if (it == body.end() || !it->is_string()) throw Error(Errc::argument, "body needs a string field 'text'");
  return it->get<std::string>();
}

BaseMove move_from_json(const json& node) {
  auto d = node.find("delta");
  if (d == node.end() || !d->is_array() || d->size() != 2 || !(*d)[0].is_number() || !(*d)[1].is_number()) {
    throw Error(Errc::argument, "move needs 'delta': [dx, dy]");
  }
  BaseMove m{{(*d)[0].get<double>(), (*d)[1].get<double>()}, 0.0};
  if (auto h = node.find("heading_change"); h != node.end()) {
    if (!h->is_number()) throw Error(Errc::argument, "'heading_change' must be a number");
    m.heading_change = h->get<double>();
  }
  return m;
}

Pose pose_from_json(const json& body) {
  auto p = body.find("pose");
  if (p == body.end() || !p->is_array() || p->size() != 3 ||
      !std::all_of(p->begin(), p->end(), [](const json& v) { return v.is_number(); })) {
    throw Error(Errc::argument, "body needs 'pose': [x, y, z]");
  }
  return {(*p)[0].get<double>(), (*p)[1].get<double>(), (*p)[2].get<double>()};
}

}  // namespace

struct SessionService::Impl {
  struct Entry {
    explicit Entry(Session s) : session(std::move(s)) {}
    std::mutex mutex;
    std::condition_variable changed;
    Session session;
    std::vector<SessionEvent> log;
  };

  ServiceConfig config;
  mutable std::shared_mutex map_mutex;
  std::map<std::string, std::shared_ptr<Entry>> sessions;
  std::uint64_t next_id = 1;
  std::atomic<bool> stopped{false};

  std::shared_ptr<Entry> find(const std::string& id) const {
    std::shared_lock lock(map_mutex);
    auto it = sessions.find(id);
    if (it == sessions.end()) throw Error(Errc::not_found, "unknown session '" + id + "'");
    return it->second;
  }

  // Caller holds entry.mutex.
  void emit(Entry& entry, std::string type, json payload) {
    SessionEvent ev;
    ev.version = entry.session.version();
    ev.type = std::move(type);
    ev.data = {{"type", ev.type}, {"version", ev.version}, {"payload", std::move(payload)}, {"state", entry.session.state()}};
    entry.log.push_back(std::move(ev));
    entry.changed.notify_all();
  }

  fs::path scenario_path(const std::string& id) const {
    if (id.empty() || id.find("..") != std::string::npos) throw Error(Errc::not_found, "unknown scenario '" + id + "'");
    fs::path p = config.scenario_dir / (id + ".json");
    if (!fs::is_regular_file(p)) throw Error(Errc::not_found, "unknown scenario '" + id + "'");
    return p;
  }

  ApiResponse create(const json& body) {
    auto it = body.find("scenario");
    if (it == body.end() || !it->is_string()) throw Error(Errc::argument, "body needs a string field 'scenario'");
    const std::string scenario = it->get<std::string>();
    auto entry = std::make_shared<Entry>(Session(load_scenario_file(scenario_path(scenario)), config.engine));
    std::string id;
    {
      std::unique_lock lock(map_mutex);
      id = "s" + std::to_string(next_id++);
      sessions.emplace(id, entry);
    }
    std::lock_guard lock(entry->mutex);
    emit(*entry, "created", {{"session", id}, {"scenario", scenario}});
    spdlog::info("session {} created from {}", id, scenario);
    return {200, {{"id", id}, {"version", entry->session.version()}, {"state", entry->session.state()}}};
  }

  ApiResponse session_op(const std::string& id, const std::string& op, std::string_view method, const json& body) {
    auto entry = find(id);
    std::lock_guard lock(entry->mutex);
    Session& s = entry->session;
    if (method == "GET" && op == "state") {
      json st = s.state();
      st["session"] = id;
      return {200, st};
    }
    if (method != "POST") throw Error(Errc::not_found, "no route for " + std::string(method) + " " + op);
    if (op == "query") {
      auto ex = to_json(s.query(required_text(body)));
      emit(*entry, "explanation", ex);
      return {200, {{"explanation", ex}, {"version", s.version()}}};
    }
    if (op == "rebuttal") {
      auto r = to_json(s.rebuttal(required_text(body)));
      emit(*entry, "recovery", r);
      return {200, {{"recovery", r}, {"version", s.version()}}};
    }
    if (op == "ee-pose") {
      auto r = to_json(s.ee_pose(pose_from_json(body)));
      emit(*entry, "recovery", r);
      return {200, {{"recovery", r}, {"version", s.version()}, {"state", s.state()}}};
    }
    if (op == "move") {
      BaseMove move;
      if (body.value("suggested", false)) {
        const json pending = s.state()["pending"]["suggested_move"];
        if (pending.is_null()) throw Error(Errc::phase, "no movement suggestion is pending");
        move = move_from_json(pending);
      } else {
        move = move_from_json(body);
      }
      auto result = s.apply_move(move);
      json events = json::array();
      for (const auto& e : result.events) events.push_back(to_json(e));
      json payload{{"move", to_json(result.move)},
                   {"events", events},
                   {"recovery", result.recovery ? to_json(*result.recovery) : json(nullptr)}};
      emit(*entry, "move", payload);
      payload["version"] = s.version();
      payload["state"] = s.state();
      return {200, payload};
    }
    throw Error(Errc::not_found, "no route for " + op);
  }
};

SessionService::SessionService(ServiceConfig config) : impl_(std::make_unique<Impl>()) {
  impl_->config = std::move(config);
}

SessionService::~SessionService() { shutdown(); }

const ServiceConfig& SessionService::config() const { return impl_->config; }

json SessionService::scenarios() const {
  json out = json::array();
  const auto& dir = impl_->config.scenario_dir;
  if (!fs::is_directory(dir)) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& f : files) {
    std::string id = fs::relative(f, dir).replace_extension().generic_string();
    try {
      auto sc = load_scenario_file(f);
      out.push_back({{"id", id},
                     {"name", sc.name},
                     {"instances", sc.models.world.instances.size()},
                     {"scene", sc.scene.has_value()}});
    } catch (const Error& e) {
      spdlog::warn("skipping scenario {}: {}", f.string(), e.what());
    }
  }
  return out;
}

bool SessionService::has_session(const std::string& session) const {
  std::shared_lock lock(impl_->map_mutex);
  return impl_->sessions.contains(session);
}

ApiResponse SessionService::handle(std::string_view method, std::string_view path, std::string_view body_text) {
  try {
    json body = json::object();
    if (method == "POST" && body_text.find_first_not_of(" \t\r\n") != std::string_view::npos) {
      try {
        body = json::parse(body_text);
      } catch (const json::parse_error& e) {
        return error_response(400, "bad_request", "request body is not valid JSON", {{"parser", e.what()}});
      }
      if (!body.is_object()) return error_response(400, "bad_request", "request body must be a JSON object");
    }
    const auto parts = split_path(path);
    if (parts.size() < 2 || parts[0] != "v1") throw Error(Errc::not_found, "no route for " + std::string(path));
    if (parts.size() == 2 && parts[1] == "scenarios" && method == "GET") return {200, {{"scenarios", scenarios()}}};
    if (parts[1] != "sessions") throw Error(Errc::not_found, "no route for " + std::string(path));
    if (parts.size() == 2 && method == "POST") return impl_->create(body);
    if (parts.size() == 2 && method == "GET") {
      std::shared_lock lock(impl_->map_mutex);
      json ids = json::array();
      for (const auto& [id, e] : impl_->sessions) ids.push_back(id);
      return {200, {{"sessions", ids}}};
    }
    if (parts.size() == 3 && method == "DELETE") {
      std::unique_lock lock(impl_->map_mutex);
      if (impl_->sessions.erase(parts[2]) == 0) throw Error(Errc::not_found, "unknown session '" + parts[2] + "'");
      return {200, {{"deleted", parts[2]}}};
    }
    if (parts.size() == 4) return impl_->session_op(parts[2], parts[3], method, body);
    throw Error(Errc::not_found, "no route for " + std::string(method) + " " + std::string(path));
  } catch (const Error& e) {
    return error_response(e);
  } catch (const std::exception& e) {
    spdlog::error("{} {}: {}", method, path, e.what());
    return error_response(500, "internal", e.what());
  }
}

std::vector<SessionEvent> SessionService::events(const std::string& session, std::optional<std::uint64_t> after,
                                                 std::chrono::milliseconds timeout) {
  auto entry = impl_->find(session);
  std::unique_lock lock(entry->mutex);
  auto pending = [&] {
    std::vector<SessionEvent> out;
    for (const auto& e : entry->log) {
      if (!after || e.version > *after) out.push_back(e);
    }
    return out;
  };
  auto out = pending();
  if (out.empty() && timeout.count() > 0 && !impl_->stopped) {
    entry->changed.wait_for(lock, timeout, [&] { return impl_->stopped || !pending().empty(); });
    out = pending();
  }
  return out;
}

void SessionService::shutdown() {
  impl_->stopped = true;
  std::shared_lock lock(impl_->map_mutex);
  for (auto& [id, e] : impl_->sessions) {
    std::lock_guard l(e->mutex);
    e->changed.notify_all();
  }
}

bool SessionService::stopped() const { return impl_->stopped; }

struct HttpService::Impl {
  explicit Impl(ServiceConfig c) : core(std::move(c)) {}
  SessionService core;
  httplib::Server server;
  std::thread thread;
  int port = -1;
};

HttpService::HttpService(ServiceConfig config) : impl_(std::make_unique<Impl>(std::move(config))) {
  auto& svr = impl_->server;
  auto& core = impl_->core;
  // httplib's defaults include SO_REUSEPORT, which lets a second server share the port silently.
  svr.set_socket_options([](socket_t sock) {
    int yes = 1;
    setsockopt(sock, SOL_SOCKET, SO_REUSEADDR, reinterpret_cast<const char*>(&yes), sizeof(yes));
  });
  auto reply = [](httplib::Response& res, const ApiResponse& api) {
    res.status = api.status;
    res.set_content(api.body.dump(), "application/json");
  };
  svr.Get(R"(/v1/sessions/([^/]+)/events)", [&core, reply](const httplib::Request& req, httplib::Response& res) {
    const std::string id = req.matches[1];
    if (!core.has_session(id)) return reply(res, error_response(404, "not_found", "unknown session '" + id + "'"));
    auto cursor = std::make_shared<std::optional<std::uint64_t>>();
    const std::string last = req.has_header("Last-Event-ID") ? req.get_header_value("Last-Event-ID")
                                                              : req.get_param_value("after");
    if (!last.empty()) {
      try {
        *cursor = std::stoull(last);
      } catch (const std::exception&) {
        return reply(res, error_response(400, "bad_request", "Last-Event-ID must be a version number"));
      }
    }
    res.set_header("Cache-Control", "no-cache");
    res.set_chunked_content_provider("text/event-stream", [&core, id, cursor](std::size_t, httplib::DataSink& sink) {
      if (core.stopped()) {
        sink.done();
        return true;
      }
      std::vector<SessionEvent> evs;
      try {
        evs = core.events(id, *cursor, std::chrono::seconds(5));
      } catch (const Error&) {
        sink.done();  // session deleted
        return true;
      }
      if (evs.empty()) {
        const std::string ping = ": keep-alive\n\n";
        return sink.write(ping.data(), ping.size());
      }
      for (const auto& e : evs) {
        const std::string frame = format_sse(e);
        if (!sink.write(frame.data(), frame.size())) return false;
        *cursor = e.version;
      }
      return true;
    });
  });
  auto dispatch = [&core, reply](const char* method) {
    return [&core, reply, method](const httplib::Request& req, httplib::Response& res) {
      reply(res, core.handle(method, req.path, req.body));
    };
  };
  svr.Get(R"(/v1/.*)", dispatch("GET"));
  svr.Post(R"(/v1/.*)", dispatch("POST"));
  svr.Delete(R"(/v1/.*)", dispatch("DELETE"));
  if (const auto& dir = core.config().static_dir) {
    if (!svr.set_mount_point("/", dir->string())) spdlog::warn("static directory {} not found", dir->string());
  }
  svr.set_exception_handler([reply](const httplib::Request&, httplib::Response& res, std::exception_ptr ep) {
    std::string what = "unknown error";
    try {
      std::rethrow_exception(ep);
    } catch (const std::exception& e) {
      what = e.what();
    } catch (...) {
    }
    reply(res, error_response(500, "internal", what));
  });
}

HttpService::~HttpService() { stop(); }

SessionService& HttpService::core() { return impl_->core; }

int HttpService::bind() {
  const auto& c = impl_->core.config();
  if (c.port == 0) {
    impl_->port = impl_->server.bind_to_any_port(c.host);
  } else {
    impl_->port = impl_->server.bind_to_port(c.host, c.port) ? c.port : -1;
  }
  if (impl_->port < 0) {
    throw Error(Errc::argument, "cannot bind " + c.host + ":" + std::to_string(c.port));
  }
  return impl_->port;
}

void HttpService::listen() {
  spdlog::info("serving on http://{}:{}", impl_->core.config().host, impl_->port);
  impl_->server.listen_after_bind();
}

int HttpService::start() {
  const int port = bind();
  impl_->thread = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void HttpService::stop_listening() { impl_->server.stop(); }

void HttpService::stop() {
  impl_->core.shutdown();
  impl_->server.stop();
  if (impl_->thread.joinable()) impl_->thread.join();
}

}  // namespace recon
