#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recon/session.hpp"

namespace recon {

struct ServiceConfig {
  std::filesystem::path scenario_dir = "scenarios";
  EngineConfig engine;
  std::string host = "127.0.0.1";
  int port = 8080;                          // 0: any free port
  std::optional<std::filesystem::path> static_dir;  // cockpit assets mounted at /
};

struct ApiResponse {
  int status = 200;
  nlohmann::json body;
};

/// One frame of a session's event stream; `data` carries the payload and the full state.
struct SessionEvent {
  std::uint64_t version = 0;
  std::string type;
  nlohmann::json data;
};

std::string format_sse(const SessionEvent& event);

/// Transport-independent request handling. Thread-safe; mutations of one session are serialized.
class SessionService {
 public:
  explicit SessionService(ServiceConfig config);
  ~SessionService();
  SessionService(const SessionService&) = delete;
  SessionService& operator=(const SessionService&) = delete;

  ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

  nlohmann::json scenarios() const;

  /// Events with version > `after` (all of them when `after` is empty); waits up to `timeout`
  /// for one to arrive. Throws Errc::not_found.
  std::vector<SessionEvent> events(const std::string& session, std::optional<std::uint64_t> after,
                                   std::chrono::milliseconds timeout = std::chrono::milliseconds(0));

  bool has_session(const std::string& session) const;

  /// Wakes every waiter; later waits return immediately.
  void shutdown();
  bool stopped() const;

  const ServiceConfig& config() const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// HTTP front end for a SessionService.
class HttpService {
 public:
  explicit HttpService(ServiceConfig config);
  ~HttpService();

  /// Binds the listening socket. Returns the bound port; throws Errc::argument when binding fails.
  int bind();
  /// Serves until stop(). Call bind() first.
  void listen();
  /// bind() then listen() on a background thread.
  int start();
  void stop();
  /// Makes a blocking listen() return; safe from another thread.
  void stop_listening();

  SessionService& core();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace recon
