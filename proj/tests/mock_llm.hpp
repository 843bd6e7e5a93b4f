#pragma once

// In-process OpenAI-compatible endpoint for the wire tests. Bound to 127.0.0.1 only.

#include <atomic>
#include <functional>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include <httplib.h>
#include <json.hpp>

namespace recon::test {

struct MockReply {
  int status = 200;
  std::string body;  // raw body; use completion() for a well-formed one
};

inline std::string completion(const std::string& text) {
  nlohmann::json body = {{"id", "mock"},
                         {"object", "chat.completion"},
                         {"choices", {{{"index", 0},
                                       {"message", {{"role", "assistant"}, {"content", text}}},
                                       {"finish_reason", "stop"}}}}};
  return body.dump();
}

class MockLlm {
 public:
  using Handler = std::function<MockReply(const nlohmann::json& request)>;

  explicit MockLlm(Handler handler) : handler_(std::move(handler)) {
    server_.Post("/v1/chat/completions", [this](const httplib::Request& req, httplib::Response& res) {
      nlohmann::json body = nlohmann::json::parse(req.body, nullptr, false);
      {
        std::lock_guard lock(mutex_);
        requests_.push_back(body);
      }
      auto reply = handler_(body);
      res.status = reply.status;
      res.set_content(reply.body, "application/json");
    });
    port_ = server_.bind_to_any_port("127.0.0.1");
    thread_ = std::thread([this] { server_.listen_after_bind(); });
    server_.wait_until_ready();
  }

  ~MockLlm() {
    server_.stop();
    thread_.join();
  }

  std::string endpoint() const { return "http://127.0.0.1:" + std::to_string(port_) + "/v1"; }

  std::vector<nlohmann::json> requests() {
    std::lock_guard lock(mutex_);
    return requests_;
  }

 private:
  Handler handler_;
  httplib::Server server_;
  std::thread thread_;
  int port_ = 0;
  std::mutex mutex_;
  std::vector<nlohmann::json> requests_;
};

// The object-match example reply, reproduced as the mock's canned answer.
inline const char* kVaseReply =
    "- Thought: The object is \"blue-ish vase\". A possible match is \"vase_dark_blue\". I will assign \"blue-ish\n"
    "vase\" in the \"yes\" category.\n"
    "- Final answer: {\"no\": [], \"yes\": [\"blue-ish vase\"]}";

}  // namespace recon::test
