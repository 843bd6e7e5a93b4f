#include "recon/chat.hpp"

#include <cstdio>
#include <cstdlib>
#include <chrono>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>
#include <spdlog/spdlog.h>

#include "recon/error.hpp"
#include "recon/nl.hpp"
#include "recon/scenario.hpp"

namespace recon {

using nlohmann::json;

json ChatRequest::to_json() const {
  json messages_json = json::array();
  for (const auto& m : messages) messages_json.push_back({{"role", m.role}, {"content", m.content}});
  json body = {{"model", model}, {"messages", messages_json}, {"temperature", temperature}};
  if (seed) body["seed"] = *seed;
  return body;
}

LlmSettings LlmSettings::from_env() {
  LlmSettings s;
  auto env = [](const char* name) -> std::optional<std::string> {
    const char* v = std::getenv(name);
    if (v == nullptr || *v == '\0') return std::nullopt;
    return std::string(v);
  };
  if (auto v = env("RECON_LLM_ENDPOINT")) s.endpoint = *v;
  if (auto v = env("RECON_LLM_API_KEY")) s.api_key = *v;
  if (auto v = env("RECON_LLM_MODEL")) s.model = *v;
  if (auto v = env("RECON_LLM_TIMEOUT")) s.timeout_seconds = std::stod(*v);
  if (auto v = env("RECON_LLM_RETRIES")) s.retries = std::stoi(*v);
  return s;
}

HttpChatClient::HttpChatClient(LlmSettings settings) : settings_(std::move(settings)) {
  if (!settings_.configured()) throw BackendError(BackendErrc::not_configured, "no LLM endpoint configured");
  const auto scheme_end = settings_.endpoint.find("://");
  const auto host_start = scheme_end == std::string::npos ? 0 : scheme_end + 3;
  const auto path_start = settings_.endpoint.find('/', host_start);
  base_ = settings_.endpoint.substr(0, path_start);
  std::string prefix = path_start == std::string::npos ? "" : settings_.endpoint.substr(path_start);
  while (!prefix.empty() && prefix.back() == '/') prefix.pop_back();
  if (prefix.ends_with("/chat/completions")) {
    path_ = prefix;
  } else if (prefix.ends_with("/v1")) {
    path_ = prefix + "/chat/completions";
  } else {
    path_ = prefix + "/v1/chat/completions";
  }
}

ChatResponse HttpChatClient::complete(const ChatRequest& request) {
  if (request.messages.empty()) throw Error(Errc::argument, "chat request without messages");
  ChatRequest req = request;
  if (req.model.empty()) req.model = settings_.model;
  const std::string body = req.to_json().dump();

  httplib::Client client(base_);
  const auto secs = static_cast<time_t>(settings_.timeout_seconds);
  const auto usecs = static_cast<time_t>((settings_.timeout_seconds - static_cast<double>(secs)) * 1e6);
  client.set_connection_timeout(secs, usecs);
  client.set_read_timeout(secs, usecs);
  client.set_write_timeout(secs, usecs);
  httplib::Headers headers;
  if (!settings_.api_key.empty()) headers.emplace("Authorization", "Bearer " + settings_.api_key);

  BackendError last(BackendErrc::transport, "no attempt made");
  const int attempts = 1 + std::max(0, settings_.retries);
  for (int attempt = 0; attempt < attempts; ++attempt) {
    if (attempt > 0) std::this_thread::sleep_for(std::chrono::milliseconds(50 * attempt));
    const auto started = std::chrono::steady_clock::now();
    auto res = client.Post(path_, headers, body, "application/json");
    if (!res) {
      const auto err = res.error();
      // httplib reports a read timeout as a plain read error.
      const double waited = std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
      const bool timed_out = err == httplib::Error::ConnectionTimeout ||
                             (err == httplib::Error::Read && waited >= settings_.timeout_seconds * 0.95);
      const auto category = timed_out ? BackendErrc::timeout : BackendErrc::transport;
      last = BackendError(category, base_ + path_ + ": " + httplib::to_string(err));
      spdlog::warn("chat request attempt {}/{} failed: {}", attempt + 1, attempts, last.what());
      continue;
    }
    if (res->status >= 500) {
      last = BackendError(BackendErrc::http_status, "HTTP " + std::to_string(res->status));
      spdlog::warn("chat request attempt {}/{} failed: {}", attempt + 1, attempts, last.what());
      continue;
    }
    if (res->status < 200 || res->status >= 300) {
      throw BackendError(BackendErrc::http_status, "HTTP " + std::to_string(res->status) + ": " + res->body);
    }
    if (res->body.empty()) throw BackendError(BackendErrc::malformed_body, "empty response body");
    try {
      const auto doc = json::parse(res->body);
      const auto& choice = doc.at("choices").at(0);
      ChatResponse out;
      out.text = choice.at("message").at("content").get<std::string>();
      if (auto fr = choice.find("finish_reason"); fr != choice.end() && fr->is_string()) {
        out.finish_reason = fr->get<std::string>();
      }
      return out;
    } catch (const json::exception& e) {
      throw BackendError(BackendErrc::malformed_body, e.what());
    }
  }
  throw last;
}

std::string request_key(const ChatRequest& request) {
  const std::string canonical = request.to_json().dump();
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(hash));
  return buf;
}

CachingChatClient::CachingChatClient(std::shared_ptr<ChatClient> inner, std::filesystem::path directory)
    : inner_(std::move(inner)), directory_(std::move(directory)) {
  std::filesystem::create_directories(directory_);
}

ChatResponse CachingChatClient::complete(const ChatRequest& request) {
  const auto path = directory_ / (request_key(request) + ".json");
  {
    std::lock_guard lock(mutex_);
    if (std::filesystem::exists(path)) {
      try {
        const auto doc = json::parse(read_text_file(path));
        return {doc.at("text").get<std::string>(), doc.value("finish_reason", "")};
      } catch (const json::exception& e) {
        spdlog::warn("ignoring corrupt cache entry {}: {}", path.string(), e.what());
      }
    }
  }
  if (!inner_) throw BackendError(BackendErrc::not_configured, "cache miss and no live endpoint");
  ChatResponse response = inner_->complete(request);
  std::lock_guard lock(mutex_);
  const auto tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    out << json{{"request", request.to_json()}, {"text", response.text}, {"finish_reason", response.finish_reason}}
               .dump(2);
  }
  std::filesystem::rename(tmp, path);
  return response;
}

ChatResponse RecordingChatClient::complete(const ChatRequest& request) {
  ChatExchange exchange{request, std::nullopt, {}};
  try {
    exchange.response = inner_->complete(request);
  } catch (const std::exception& e) {
    exchange.error = e.what();
    std::lock_guard lock(mutex_);
    log_.push_back(std::move(exchange));
    throw;
  }
  std::lock_guard lock(mutex_);
  log_.push_back(exchange);
  return *exchange.response;
}

std::vector<ChatExchange> RecordingChatClient::take() {
  std::lock_guard lock(mutex_);
  return std::exchange(log_, {});
}

FinalAnswer complete_with_final_answer(ChatClient& client, ChatRequest request) {
  auto first = client.complete(request);
  try {
    return {extract_final_answer(first.text), first.text};
  } catch (const Error& e) {
    if (e.code() != Errc::extraction) throw;
    spdlog::warn("re-prompting after extraction failure: {}", e.what());
  }
  request.messages.push_back({"assistant", first.text});
  request.messages.push_back({"user", "You forgot the required format. Write 'Final answer:' followed by the JSON."});
  auto second = client.complete(request);
  try {
    return {extract_final_answer(second.text), second.text};
  } catch (const Error& e) {
    throw BackendError(BackendErrc::extraction, e.what());
  }
}

}  // namespace recon
