#include "recon/prompts.hpp"

#include "recon/error.hpp"

namespace recon {

std::string prompt_text(std::string_view name) {
  const auto& catalog = prompt_catalog();
  auto it = catalog.find(std::string(name));
  if (it == catalog.end()) throw Error(Errc::not_found, "no prompt named '" + std::string(name) + "'");
  std::string text = it->second;
  if (text.starts_with("# ")) {
    const auto nl = text.find('\n');
    text = nl == std::string::npos ? std::string() : text.substr(nl + 1);
  }
  return text;
}

std::string fill_prompt(std::string text, const std::map<std::string, std::string>& values) {
  for (const auto& [key, value] : values) {
    const std::string placeholder = "{" + key + "}";
    for (std::size_t pos = 0; (pos = text.find(placeholder, pos)) != std::string::npos; pos += value.size()) {
      text.replace(pos, placeholder.size(), value);
    }
  }
  return text;
}

}  // namespace recon
