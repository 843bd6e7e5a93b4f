#pragma once

#include <string>
#include <string_view>

#include "recon/chat.hpp"
#include "recon/nl.hpp"

namespace recon {

/// Query extraction through the chat backend. Throws BackendError, or Errc::unparseable when
/// the answer names no action.
ParsedQuery llm_parse_query(ChatClient& client, const std::string& model, std::string_view text);

/// Rebuttal classification through the chat backend. Throws BackendError, or
/// Errc::clarification when the answer has neither payload.
Rebuttal llm_parse_rebuttal(ChatClient& client, const std::string& model, const std::string& explanation,
                            std::string_view text);

}  // namespace recon
