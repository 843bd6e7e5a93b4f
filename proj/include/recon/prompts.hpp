#pragma once

#include <map>
#include <string>
#include <string_view>

namespace recon {

/// Raw prompt assets keyed by file stem (object_match, query_extraction, ...).
const std::map<std::string, std::string>& prompt_catalog();

/// Prompt body without its leading `# ...` version line. Throws Errc::not_found.
std::string prompt_text(std::string_view name);

/// Replaces every `{key}` with its value; unknown placeholders are left alone.
std::string fill_prompt(std::string text, const std::map<std::string, std::string>& values);

}  // namespace recon
