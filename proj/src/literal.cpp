#include "recon/literal.hpp"

#include <charconv>

#include "recon/error.hpp"

namespace recon {

bool is_valid_symbol(std::string_view name) {
  if (name.empty() || name.front() < 'a' || name.front() > 'z') return false;
  for (char c : name) {
    const bool ok = (c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_';
    if (!ok) return false;
  }
  return true;
}

std::string instance_symbol(std::string_view class_name, std::int64_t id) {
  if (id < 0) throw Error(Errc::argument, "negative instance id " + std::to_string(id));
  if (!is_valid_symbol(class_name)) {
    throw Error(Errc::argument, "invalid class name '" + std::string(class_name) + "'");
  }
  return std::string(class_name) + "$" + std::to_string(id);
}

std::optional<std::pair<std::string, std::int64_t>> split_instance_symbol(std::string_view symbol) {
  const auto dollar = symbol.find('$');
  if (dollar == std::string_view::npos || symbol.find('$', dollar + 1) != std::string_view::npos) {
    return std::nullopt;
  }
  const auto cls = symbol.substr(0, dollar);
  const auto digits = symbol.substr(dollar + 1);
  if (!is_valid_symbol(cls) || digits.empty()) return std::nullopt;
  // Canonical form has no leading zeros.
  if (digits.size() > 1 && digits.front() == '0') return std::nullopt;
  std::int64_t id = 0;
  const auto* end = digits.data() + digits.size();
  auto [ptr, ec] = std::from_chars(digits.data(), end, id);
  if (ec != std::errc() || ptr != end) return std::nullopt;
  return std::make_pair(std::string(cls), id);
}

std::string serialize_literal(const Literal& literal) {
  if (literal.args.empty()) return literal.predicate;
  std::string out = literal.predicate;
  out += '_';
  for (std::size_t i = 0; i < literal.args.size(); ++i) {
    if (i > 0) out += ' ';
    out += literal.args[i];
  }
  return out;
}

}  // namespace recon
