#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace recon {

/// Symbol grammar shared by every module: lowercase snake case, no `$`.
bool is_valid_symbol(std::string_view name);

/// `class$id`. Throws Errc::argument on a negative id or invalid class name.
std::string instance_symbol(std::string_view class_name, std::int64_t id);

/// Inverse of instance_symbol; nullopt for anything that is not `class$digits`.
std::optional<std::pair<std::string, std::int64_t>> split_instance_symbol(std::string_view symbol);

inline bool looks_like_instance(std::string_view symbol) {
  return split_instance_symbol(symbol).has_value();
}

struct Literal {
  std::string predicate;
  std::vector<std::string> args;

  auto operator<=>(const Literal&) const = default;
  bool operator==(const Literal&) const = default;
};

/// predicate + `_` + args joined by single spaces; zero-arg literals are the bare predicate.
std::string serialize_literal(const Literal& literal);

}  // namespace recon
