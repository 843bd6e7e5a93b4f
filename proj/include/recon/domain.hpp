#pragma once

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "recon/literal.hpp"

namespace recon {

inline constexpr std::string_view kAnyType = "any";
inline constexpr std::string_view kEffectorType = "effector";
inline constexpr std::string_view kNegationPrefix = "not_";

struct Param {
  std::string var;                 // including the leading `?`
  std::vector<std::string> types;  // alternatives; empty means any
  bool is_effector() const;
};

struct AtomPattern {
  std::string predicate;
  std::vector<std::string> vars;

  bool operator==(const AtomPattern&) const = default;
};

struct PredicateDecl {
  std::string name;
  std::vector<Param> params;
  std::vector<std::string> aka;  // surface phrases asserting this predicate ("open")
  std::size_t arity() const { return params.size(); }
};

struct TypeDecl {
  std::string name;
  std::vector<std::string> members;
};

struct MutexRule {
  AtomPattern first;
  AtomPattern second;
};

struct ActionSchema {
  std::string template_name;  // e.g. close_microwave_sct.yml
  std::vector<std::string> verbs;
  std::vector<Param> params;
  std::vector<AtomPattern> preconditions;
  std::vector<AtomPattern> add_effects;
  std::vector<AtomPattern> delete_effects;

  std::size_t param_index(std::string_view var) const;  // npos if absent
};

/// Parsed PDDL-lite domain: types, predicate vocabulary, exclusion rules and action schemas
/// in source order.
struct Domain {
  std::vector<TypeDecl> types;
  std::vector<PredicateDecl> predicates;
  std::vector<MutexRule> mutexes;
  std::vector<ActionSchema> schemas;
  std::string source;

  const PredicateDecl* find_predicate(std::string_view name) const;
  const ActionSchema* find_schema(std::string_view template_name) const;

  /// Whether an object of `class_name` may bind a parameter of type `type`.
  bool admits(std::string_view type, std::string_view class_name) const;
  bool admits(const Param& param, std::string_view class_name) const;

  /// `closed` <-> `not_closed` when both are declared.
  std::optional<std::string> paired_predicate(std::string_view name) const;

  /// Literals in `state` that cannot hold together with `literal`
  /// (its `not_` pair and any mutex partner).
  std::vector<Literal> conflicts(const Literal& literal, const std::set<Literal>& state) const;

  /// Parse a canonical literal string using the declared predicate vocabulary.
  std::optional<Literal> parse_literal(std::string_view text) const;
};

/// Parses PDDL-lite domain text. Throws SyntaxError with line/column, or
/// Error(Errc::semantic) for undeclared predicates/parameters.
Domain parse_domain(std::string_view text);

}  // namespace recon
