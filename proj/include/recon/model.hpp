#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "recon/domain.hpp"
#include "recon/literal.hpp"

namespace recon {

using Pose = std::array<double, 3>;

struct ObjectClass {
  std::string name;
  std::vector<std::string> synonyms;
  std::vector<std::string> gloss;  // translation-dictionary tokens
};

class ObjectDatabase {
 public:
  ObjectDatabase() = default;
  /// Throws Errc::integrity on duplicate or malformed classes.
  explicit ObjectDatabase(std::vector<ObjectClass> classes);

  const std::vector<ObjectClass>& classes() const { return classes_; }
  const ObjectClass* find(std::string_view name) const;
  bool contains(std::string_view name) const { return find(name) != nullptr; }
  std::vector<std::string> names() const;

  bool operator==(const ObjectDatabase&) const;

 private:
  std::vector<ObjectClass> classes_;
};

struct ObjectInstance {
  std::string class_name;
  std::int64_t id = 0;
  Pose pose{0.0, 0.0, 0.0};

  std::string symbol() const { return instance_symbol(class_name, id); }
  bool operator==(const ObjectInstance&) const = default;
};

struct WorldModel {
  std::vector<ObjectInstance> instances;  // id order
  std::set<Literal> state;
  std::int64_t next_id = 0;

  const ObjectInstance* find(std::string_view symbol) const;
  bool operator==(const WorldModel&) const = default;
};

struct Effector {
  std::string name;
  std::vector<std::string> synonyms;  // "gripper", "hand"
  bool operator==(const Effector&) const = default;
};

/// The robot's three belief stores plus its declared effectors.
struct RobotModels {
  ObjectDatabase odb;
  WorldModel world;
  Domain domain;
  std::vector<Effector> effectors;

  bool is_effector(std::string_view symbol) const;
  const Effector* find_effector(std::string_view symbol) const;
  /// True when `symbol` names a world instance or an effector.
  bool resolves(std::string_view symbol) const;
  /// Class name for an instance symbol, or the effector name itself.
  std::optional<std::string> class_of(std::string_view symbol) const;

  /// Checks every invariant of the belief stores; throws Errc::integrity.
  void validate() const;
};

std::vector<ObjectInstance> instances_of(const WorldModel& world, std::string_view class_name);

/// Sets `literal` true or false. Conflicting literals (the `not_` pair and mutex partners)
/// are removed when it becomes true; making a paired literal false asserts its pair.
WorldModel overwrite_literal(const RobotModels& models, const Literal& literal, bool make_true);

/// Adds a fresh `class$next_id` instance with a `located_` literal.
std::pair<WorldModel, ObjectInstance> insert_instance(const RobotModels& models, std::string_view class_name,
                                                      const Pose& pose);

inline constexpr std::string_view kLocatedPredicate = "located";

}  // namespace recon
