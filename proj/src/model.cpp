#include "recon/model.hpp"

#include <algorithm>

#include "recon/error.hpp"

namespace recon {

namespace {

void check_token(const std::string& token, const std::string& owner) {
  if (token.empty()) throw Error(Errc::integrity, owner + ": empty token");
  if (std::any_of(token.begin(), token.end(), [](char c) { return c >= 'A' && c <= 'Z'; })) {
    throw Error(Errc::integrity, owner + ": token '" + token + "' must be lowercase");
  }
}

}  // namespace

ObjectDatabase::ObjectDatabase(std::vector<ObjectClass> classes) : classes_(std::move(classes)) {
  std::set<std::string> seen;
  for (const auto& c : classes_) {
    if (!is_valid_symbol(c.name)) throw Error(Errc::integrity, "invalid class name '" + c.name + "'");
    if (!seen.insert(c.name).second) throw Error(Errc::integrity, "duplicate class '" + c.name + "'");
    for (const auto& s : c.synonyms) check_token(s, c.name);
    for (const auto& g : c.gloss) check_token(g, c.name);
  }
}

const ObjectClass* ObjectDatabase::find(std::string_view name) const {
  auto it = std::find_if(classes_.begin(), classes_.end(), [&](const auto& c) { return c.name == name; });
  return it == classes_.end() ? nullptr : &*it;
}

std::vector<std::string> ObjectDatabase::names() const {
  std::vector<std::string> out;
  out.reserve(classes_.size());
  for (const auto& c : classes_) out.push_back(c.name);
  return out;
}

bool ObjectDatabase::operator==(const ObjectDatabase& other) const {
  if (classes_.size() != other.classes_.size()) return false;
  for (std::size_t i = 0; i < classes_.size(); ++i) {
    const auto& a = classes_[i];
    const auto& b = other.classes_[i];
    if (a.name != b.name || a.synonyms != b.synonyms || a.gloss != b.gloss) return false;
  }
  return true;
}

const ObjectInstance* WorldModel::find(std::string_view symbol) const {
  auto parts = split_instance_symbol(symbol);
  if (!parts) return nullptr;
  for (const auto& inst : instances) {
    if (inst.id == parts->second && inst.class_name == parts->first) return &inst;
  }
  return nullptr;
}

bool RobotModels::is_effector(std::string_view symbol) const { return find_effector(symbol) != nullptr; }

const Effector* RobotModels::find_effector(std::string_view symbol) const {
  for (const auto& e : effectors) {
    if (e.name == symbol) return &e;
  }
  return nullptr;
}

bool RobotModels::resolves(std::string_view symbol) const {
  return is_effector(symbol) || world.find(symbol) != nullptr;
}

std::optional<std::string> RobotModels::class_of(std::string_view symbol) const {
  if (is_effector(symbol)) return std::string(symbol);
  if (const auto* inst = world.find(symbol)) return inst->class_name;
  return std::nullopt;
}

void RobotModels::validate() const {
  std::set<std::string> symbols;
  std::set<std::int64_t> ids;
  for (const auto& inst : world.instances) {
    if (!is_valid_symbol(inst.class_name)) {
      throw Error(Errc::integrity, "invalid instance class '" + inst.class_name + "'");
    }
    if (inst.id < 0) throw Error(Errc::integrity, "negative instance id in " + inst.class_name);
    if (!ids.insert(inst.id).second) {
      throw Error(Errc::integrity, "instance id " + std::to_string(inst.id) + " used twice");
    }
    symbols.insert(inst.symbol());
    if (inst.id >= world.next_id) {
      throw Error(Errc::integrity, "next_id " + std::to_string(world.next_id) + " does not exceed id of " +
                                       inst.symbol());
    }
  }
  for (const auto& e : effectors) {
    if (!is_valid_symbol(e.name)) throw Error(Errc::integrity, "invalid effector name '" + e.name + "'");
    if (symbols.contains(e.name)) throw Error(Errc::integrity, "effector '" + e.name + "' shadows an instance");
    for (const auto& s : e.synonyms) check_token(s, e.name);
  }
  for (const auto& lit : world.state) {
    const auto* decl = domain.find_predicate(lit.predicate);
    if (decl == nullptr) {
      throw Error(Errc::integrity, "state literal '" + serialize_literal(lit) + "' uses undeclared predicate");
    }
    if (decl->arity() != lit.args.size()) {
      throw Error(Errc::integrity, "state literal '" + serialize_literal(lit) + "' has wrong arity");
    }
    for (const auto& arg : lit.args) {
      if (!resolves(arg)) {
        throw Error(Errc::integrity, "state literal '" + serialize_literal(lit) + "' refers to unknown '" + arg + "'");
      }
    }
  }
}

std::vector<ObjectInstance> instances_of(const WorldModel& world, std::string_view class_name) {
  std::vector<ObjectInstance> out;
  for (const auto& inst : world.instances) {
    if (inst.class_name == class_name) out.push_back(inst);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  return out;
}

WorldModel overwrite_literal(const RobotModels& models, const Literal& literal, bool make_true) {
  const auto* decl = models.domain.find_predicate(literal.predicate);
  if (decl == nullptr || decl->arity() != literal.args.size()) {
    throw Error(Errc::integrity, "cannot overwrite unknown literal '" + serialize_literal(literal) + "'");
  }
  for (const auto& arg : literal.args) {
    if (!models.resolves(arg)) {
      throw Error(Errc::integrity, "literal '" + serialize_literal(literal) + "' refers to unknown '" + arg + "'");
    }
  }
  WorldModel world = models.world;
  if (make_true) {
    for (const auto& c : models.domain.conflicts(literal, world.state)) world.state.erase(c);
    world.state.insert(literal);
  } else {
    world.state.erase(literal);
    if (auto pair = models.domain.paired_predicate(literal.predicate)) {
      world.state.insert(Literal{*pair, literal.args});
    }
  }
  return world;
}

std::pair<WorldModel, ObjectInstance> insert_instance(const RobotModels& models, std::string_view class_name,
                                                      const Pose& pose) {
  if (!models.odb.contains(class_name)) {
    throw Error(Errc::not_in_database, "class '" + std::string(class_name) + "' is not in the object database");
  }
  WorldModel world = models.world;
  ObjectInstance inst{std::string(class_name), world.next_id, pose};
  world.next_id += 1;
  world.instances.push_back(inst);
  if (const auto* located = models.domain.find_predicate(kLocatedPredicate); located && located->arity() == 1) {
    world.state.insert(Literal{std::string(kLocatedPredicate), {inst.symbol()}});
  }
  return {std::move(world), std::move(inst)};
}

}  // namespace recon
