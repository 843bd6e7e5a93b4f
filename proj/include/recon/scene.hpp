#pragma once

#include <cstdint>
#include <numbers>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "recon/model.hpp"

namespace recon {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;
  bool operator==(const Vec2&) const = default;
};

inline Vec2 operator+(Vec2 a, Vec2 b) { return {a.x + b.x, a.y + b.y}; }
inline Vec2 operator-(Vec2 a, Vec2 b) { return {a.x - b.x, a.y - b.y}; }
inline Vec2 operator*(double s, Vec2 v) { return {s * v.x, s * v.y}; }
double dot(Vec2 a, Vec2 b);
double norm(Vec2 v);

/// Distance from `p` to the closed segment [a, b].
double segment_point_distance(Vec2 a, Vec2 b, Vec2 p);

/// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

struct SceneObject {
  std::string class_name;  // may be unknown to the object database
  std::int64_t id = 0;
  Vec2 position;
  double radius = 0.05;
  std::vector<std::string> state;  // "closed", "bind edan_hand": object is the first argument
  double z = 0.0;
  bool operator==(const SceneObject&) const = default;
};

struct RobotBase {
  Vec2 position;
  double heading = 0.0;  // radians, 0 = +x
  bool operator==(const RobotBase&) const = default;
};

struct Camera {
  double fov = std::numbers::pi / 2;  // full cone angle
  double range = 5.0;
  bool operator==(const Camera&) const = default;
};

/// Ground truth: what is actually there, independent of the robot's beliefs.
struct Scene {
  std::vector<SceneObject> objects;
  RobotBase robot;
  Camera camera;
  double max_step = 1.5;               // meters per move
  double max_turn = std::numbers::pi;  // radians per move

  const SceneObject* find(std::int64_t id) const;
  /// Throws Errc::load on violated invariants.
  void validate() const;
  bool operator==(const Scene&) const = default;
};

struct ObjectView {
  std::int64_t id = 0;
  bool visible = false;
  bool in_fov = false;
  std::optional<std::int64_t> occluder;
  double distance = 0.0;
};

struct SceneView {
  std::vector<ObjectView> objects;  // scene order
  const ObjectView* find(std::int64_t id) const;
};

SceneView view(const Scene& scene);

struct BaseMove {
  Vec2 delta;              // world frame, meters
  double heading_change = 0.0;
  bool operator==(const BaseMove&) const = default;
};

/// Throws Errc::out_of_bounds when the move exceeds the scene's step limits.
Scene apply_move(Scene scene, const BaseMove& move);

/// Adds every visible, database-known scene object that has no world counterpart,
/// copying its ground-truth state literals.
RobotModels perceive(const Scene& scene, RobotModels models);

/// World instance corresponding to a scene object: same class, within the object's radius.
const ObjectInstance* counterpart(const WorldModel& world, const SceneObject& object);

/// Literals a scene object's ground-truth state entries denote for instance `symbol`.
std::vector<Literal> state_literals(const SceneObject& object, const std::string& symbol);

struct RemoveObject {};
struct MoveObject {
  Vec2 position;
};
struct SetObjectState {
  std::vector<std::string> state;
};
using SceneChange = std::variant<RemoveObject, MoveObject, SetObjectState>;

/// Changes ground truth only; robot beliefs are untouched. Throws Errc::not_found.
Scene remove_or_alter_object(Scene scene, std::int64_t id, const SceneChange& change);

}  // namespace recon
