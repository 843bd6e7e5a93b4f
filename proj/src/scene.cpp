#include "recon/scene.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "recon/error.hpp"

namespace recon {

double dot(Vec2 a, Vec2 b) { return a.x * b.x + a.y * b.y; }
double norm(Vec2 v) { return std::hypot(v.x, v.y); }

double segment_point_distance(Vec2 a, Vec2 b, Vec2 p) {
  const Vec2 ab = b - a;
  const double len2 = dot(ab, ab);
  if (len2 == 0.0) return norm(p - a);
  const double t = std::clamp(dot(p - a, ab) / len2, 0.0, 1.0);
  return norm(p - (a + t * ab));
}

double wrap_angle(double radians) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  double r = std::fmod(radians, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  if (r > std::numbers::pi) r -= two_pi;
  return r;
}

const SceneObject* Scene::find(std::int64_t id) const {
  for (const auto& o : objects) {
    if (o.id == id) return &o;
  }
  return nullptr;
}

void Scene::validate() const {
  std::set<std::int64_t> ids;
  for (const auto& o : objects) {
    if (!(o.radius > 0.0)) throw Error(Errc::load, "scene object " + std::to_string(o.id) + ": radius must be > 0");
    if (!ids.insert(o.id).second) throw Error(Errc::load, "scene object id " + std::to_string(o.id) + " repeated");
    if (!is_valid_symbol(o.class_name)) throw Error(Errc::load, "scene object class '" + o.class_name + "' invalid");
  }
  if (!(camera.fov > 0.0 && camera.fov <= 2.0 * std::numbers::pi)) {
    throw Error(Errc::load, "camera fov must be in (0, 2pi]");
  }
  if (!(camera.range > 0.0)) throw Error(Errc::load, "camera range must be > 0");
  if (!(max_step >= 0.0) || !(max_turn >= 0.0)) throw Error(Errc::load, "move bounds must be >= 0");
}

const ObjectView* SceneView::find(std::int64_t id) const {
  for (const auto& v : objects) {
    if (v.id == id) return &v;
  }
  return nullptr;
}

SceneView view(const Scene& scene) {
  SceneView out;
  const Vec2 cam = scene.robot.position;
  for (const auto& target : scene.objects) {
    ObjectView v;
    v.id = target.id;
    const Vec2 to = target.position - cam;
    v.distance = norm(to);
    const double bearing = v.distance == 0.0 ? 0.0 : wrap_angle(std::atan2(to.y, to.x) - scene.robot.heading);
    v.in_fov = std::abs(bearing) <= scene.camera.fov / 2.0 + 1e-12 && v.distance <= scene.camera.range;
    // Nearest disc along the sight line that the segment passes closer than its radius.
    double best_t = std::numeric_limits<double>::infinity();
    for (const auto& other : scene.objects) {
      if (other.id == target.id) continue;
      if (segment_point_distance(cam, target.position, other.position) < other.radius) {
        const double t = v.distance == 0.0 ? 0.0 : dot(other.position - cam, to) / (v.distance * v.distance);
        if (t < best_t) {
          best_t = t;
          v.occluder = other.id;
        }
      }
    }
    v.visible = v.in_fov && !v.occluder;
    out.objects.push_back(v);
  }
  return out;
}

Scene apply_move(Scene scene, const BaseMove& move) {
  if (norm(move.delta) > scene.max_step + 1e-12 || std::abs(move.heading_change) > scene.max_turn + 1e-12) {
    std::ostringstream msg;
    msg << "move of " << norm(move.delta) << " m / " << move.heading_change << " rad exceeds bounds ("
        << scene.max_step << " m, " << scene.max_turn << " rad)";
    throw Error(Errc::out_of_bounds, msg.str());
  }
  scene.robot.position = scene.robot.position + move.delta;
  scene.robot.heading = wrap_angle(scene.robot.heading + move.heading_change);
  return scene;
}

const ObjectInstance* counterpart(const WorldModel& world, const SceneObject& object) {
  for (const auto& inst : world.instances) {
    if (inst.class_name != object.class_name) continue;
    const Vec2 p{inst.pose[0], inst.pose[1]};
    if (norm(p - object.position) <= object.radius) return &inst;
  }
  return nullptr;
}

std::vector<Literal> state_literals(const SceneObject& object, const std::string& symbol) {
  std::vector<Literal> out;
  for (const auto& entry : object.state) {
    std::istringstream in(entry);
    Literal lit;
    in >> lit.predicate;
    lit.args.push_back(symbol);
    for (std::string arg; in >> arg;) lit.args.push_back(arg);
    out.push_back(std::move(lit));
  }
  return out;
}

RobotModels perceive(const Scene& scene, RobotModels models) {
  const SceneView seen = view(scene);
  for (const auto& object : scene.objects) {
    const auto* v = seen.find(object.id);
    if (v == nullptr || !v->visible) continue;
    if (!models.odb.contains(object.class_name)) continue;
    if (counterpart(models.world, object) != nullptr) continue;
    auto [world, inst] = insert_instance(models, object.class_name, {object.position.x, object.position.y, object.z});
    models.world = std::move(world);
    for (const auto& lit : state_literals(object, inst.symbol())) {
      const auto* decl = models.domain.find_predicate(lit.predicate);
      if (decl == nullptr || decl->arity() != lit.args.size()) continue;
      if (!std::all_of(lit.args.begin(), lit.args.end(), [&](const auto& a) { return models.resolves(a); })) {
        continue;
      }
      models.world = overwrite_literal(models, lit, true);
    }
  }
  return models;
}

Scene remove_or_alter_object(Scene scene, std::int64_t id, const SceneChange& change) {
  auto it = std::find_if(scene.objects.begin(), scene.objects.end(), [&](const auto& o) { return o.id == id; });
  if (it == scene.objects.end()) throw Error(Errc::not_found, "no scene object with id " + std::to_string(id));
  std::visit(
      [&](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, RemoveObject>) {
          scene.objects.erase(it);
        } else if constexpr (std::is_same_v<T, MoveObject>) {
          it->position = c.position;
        } else {
          it->state = c.state;
        }
      },
      change);
  return scene;
}

}  // namespace recon
