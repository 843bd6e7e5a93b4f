#include "recon/scenario.hpp"

#include <fstream>
#include <sstream>

#include "recon/error.hpp"

namespace recon {

using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(Errc::load, (path.empty() ? std::string("/") : path) + ": " + what);
}

const json& require(const json& node, const std::string& key, const std::string& path) {
  if (!node.is_object()) schema_error(path, "expected an object");
  auto it = node.find(key);
  if (it == node.end()) schema_error(path + "/" + key, "missing required key");
  return *it;
}

std::string as_string(const json& node, const std::string& path) {
  if (!node.is_string()) schema_error(path, "expected a string");
  return node.get<std::string>();
}

double as_number(const json& node, const std::string& path) {
  if (!node.is_number()) schema_error(path, "expected a number");
  return node.get<double>();
}

std::int64_t as_integer(const json& node, const std::string& path) {
  if (!node.is_number_integer()) schema_error(path, "expected an integer");
  return node.get<std::int64_t>();
}

const json& as_array(const json& node, const std::string& path) {
  if (!node.is_array()) schema_error(path, "expected an array");
  return node;
}

std::vector<std::string> string_list(const json& node, const std::string& path) {
  std::vector<std::string> out;
  const auto& arr = as_array(node, path);
  for (std::size_t i = 0; i < arr.size(); ++i) out.push_back(as_string(arr[i], path + "/" + std::to_string(i)));
  return out;
}

std::vector<std::string> optional_strings(const json& node, const std::string& key, const std::string& path) {
  auto it = node.find(key);
  if (it == node.end() || it->is_null()) return {};
  return string_list(*it, path + "/" + key);
}

Vec2 vec2(const json& node, const std::string& path) {
  const auto& arr = as_array(node, path);
  if (arr.size() != 2 && arr.size() != 3) schema_error(path, "expected [x, y]");
  return {as_number(arr[0], path + "/0"), as_number(arr[1], path + "/1")};
}

Pose pose3(const json& node, const std::string& path) {
  const auto& arr = as_array(node, path);
  if (arr.size() != 3) schema_error(path, "expected [x, y, z]");
  return {as_number(arr[0], path + "/0"), as_number(arr[1], path + "/1"), as_number(arr[2], path + "/2")};
}

ObjectDatabase parse_odb(const json& node, const std::string& path) {
  const json* classes = &node;
  std::string base = path;
  if (node.is_object()) {
    classes = &require(node, "classes", path);
    base += "/classes";
  }
  std::vector<ObjectClass> out;
  const auto& arr = as_array(*classes, base);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = base + "/" + std::to_string(i);
    ObjectClass c;
    if (arr[i].is_string()) {
      c.name = arr[i].get<std::string>();
    } else {
      c.name = as_string(require(arr[i], "name", p), p + "/name");
      c.synonyms = optional_strings(arr[i], "synonyms", p);
      c.gloss = optional_strings(arr[i], "gloss", p);
    }
    if (!is_valid_symbol(c.name)) schema_error(p + "/name", "class name must match [a-z][a-z0-9_]*");
    out.push_back(std::move(c));
  }
  try {
    return ObjectDatabase(std::move(out));
  } catch (const Error& e) {
    schema_error(base, e.what());
  }
}

std::vector<Effector> parse_effectors(const json& node, const std::string& path) {
  std::vector<Effector> out;
  const auto& arr = as_array(node, path);
  for (std::size_t i = 0; i < arr.size(); ++i) {
    const std::string p = path + "/" + std::to_string(i);
    Effector e;
    if (arr[i].is_string()) {
      e.name = arr[i].get<std::string>();
    } else {
      e.name = as_string(require(arr[i], "name", p), p + "/name");
      e.synonyms = optional_strings(arr[i], "synonyms", p);
    }
    if (!is_valid_symbol(e.name)) schema_error(p, "effector name must match [a-z][a-z0-9_]*");
    out.push_back(std::move(e));
  }
  return out;
}

WorldModel parse_world(const json& node, const Domain& domain, const std::string& path) {
  WorldModel world;
  std::int64_t max_id = -1;
  if (auto it = node.find("instances"); it != node.end()) {
    const auto& arr = as_array(*it, path + "/instances");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "/instances/" + std::to_string(i);
      ObjectInstance inst;
      inst.class_name = as_string(require(arr[i], "class", p), p + "/class");
      if (!is_valid_symbol(inst.class_name)) schema_error(p + "/class", "invalid class symbol");
      inst.id = as_integer(require(arr[i], "id", p), p + "/id");
      if (inst.id < 0) schema_error(p + "/id", "id must be nonnegative");
      if (auto pose = arr[i].find("pose"); pose != arr[i].end()) inst.pose = pose3(*pose, p + "/pose");
      max_id = std::max(max_id, inst.id);
      world.instances.push_back(std::move(inst));
    }
  }
  std::sort(world.instances.begin(), world.instances.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
  if (auto it = node.find("state"); it != node.end()) {
    const auto& arr = as_array(*it, path + "/state");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "/state/" + std::to_string(i);
      const auto text = as_string(arr[i], p);
      auto lit = domain.parse_literal(text);
      if (!lit) throw Error(Errc::integrity, p + ": '" + text + "' is not a literal over the declared predicates");
      world.state.insert(std::move(*lit));
    }
  }
  world.next_id = max_id + 1;
  if (auto it = node.find("next_id"); it != node.end()) {
    world.next_id = as_integer(*it, path + "/next_id");
    if (world.next_id <= max_id) schema_error(path + "/next_id", "must exceed every instance id");
  }
  return world;
}

}  // namespace

Scene scene_from_json(const json& node, const std::string& path) {
  Scene scene;
  if (!node.is_object()) schema_error(path, "expected an object");
  if (auto it = node.find("robot"); it != node.end()) {
    if (auto p = it->find("position"); p != it->end()) scene.robot.position = vec2(*p, path + "/robot/position");
    if (auto h = it->find("heading"); h != it->end()) scene.robot.heading = as_number(*h, path + "/robot/heading");
  }
  if (auto it = node.find("camera"); it != node.end()) {
    if (auto f = it->find("fov"); f != it->end()) scene.camera.fov = as_number(*f, path + "/camera/fov");
    if (auto r = it->find("range"); r != it->end()) scene.camera.range = as_number(*r, path + "/camera/range");
  }
  if (auto it = node.find("max_step"); it != node.end()) scene.max_step = as_number(*it, path + "/max_step");
  if (auto it = node.find("max_turn"); it != node.end()) scene.max_turn = as_number(*it, path + "/max_turn");
  if (auto it = node.find("objects"); it != node.end()) {
    const auto& arr = as_array(*it, path + "/objects");
    for (std::size_t i = 0; i < arr.size(); ++i) {
      const std::string p = path + "/objects/" + std::to_string(i);
      SceneObject o;
      o.class_name = as_string(require(arr[i], "class", p), p + "/class");
      o.id = as_integer(require(arr[i], "id", p), p + "/id");
      o.position = vec2(require(arr[i], "position", p), p + "/position");
      if (const auto& pos = arr[i]["position"]; pos.size() == 3) o.z = as_number(pos[2], p + "/position/2");
      if (auto r = arr[i].find("radius"); r != arr[i].end()) o.radius = as_number(*r, p + "/radius");
      o.state = optional_strings(arr[i], "state", p);
      scene.objects.push_back(std::move(o));
    }
  }
  try {
    scene.validate();
  } catch (const Error& e) {
    schema_error(path, e.what());
  }
  return scene;
}

Scenario load_scenario(const json& doc) {
  if (!doc.is_object()) schema_error("", "scenario must be a JSON object");
  Scenario scenario;
  if (auto it = doc.find("name"); it != doc.end()) scenario.name = as_string(*it, "/name");

  std::string domain_text;
  if (auto it = doc.find("domain"); it != doc.end()) {
    if (it->is_array()) {
      for (const auto& line : string_list(*it, "/domain")) domain_text += line + "\n";
    } else {
      domain_text = as_string(*it, "/domain");
    }
  }
  try {
    scenario.models.domain = parse_domain(domain_text);
  } catch (const SyntaxError& e) {
    throw Error(Errc::load, std::string("/domain: ") + e.what());
  } catch (const Error& e) {
    throw Error(Errc::load, std::string("/domain: ") + e.what());
  }

  scenario.models.odb = parse_odb(require(doc, "object_database", ""), "/object_database");
  if (auto it = doc.find("effectors"); it != doc.end()) {
    scenario.models.effectors = parse_effectors(*it, "/effectors");
  }
  if (auto it = doc.find("world"); it != doc.end()) {
    if (!it->is_object()) schema_error("/world", "expected an object");
    scenario.models.world = parse_world(*it, scenario.models.domain, "/world");
  }
  scenario.models.validate();

  if (auto it = doc.find("scene"); it != doc.end() && !it->is_null()) {
    scenario.scene = scene_from_json(*it);
    for (const auto& o : scenario.scene->objects) {
      for (const auto& entry : o.state) {
        auto lits = state_literals(SceneObject{o.class_name, o.id, {}, 1.0, {entry}}, "x$0");
        const auto* decl = scenario.models.domain.find_predicate(lits.front().predicate);
        if (decl == nullptr || decl->arity() != lits.front().args.size()) {
          schema_error("/scene/objects", "object " + std::to_string(o.id) + " state '" + entry +
                                             "' does not match a declared predicate");
        }
      }
    }
  }
  if (auto it = doc.find("lexicon"); it != doc.end()) {
    if (auto s = it->find("synonyms"); s != it->end()) {
      if (!s->is_object()) schema_error("/lexicon/synonyms", "expected an object");
      for (const auto& [k, v] : s->items()) scenario.lexicon.synonyms[k] = as_string(v, "/lexicon/synonyms/" + k);
    }
    scenario.lexicon.colors = optional_strings(*it, "colors", "/lexicon");
  }
  return scenario;
}

Scenario load_scenario(std::string_view document) {
  json doc;
  try {
    doc = json::parse(document);
  } catch (const json::parse_error& e) {
    throw Error(Errc::load, std::string("/: invalid JSON: ") + e.what());
  }
  return load_scenario(doc);
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::not_found, "cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

Scenario load_scenario_file(const std::filesystem::path& path) {
  Scenario s = load_scenario(std::string_view(read_text_file(path)));
  if (s.name.empty()) s.name = path.stem().string();
  return s;
}

json to_json(const ObjectInstance& inst) {
  return {{"class", inst.class_name}, {"id", inst.id}, {"pose", inst.pose}, {"symbol", inst.symbol()}};
}

json to_json(const RobotModels& models) {
  json classes = json::array();
  for (const auto& c : models.odb.classes()) {
    classes.push_back({{"name", c.name}, {"synonyms", c.synonyms}, {"gloss", c.gloss}});
  }
  json effectors = json::array();
  for (const auto& e : models.effectors) effectors.push_back({{"name", e.name}, {"synonyms", e.synonyms}});
  json instances = json::array();
  for (const auto& inst : models.world.instances) instances.push_back(to_json(inst));
  json state = json::array();
  for (const auto& lit : models.world.state) state.push_back(serialize_literal(lit));
  return {{"object_database", classes},
          {"effectors", effectors},
          {"world", {{"instances", instances}, {"state", state}, {"next_id", models.world.next_id}}},
          {"domain", models.domain.source}};
}

json to_json(const Scene& scene) {
  json objects = json::array();
  for (const auto& o : scene.objects) {
    objects.push_back({{"class", o.class_name},
                       {"id", o.id},
                       {"position", {o.position.x, o.position.y, o.z}},
                       {"radius", o.radius},
                       {"state", o.state}});
  }
  return {{"robot", {{"position", {scene.robot.position.x, scene.robot.position.y}}, {"heading", scene.robot.heading}}},
          {"camera", {{"fov", scene.camera.fov}, {"range", scene.camera.range}}},
          {"max_step", scene.max_step},
          {"max_turn", scene.max_turn},
          {"objects", objects}};
}

json to_json(const Scenario& scenario) {
  json doc = to_json(scenario.models);
  doc["name"] = scenario.name;
  if (scenario.scene) doc["scene"] = to_json(*scenario.scene);
  if (!scenario.lexicon.synonyms.empty() || !scenario.lexicon.colors.empty()) {
    doc["lexicon"] = {{"synonyms", scenario.lexicon.synonyms}, {"colors", scenario.lexicon.colors}};
  }
  return doc;
}

}  // namespace recon
