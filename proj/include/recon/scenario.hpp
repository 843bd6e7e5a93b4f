#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recon/model.hpp"
#include "recon/scene.hpp"

namespace recon {

/// Scenario-specific vocabulary merged into the default lexicon.
struct LexiconExtras {
  std::map<std::string, std::string> synonyms;  // surface phrase -> canonical token
  std::vector<std::string> colors;
  bool operator==(const LexiconExtras&) const = default;
};

struct Scenario {
  std::string name;
  RobotModels models;
  std::optional<Scene> scene;
  LexiconExtras lexicon;
};

/// Parses and validates a scenario document (JSON). Schema violations raise Errc::load with
/// the offending JSON path; dangling literal arguments raise Errc::integrity.
Scenario load_scenario(std::string_view document);
Scenario load_scenario(const nlohmann::json& document);
Scenario load_scenario_file(const std::filesystem::path& path);

nlohmann::json to_json(const Scenario& scenario);
nlohmann::json to_json(const RobotModels& models);
nlohmann::json to_json(const Scene& scene);
nlohmann::json to_json(const ObjectInstance& instance);
Scene scene_from_json(const nlohmann::json& node, const std::string& path = "/scene");

std::string read_text_file(const std::filesystem::path& path);

}  // namespace recon
