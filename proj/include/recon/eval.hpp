#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "recon/chat.hpp"
#include "recon/session.hpp"

namespace recon {

enum class Unit { object_localization, unmet_precondition, recovery_suggestion };

std::string_view to_string(Unit unit);
Unit unit_from_string(std::string_view text);  // throws Errc::load
inline constexpr Unit kUnits[] = {Unit::object_localization, Unit::unmet_precondition, Unit::recovery_suggestion};

struct Episode {
  std::string id;
  Unit unit = Unit::object_localization;
  std::string scenario;                   // path relative to the dataset directory
  std::optional<nlohmann::json> inline_scenario;
  std::optional<std::string> image;
  std::string query;
  std::vector<std::string> rebuttals;
  std::optional<Pose> ee_pose;
  std::vector<Turn> ground_truth;
  std::vector<std::string> decisive_fact;  // phrases the decisive robot turn must contain
};

/// Throws Errc::load naming the offending path.
Episode episode_from_json(const nlohmann::json& node, const std::string& where = "");
nlohmann::json to_json(const Episode& episode);

struct Dataset {
  std::filesystem::path root;
  std::vector<Episode> episodes;  // file name order
};

/// Reads `dir/episodes/*.json`. Throws Errc::load.
Dataset load_dataset(const std::filesystem::path& dir);

Scenario episode_scenario(const Dataset& dataset, const Episode& episode);

struct Transcript {
  std::string episode;
  Unit unit = Unit::object_localization;
  int run = 1;
  std::vector<Turn> dialogue;
  std::optional<nlohmann::json> explanation;
  std::vector<nlohmann::json> recoveries;
  std::string error;
  nlohmann::json backend = nlohmann::json::object();

  std::string key() const { return episode + "#" + std::to_string(run); }
};

nlohmann::json to_json(const Transcript& transcript);
Transcript transcript_from_json(const nlohmann::json& node);

struct RunConfig {
  EngineConfig engine;
  int runs = 3;
  bool apply_suggested_moves = true;
};

/// `runs` transcripts per episode, episode order then run order. Failures are recorded in the
/// transcript and the run continues.
std::vector<Transcript> run_episodes(const Dataset& dataset, const RunConfig& config);

struct LabelRecord {
  std::string transcript;
  std::string rater;  // human | judge
  Unit unit = Unit::object_localization;
  std::optional<bool> label;  // absent when the judge failed
  std::string rationale;
};

nlohmann::json to_json(const LabelRecord& record);
LabelRecord label_from_json(const nlohmann::json& node);

/// Per-unit truth conditions shown to both raters.
const std::map<Unit, std::string>& criteria();

/// Robot turn that carries the answer: the robot turn with the same ordinal as the last robot
/// turn of the ground truth.
std::optional<std::string> decisive_turn(const std::vector<Turn>& dialogue, const std::vector<Turn>& ground_truth);

/// Content tokens of a reply used by the scripted judge (filler words removed).
std::vector<std::string> key_tokens(std::string_view text);

enum class JudgeBackend { scripted, llm };

struct JudgeOptions {
  JudgeBackend backend = JudgeBackend::scripted;
  std::shared_ptr<ChatClient> chat;
  std::string model;
  std::string rater = "judge";
};

LabelRecord judge(const Transcript& transcript, const Episode& episode, const JudgeOptions& options);

/// Mean of the two raters' true fractions over transcripts of `unit` labeled by both.
/// Throws Errc::undefined_metric when no transcript qualifies.
double accuracy(const std::vector<LabelRecord>& labels, Unit unit, const std::string& rater_a = "human",
                const std::string& rater_b = "judge");

/// accuracy() when both raters labeled the unit, otherwise the single rater's true fraction.
double unit_accuracy(const std::vector<LabelRecord>& labels, Unit unit);

/// Two-rater, two-category kappa; 1 when chance agreement is 1. Throws Errc::argument on
/// empty or differently sized inputs.
double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b);
/// Keyed form; the key sets must be identical.
double cohen_kappa(const std::map<std::string, bool>& a, const std::map<std::string, bool>& b);
/// Over the transcripts both raters labeled.
double cohen_kappa(const std::vector<LabelRecord>& labels, const std::string& rater_a = "human",
                   const std::string& rater_b = "judge");

struct Report {
  nlohmann::json document;
  std::string table;
};

/// Per-unit accuracy, kappa and run counts. With `baseline`, adds per-unit delta rows
/// (difference of the two-decimal percentages). Throws Errc::undefined_metric on an empty label set.
Report report(const std::vector<Transcript>& transcripts, const std::vector<LabelRecord>& labels,
              const std::vector<LabelRecord>* baseline = nullptr);

// JSON-lines storage.
std::vector<Transcript> read_transcripts(const std::filesystem::path& path);
void write_transcripts(const std::filesystem::path& path, const std::vector<Transcript>& transcripts);
/// Throws Errc::argument when a (transcript, rater) pair repeats.
std::vector<LabelRecord> read_labels(const std::filesystem::path& path);
/// Appends records; rejects pairs already present in the file or repeated in `records`.
void append_labels(const std::filesystem::path& path, const std::vector<LabelRecord>& records);

}  // namespace recon
