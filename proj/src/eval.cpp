#include "recon/eval.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "recon/error.hpp"
#include "recon/lexicon.hpp"
#include "recon/prompts.hpp"

namespace recon {

using nlohmann::json;
namespace fs = std::filesystem;

std::string_view to_string(Unit unit) {
  switch (unit) {
    case Unit::object_localization: return "object_localization";
    case Unit::unmet_precondition: return "unmet_precondition";
    case Unit::recovery_suggestion: return "recovery_suggestion";
  }
  return "?";
}

Unit unit_from_string(std::string_view text) {
  for (auto u : kUnits) {
    if (to_string(u) == text) return u;
  }
  throw Error(Errc::load, "unknown unit '" + std::string(text) + "'");
}

namespace {

[[noreturn]] void bad(const std::string& where, const std::string& what) { throw Error(Errc::load, where + ": " + what); }

std::string req_string(const json& node, const char* key, const std::string& where) {
  auto it = node.find(key);
  if (it == node.end() || !it->is_string()) bad(where + "/" + key, "expected a string");
  return it->get<std::string>();
}

std::vector<Turn> turns_from_json(const json& node, const std::string& where) {
  if (!node.is_array()) bad(where, "expected an array of turns");
  std::vector<Turn> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    const auto& t = node[i];
    const std::string at = where + "/" + std::to_string(i);
    if (t.is_object() && t.contains("role")) {
      out.push_back({req_string(t, "role", at), req_string(t, "text", at)});
    } else if (t.is_object() && t.size() == 1 && t.begin().value().is_string()) {
      out.push_back({t.begin().key(), t.begin().value().get<std::string>()});  // {"robot": "..."}
    } else {
      bad(at, "expected {role, text} or {\"<role>\": text}");
    }
    if (out.back().role != "user" && out.back().role != "robot") bad(at, "role must be user or robot");
  }
  return out;
}

json turns_to_json(const std::vector<Turn>& turns) {
  json out = json::array();
  for (const auto& t : turns) out.push_back({{"role", t.role}, {"text", t.text}});
  return out;
}

std::vector<std::string> strings(const json& node, const std::string& where) {
  if (!node.is_array()) bad(where, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < node.size(); ++i) {
    if (!node[i].is_string()) bad(where + "/" + std::to_string(i), "expected a string");
    out.push_back(node[i].get<std::string>());
  }
  return out;
}

}  // namespace

Episode episode_from_json(const json& node, const std::string& where) {
  if (!node.is_object()) bad(where.empty() ? "/" : where, "expected an object");
  Episode ep;
  ep.id = req_string(node, "id", where);
  ep.unit = [&] {
    try {
      return unit_from_string(req_string(node, "unit", where));
    } catch (const Error& e) {
      bad(where + "/unit", e.what());
    }
  }();
  auto sc = node.find("scenario");
  if (sc == node.end()) bad(where + "/scenario", "missing");
  if (sc->is_string()) {
    ep.scenario = sc->get<std::string>();
  } else if (sc->is_object()) {
    ep.inline_scenario = *sc;
  } else {
    bad(where + "/scenario", "expected a path or an inline scenario");
  }
  if (auto it = node.find("image"); it != node.end() && !it->is_null()) {
    if (!it->is_string()) bad(where + "/image", "expected a string");
    ep.image = it->get<std::string>();
  }
  ep.query = req_string(node, "query", where);
  if (auto it = node.find("rebuttals"); it != node.end()) ep.rebuttals = strings(*it, where + "/rebuttals");
  if (auto it = node.find("ee_pose"); it != node.end() && !it->is_null()) {
    if (!it->is_array() || it->size() != 3 || !std::all_of(it->begin(), it->end(), [](const json& v) {
          return v.is_number();
        })) {
      bad(where + "/ee_pose", "expected [x, y, z]");
    }
    ep.ee_pose = Pose{(*it)[0].get<double>(), (*it)[1].get<double>(), (*it)[2].get<double>()};
  }
  auto gt = node.find("ground_truth_conversation");
  if (gt == node.end()) bad(where + "/ground_truth_conversation", "missing");
  ep.ground_truth = turns_from_json(*gt, where + "/ground_truth_conversation");
  if (std::none_of(ep.ground_truth.begin(), ep.ground_truth.end(), [](const Turn& t) { return t.role == "robot"; })) {
    bad(where + "/ground_truth_conversation", "needs at least one robot turn");
  }
  if (auto it = node.find("decisive_fact"); it != node.end()) {
    if (it->is_string()) {
      ep.decisive_fact.push_back(it->get<std::string>());
    } else {
      ep.decisive_fact = strings(*it, where + "/decisive_fact");
    }
  }
  return ep;
}

json to_json(const Episode& ep) {
  json out{{"id", ep.id},
           {"unit", to_string(ep.unit)},
           {"query", ep.query},
           {"rebuttals", ep.rebuttals},
           {"ground_truth_conversation", turns_to_json(ep.ground_truth)}};
  out["scenario"] = ep.inline_scenario ? *ep.inline_scenario : json(ep.scenario);
  if (ep.image) out["image"] = *ep.image;
  if (ep.ee_pose) out["ee_pose"] = *ep.ee_pose;
  if (!ep.decisive_fact.empty()) out["decisive_fact"] = ep.decisive_fact;
  return out;
}

Scenario episode_scenario(const Dataset& dataset, const Episode& ep) {
  if (ep.inline_scenario) return load_scenario(*ep.inline_scenario);
  return load_scenario_file(dataset.root / ep.scenario);
}

Dataset load_dataset(const fs::path& dir) {
  Dataset ds;
  ds.root = dir;
  const fs::path episodes = dir / "episodes";
  if (!fs::is_directory(episodes)) throw Error(Errc::load, episodes.string() + ": not a directory");
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(episodes)) {
    if (entry.is_regular_file() && entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::set<std::string> ids;
  for (const auto& f : files) {
    json node;
    try {
      node = json::parse(read_text_file(f));
    } catch (const json::parse_error& e) {
      throw Error(Errc::load, f.string() + ": " + e.what());
    }
    Episode ep = episode_from_json(node, f.filename().string());
    if (!ids.insert(ep.id).second) throw Error(Errc::load, f.string() + ": duplicate episode id " + ep.id);
    ds.episodes.push_back(std::move(ep));
  }
  return ds;
}

json to_json(const Transcript& t) {
  json rec = json::array();
  for (const auto& r : t.recoveries) rec.push_back(r);
  return {{"key", t.key()},
          {"episode", t.episode},
          {"unit", to_string(t.unit)},
          {"run", t.run},
          {"dialogue", turns_to_json(t.dialogue)},
          {"explanation", t.explanation ? *t.explanation : json(nullptr)},
          {"recoveries", rec},
          {"error", t.error},
          {"backend", t.backend}};
}

Transcript transcript_from_json(const json& node) {
  const std::string where = "/transcript";
  Transcript t;
  t.episode = req_string(node, "episode", where);
  t.unit = unit_from_string(req_string(node, "unit", where));
  if (!node.contains("run") || !node["run"].is_number_integer()) bad(where + "/run", "expected an integer");
  t.run = node["run"].get<int>();
  t.dialogue = turns_from_json(node.value("dialogue", json::array()), where + "/dialogue");
  if (auto it = node.find("explanation"); it != node.end() && !it->is_null()) t.explanation = *it;
  if (auto it = node.find("recoveries"); it != node.end() && it->is_array()) {
    for (const auto& r : *it) t.recoveries.push_back(r);
  }
  t.error = node.value("error", "");
  t.backend = node.value("backend", json::object());
  return t;
}

std::vector<Transcript> run_episodes(const Dataset& dataset, const RunConfig& config) {
  if (config.runs < 1) throw Error(Errc::argument, "runs must be >= 1");
  std::vector<Transcript> out;
  const std::string matcher = config.engine.matcher ? config.engine.matcher->name() : "deterministic";
  for (const auto& ep : dataset.episodes) {
    for (int run = 1; run <= config.runs; ++run) {
      Transcript t;
      t.episode = ep.id;
      t.unit = ep.unit;
      t.run = run;
      t.backend = {{"matcher", matcher},
                   {"render_style", config.engine.render_style == RenderStyle::llm ? "llm" : "template"},
                   {"llm_parsing", config.engine.llm_parsing},
                   {"glosses", config.engine.use_glosses},
                   {"model", config.engine.chat ? json(config.engine.model) : json(nullptr)}};
      try {
        Session session(episode_scenario(dataset, ep), config.engine);
        t.dialogue.push_back({"user", ep.query});
        try {
          auto ex = session.query(ep.query);
          t.explanation = to_json(ex);
          t.dialogue.push_back({"robot", ex.rendered});
        } catch (const Error& e) {
          if (e.code() != Errc::unparseable) throw;
          t.dialogue.push_back({"robot", "Sorry, I did not understand the question. Could you rephrase it?"});
          t.error = e.what();
        }
        for (const auto& text : ep.rebuttals) {
          if (session.phase() != Phase::explained) break;
          t.dialogue.push_back({"user", text});
          try {
            auto r = session.rebuttal(text);
            t.recoveries.push_back(to_json(r));
            t.dialogue.push_back({"robot", r.message});
            if (r.kind == RecoveryKind::movement_suggested && config.apply_suggested_moves && r.suggested_move) {
              auto moved = session.apply_move(*r.suggested_move);
              if (moved.recovery) {
                t.recoveries.push_back(to_json(*moved.recovery));
                t.dialogue.push_back({"robot", moved.recovery->message});
              }
            }
          } catch (const Error& e) {
            if (e.code() != Errc::clarification) throw;
            t.dialogue.push_back({"robot", e.what()});
          }
        }
        if (session.phase() == Phase::recovering && ep.ee_pose && session.state()["pending"]["awaiting_class"].is_string()) {
          auto r = session.ee_pose(*ep.ee_pose);
          t.recoveries.push_back(to_json(r));
          t.dialogue.push_back({"robot", r.message});
        }
      } catch (const Error& e) {
        t.error = e.what();
        spdlog::warn("episode {} run {}: {}", ep.id, run, e.what());
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

json to_json(const LabelRecord& r) {
  return {{"transcript", r.transcript},
          {"rater", r.rater},
          {"unit", to_string(r.unit)},
          {"label", r.label ? json(*r.label) : json(nullptr)},
          {"rationale", r.rationale}};
}

LabelRecord label_from_json(const json& node) {
  const std::string where = "/label";
  if (!node.is_object()) bad(where, "expected an object");
  LabelRecord r;
  r.transcript = req_string(node, "transcript", where);
  r.rater = req_string(node, "rater", where);
  r.unit = unit_from_string(req_string(node, "unit", where));
  auto it = node.find("label");
  if (it != node.end() && it->is_boolean()) {
    r.label = it->get<bool>();
  } else if (it != node.end() && !it->is_null()) {
    bad(where + "/label", "expected a boolean or null");
  }
  r.rationale = node.value("rationale", "");
  return r;
}

const std::map<Unit, std::string>& criteria() {
  static const std::map<Unit, std::string> rows = {
      {Unit::object_localization,
       "the reply says correctly whether the object(s) named in the query, or needed for the task, are in the "
       "robot's world or not"},
      {Unit::unmet_precondition, "the reply names the precondition(s) that the task is missing"},
      {Unit::recovery_suggestion,
       "the reply suggests a correct base movement for the right object, or says correctly that the object is "
       "not in the environment"},
  };
  return rows;
}

std::optional<std::string> decisive_turn(const std::vector<Turn>& dialogue, const std::vector<Turn>& ground_truth) {
  const auto ordinal = std::count_if(ground_truth.begin(), ground_truth.end(),
                                     [](const Turn& t) { return t.role == "robot"; });
  long seen = 0;
  for (const auto& t : dialogue) {
    if (t.role == "robot" && ++seen == ordinal) return t.text;
  }
  return std::nullopt;
}

std::vector<std::string> key_tokens(std::string_view text) {
  static const std::set<std::string> filler = {
      "you", "i", "need", "should", "able", "be", "can", "cannot", "cant", "me", "robot", "sorry", "afraid",
      "am", "so", "because", "will", "would", "could", "first", "then", "and", "but", "if", "as", "for", "by",
      "was", "were", "has", "have", "do", "does", "ensure", "make", "sure", "order", "currently", "current",
      "based", "think", "see", "let", "know", "thank", "okay", "ok", "well", "just", "im", "dont"};
  static const Lexicon lex = default_lexicon();
  std::vector<std::string> out;
  for (auto& t : lex.normalize(text)) {
    if (!filler.contains(t) && std::find(out.begin(), out.end(), t) == out.end()) out.push_back(std::move(t));
  }
  return out;
}

LabelRecord judge(const Transcript& transcript, const Episode& episode, const JudgeOptions& options) {
  LabelRecord rec;
  rec.transcript = transcript.key();
  rec.rater = options.rater;
  rec.unit = episode.unit;
  if (transcript.episode != episode.id) {
    throw Error(Errc::argument, "transcript " + transcript.key() + " does not belong to episode " + episode.id);
  }
  const auto reply = decisive_turn(transcript.dialogue, episode.ground_truth);
  const auto truth = decisive_turn(episode.ground_truth, episode.ground_truth);

  if (options.backend == JudgeBackend::scripted) {
    if (!reply) {
      rec.label = false;
      rec.rationale = "no decisive robot turn";
      return rec;
    }
    static const Lexicon lex = default_lexicon();
    const auto reply_tokens = lex.normalize(*reply);
    const std::set<std::string> have(reply_tokens.begin(), reply_tokens.end());
    std::vector<std::string> wanted;
    if (episode.decisive_fact.empty()) {
      wanted = key_tokens(*truth);
    } else {
      for (const auto& fact : episode.decisive_fact) {
        for (auto& t : key_tokens(fact)) wanted.push_back(std::move(t));
      }
    }
    std::vector<std::string> missing;
    for (const auto& w : wanted) {
      if (!have.contains(w)) missing.push_back(w);
    }
    rec.label = missing.empty();
    if (missing.empty()) {
      rec.rationale = "decisive turn contains every key fact";
    } else {
      rec.rationale = "missing:";
      for (const auto& m : missing) rec.rationale += " " + m;
    }
    return rec;
  }

  if (!options.chat) {
    rec.rationale = "error: no chat backend configured";
    return rec;
  }
  ChatRequest req;
  req.model = options.model;
  req.messages.push_back({"user", fill_prompt(prompt_text("judge"), {{"unit", std::string(to_string(episode.unit))},
                                                                     {"criteria", criteria().at(episode.unit)},
                                                                     {"query", episode.query},
                                                                     {"ground_truth", truth.value_or("")},
                                                                     {"reply", reply.value_or("(no reply)")}})});
  try {
    auto answer = complete_with_final_answer(*options.chat, req);
    if (!answer.value.is_object() || !answer.value.contains("label") || !answer.value["label"].is_boolean()) {
      throw BackendError(BackendErrc::extraction, "final answer has no boolean 'label'");
    }
    rec.label = answer.value["label"].get<bool>();
    rec.rationale = answer.value.value("rationale", "");
  } catch (const Error& e) {
    rec.rationale = std::string("error: ") + e.what();
  }
  return rec;
}

namespace {

// transcript -> label, for one rater and unit (or all units when unit is empty).
std::map<std::string, bool> labels_of(const std::vector<LabelRecord>& labels, const std::string& rater,
                                      std::optional<Unit> unit) {
  std::map<std::string, bool> out;
  for (const auto& r : labels) {
    if (r.rater == rater && r.label && (!unit || r.unit == *unit)) out[r.transcript] = *r.label;
  }
  return out;
}

std::pair<std::map<std::string, bool>, std::map<std::string, bool>> paired(const std::vector<LabelRecord>& labels,
                                                                            const std::string& ra,
                                                                            const std::string& rb,
                                                                            std::optional<Unit> unit) {
  auto a = labels_of(labels, ra, unit);
  auto b = labels_of(labels, rb, unit);
  std::size_t dropped = 0;
  for (auto it = a.begin(); it != a.end();) {
    if (!b.contains(it->first)) {
      it = a.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  for (auto it = b.begin(); it != b.end();) {
    if (!a.contains(it->first)) {
      it = b.erase(it);
      ++dropped;
    } else {
      ++it;
    }
  }
  if (dropped > 0) spdlog::warn("{} label(s) without a counterpart from the other rater were excluded", dropped);
  return {std::move(a), std::move(b)};
}

double true_fraction(const std::map<std::string, bool>& m) {
  std::size_t t = 0;
  for (const auto& [k, v] : m) t += v ? 1 : 0;
  return static_cast<double>(t) / static_cast<double>(m.size());
}

std::string fixed2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string fixed4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4f", v);
  return buf;
}

double round2(double v) { return std::round(v * 100.0) / 100.0; }

}  // namespace

double accuracy(const std::vector<LabelRecord>& labels, Unit unit, const std::string& rater_a,
                const std::string& rater_b) {
  auto [a, b] = paired(labels, rater_a, rater_b, unit);
  if (a.empty()) {
    throw Error(Errc::undefined_metric, "no transcript of unit " + std::string(to_string(unit)) +
                                            " is labeled by both " + rater_a + " and " + rater_b);
  }
  return (true_fraction(a) + true_fraction(b)) / 2.0;
}

double unit_accuracy(const std::vector<LabelRecord>& labels, Unit unit) {
  const bool human = !labels_of(labels, "human", unit).empty();
  const bool judged = !labels_of(labels, "judge", unit).empty();
  if (human && judged) return accuracy(labels, unit);
  const auto only = labels_of(labels, human ? "human" : "judge", unit);
  if (only.empty()) throw Error(Errc::undefined_metric, "no labels for unit " + std::string(to_string(unit)));
  return true_fraction(only);
}

double cohen_kappa(const std::vector<bool>& a, const std::vector<bool>& b) {
  if (a.empty() || a.size() != b.size()) {
    throw Error(Errc::argument, "kappa needs two nonempty label vectors of equal length");
  }
  const double n = static_cast<double>(a.size());
  double agree = 0, ta = 0, tb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    agree += a[i] == b[i] ? 1 : 0;
    ta += a[i] ? 1 : 0;
    tb += b[i] ? 1 : 0;
  }
  const double po = agree / n;
  const double pe = (ta / n) * (tb / n) + (1 - ta / n) * (1 - tb / n);
  if (pe == 1.0) return 1.0;
  return (po - pe) / (1.0 - pe);
}

double cohen_kappa(const std::map<std::string, bool>& a, const std::map<std::string, bool>& b) {
  if (a.size() != b.size() || !std::equal(a.begin(), a.end(), b.begin(), [](const auto& x, const auto& y) {
        return x.first == y.first;
      })) {
    throw Error(Errc::argument, "kappa needs the same transcript keys for both raters");
  }
  std::vector<bool> va, vb;
  for (const auto& [k, v] : a) va.push_back(v);
  for (const auto& [k, v] : b) vb.push_back(v);
  return cohen_kappa(va, vb);
}

double cohen_kappa(const std::vector<LabelRecord>& labels, const std::string& rater_a, const std::string& rater_b) {
  auto [a, b] = paired(labels, rater_a, rater_b, std::nullopt);
  return cohen_kappa(a, b);
}

Report report(const std::vector<Transcript>& transcripts, const std::vector<LabelRecord>& labels,
              const std::vector<LabelRecord>* baseline) {
  if (labels.empty()) throw Error(Errc::undefined_metric, "no labels to report on");
  std::map<Unit, int> counts;
  std::set<std::string> episodes;
  int max_run = 0;
  for (const auto& t : transcripts) {
    ++counts[t.unit];
    episodes.insert(t.episode);
    max_run = std::max(max_run, t.run);
  }
  Report rep;
  json units = json::array();
  std::ostringstream table;
  char line[160];
  std::snprintf(line, sizeof line, "%-22s %11s %8s %8s %9s\n", "unit", "transcripts", "human", "judge", "accuracy");
  table << line;
  for (auto u : kUnits) {
    json row{{"unit", to_string(u)}, {"transcripts", counts[u]}};
    auto human = labels_of(labels, "human", u);
    auto judged = labels_of(labels, "judge", u);
    if (!human.empty() && !judged.empty()) std::tie(human, judged) = paired(labels, "human", "judge", u);
    std::string hs = "-", js = "-";
    std::vector<double> fractions;
    if (!human.empty()) {
      row["human"] = true_fraction(human);
      fractions.push_back(true_fraction(human));
      hs = fixed4(true_fraction(human));
    }
    if (!judged.empty()) {
      row["judge"] = true_fraction(judged);
      fractions.push_back(true_fraction(judged));
      js = fixed4(true_fraction(judged));
    }
    if (fractions.empty()) {
      row["accuracy"] = nullptr;
      std::snprintf(line, sizeof line, "%-22s %11d %8s %8s %9s\n", std::string(to_string(u)).c_str(), counts[u], "-",
                    "-", "-");
    } else {
      const double acc = fractions.size() == 2 ? (fractions[0] + fractions[1]) / 2.0 : fractions[0];
      row["labeled"] = std::max(human.size(), judged.size());
      row["accuracy"] = acc;
      row["accuracy_percent"] = round2(acc * 100.0);
      std::snprintf(line, sizeof line, "%-22s %11d %8s %8s %8s%%\n", std::string(to_string(u)).c_str(), counts[u],
                    hs.c_str(), js.c_str(), fixed2(acc * 100.0).c_str());
      if (baseline) {
        try {
          const double base = unit_accuracy(*baseline, u);
          row["baseline_percent"] = round2(base * 100.0);
          row["delta_points"] = round2(round2(acc * 100.0) - round2(base * 100.0));
        } catch (const Error&) {
          row["delta_points"] = nullptr;
        }
      }
    }
    table << line;
    units.push_back(row);
  }
  json kappa = nullptr;
  try {
    if (labels_of(labels, "human", std::nullopt).empty() || labels_of(labels, "judge", std::nullopt).empty()) {
      throw Error(Errc::undefined_metric, "kappa needs both raters");
    }
    kappa = cohen_kappa(labels);
    table << "cohen kappa (human vs judge): " << fixed2(kappa.get<double>()) << "\n";
  } catch (const Error&) {
    table << "cohen kappa (human vs judge): -\n";
  }
  if (baseline) {
    for (const auto& row : units) {
      if (row.contains("delta_points") && !row["delta_points"].is_null()) {
        const double d = row["delta_points"].get<double>();
        table << "delta " << row["unit"].get<std::string>() << ": " << (d >= 0 ? "+" : "") << fixed2(d)
              << " points\n";
      }
    }
  }
  table << "episodes: " << episodes.size() << ", runs: " << max_run << ", transcripts: " << transcripts.size()
        << "\n";
  json backend = transcripts.empty() ? json(nullptr) : transcripts.front().backend;
  rep.document = {{"units", units},
                  {"kappa", kappa},
                  {"episodes", episodes.size()},
                  {"runs", max_run},
                  {"transcripts", transcripts.size()},
                  {"backend", backend}};
  rep.table = table.str();
  return rep;
}

namespace {

std::vector<json> read_jsonl(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(Errc::load, path.string() + ": cannot open");
  std::vector<json> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(json::parse(line));
    } catch (const json::parse_error& e) {
      throw Error(Errc::load, path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

void check_unique(const std::vector<LabelRecord>& records, std::set<std::pair<std::string, std::string>>& seen) {
  for (const auto& r : records) {
    if (!seen.insert({r.transcript, r.rater}).second) {
      throw Error(Errc::argument, "duplicate label for " + r.transcript + " by " + r.rater);
    }
  }
}

}  // namespace

std::vector<Transcript> read_transcripts(const fs::path& path) {
  std::vector<Transcript> out;
  for (const auto& node : read_jsonl(path)) out.push_back(transcript_from_json(node));
  return out;
}

void write_transcripts(const fs::path& path, const std::vector<Transcript>& transcripts) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  const fs::path tmp = path.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::trunc);
    if (!out) throw Error(Errc::load, tmp.string() + ": cannot write");
    for (const auto& t : transcripts) out << to_json(t).dump() << "\n";
  }
  fs::rename(tmp, path);
}

std::vector<LabelRecord> read_labels(const fs::path& path) {
  std::vector<LabelRecord> out;
  for (const auto& node : read_jsonl(path)) {
    try {
      out.push_back(label_from_json(node));
    } catch (const Error& e) {
      throw Error(Errc::load, path.string() + ": " + e.what());
    }
  }
  std::set<std::pair<std::string, std::string>> seen;
  check_unique(out, seen);
  return out;
}

void append_labels(const fs::path& path, const std::vector<LabelRecord>& records) {
  std::set<std::pair<std::string, std::string>> seen;
  if (fs::exists(path)) check_unique(read_labels(path), seen);
  check_unique(records, seen);
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::string blob;
  for (const auto& r : records) blob += to_json(r).dump() + "\n";
  std::ofstream out(path, std::ios::app);
  if (!out) throw Error(Errc::load, path.string() + ": cannot append");
  out << blob;
  out.flush();
}

}  // namespace recon
