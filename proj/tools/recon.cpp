#include <csignal>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <memory>
#include <sstream>
#include <string>
#include <thread>
#include <atomic>
#include <chrono>

#include <CLI11.hpp>
#include <spdlog/spdlog.h>

#include "recon/action_graph.hpp"
#include "recon/chat.hpp"
#include "recon/error.hpp"
#include "recon/eval.hpp"
#include "recon/lexicon.hpp"
#include "recon/matcher.hpp"
#include "recon/scenario.hpp"
#include "recon/service.hpp"
#include "recon/session.hpp"

using namespace recon;
using nlohmann::json;

namespace {

constexpr int kOk = 0;
constexpr int kRuntime = 1;
constexpr int kUsage = 2;

struct Options {
  std::string matcher = "det";
  std::string render = "template";
  bool llm_parsing = false;
  bool no_llm = false;
  bool no_glosses = false;
  std::string llm_endpoint;
  std::string llm_model;
  std::string llm_cache;
  std::string format = "text";
  bool verbose = false;
};

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

EngineConfig make_engine(const Options& o) {
  EngineConfig cfg;
  cfg.use_glosses = !o.no_glosses;
  const bool wants_llm = !o.no_llm && (o.matcher == "llm" || o.render == "llm" || o.llm_parsing);
  if (!wants_llm) return cfg;
  LlmSettings s = LlmSettings::from_env();
  if (!o.llm_endpoint.empty()) s.endpoint = o.llm_endpoint;
  if (!o.llm_model.empty()) s.model = o.llm_model;
  std::shared_ptr<ChatClient> http;
  if (s.configured()) http = std::make_shared<HttpChatClient>(s);
  if (!http && o.llm_cache.empty()) {
    throw UsageError("LLM features need --llm-endpoint (or RECON_LLM_ENDPOINT) or --llm-cache");
  }
  cfg.chat = o.llm_cache.empty() ? http : std::make_shared<CachingChatClient>(http, o.llm_cache);
  cfg.model = s.model;
  if (o.matcher == "llm") cfg.matcher = std::make_shared<LlmMatcher>(cfg.chat, cfg.model);
  cfg.llm_parsing = o.llm_parsing;
  if (o.render == "llm") cfg.render_style = RenderStyle::llm;
  return cfg;
}

void print_explanation(const Explanation& ex, const std::string& format) {
  if (format == "json") {
    std::cout << to_json(ex).dump(2) << "\n";
    return;
  }
  std::cout << "divergence: " << to_string(ex.divergence.kind()) << "\n";
  if (ex.matched_class) std::cout << "matched: " << *ex.matched_class << "\n";
  std::cout << "trace:\n";
  for (const auto& t : ex.trace) {
    std::cout << "  " << t.step << " " << t.outcome;
    if (!t.detail.empty()) std::cout << "  " << t.detail;
    std::cout << "\n";
  }
  for (const auto& n : ex.notes) std::cout << "note: " << n << "\n";
  std::cout << "robot: " << ex.rendered << "\n";
}

void print_graph(const ActionGraph& g) {
  std::cout << "available:\n";
  for (const auto& a : g.available) std::cout << "  " << to_json(a).dump() << "\n";
  std::cout << "blocked:\n" << dump_blocked(g) << "\n";
}

void say(const std::string& text) { std::cout << "robot: " << text << "\n"; }

void print_recovery(const RecoveryOutcome& r) {
  for (const auto& e : r.events) std::cout << "  [" << to_json(e).dump() << "]\n";
  say(r.message);
}

std::vector<std::string> words(const std::string& line) {
  std::istringstream in(line);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

double number(const std::string& text) {
  try {
    std::size_t used = 0;
    double v = std::stod(text, &used);
    if (used == text.size()) return v;
  } catch (const std::exception&) {
  }
  throw Error(Errc::argument, "'" + text + "' is not a number");
}

const char* kReplHelp =
    "  <text>             query (\"why ...\") or rebuttal after an explanation\n"
    "  :q <text>          force a query        :r <text>     force a rebuttal\n"
    "  :state             session state        :graph        action graph\n"
    "  :move              apply the suggested move\n"
    "  :move dx dy [dth]  move the base (meters, radians)\n"
    "  :ee x y z          end-effector pose for the awaited object\n"
    "  :exec name args..  execute an available action\n"
    "  :remove id         remove a scene object   :place id x y   relocate one\n"
    "  :help  :quit\n";

void repl_line(Session& s, const std::string& line) {
  auto w = words(line);
  if (w.empty()) return;
  const std::string& cmd = w[0];
  auto rest = [&] {
    const auto pos = line.find(cmd) + cmd.size();
    return pos < line.size() ? line.substr(line.find_first_not_of(' ', pos)) : std::string();
  };
  if (cmd == ":help") {
    std::cout << kReplHelp;
  } else if (cmd == ":state") {
    std::cout << s.state().dump(2) << "\n";
  } else if (cmd == ":graph") {
    print_graph(s.graph());
  } else if (cmd == ":ee") {
    if (w.size() != 4) throw Error(Errc::argument, "usage: :ee x y z");
    print_recovery(s.ee_pose({number(w[1]), number(w[2]), number(w[3])}));
  } else if (cmd == ":move") {
    BaseMove move;
    if (w.size() == 1) {
      const json pending = s.state()["pending"]["suggested_move"];
      if (pending.is_null()) throw Error(Errc::phase, "no movement suggestion is pending");
      move = {{pending["delta"][0].get<double>(), pending["delta"][1].get<double>()},
              pending["heading_change"].get<double>()};
    } else if (w.size() == 3 || w.size() == 4) {
      move = {{number(w[1]), number(w[2])}, w.size() == 4 ? number(w[3]) : 0.0};
    } else {
      throw Error(Errc::argument, "usage: :move [dx dy [dtheta]]");
    }
    auto r = s.apply_move(move);
    std::cout << "  moved " << to_json(r.move)["text"].get<std::string>() << "\n";
    if (r.recovery) {
      print_recovery(*r.recovery);
    } else {
      for (const auto& e : r.events) std::cout << "  [" << to_json(e).dump() << "]\n";
    }
  } else if (cmd == ":exec") {
    if (w.size() < 2) throw Error(Errc::argument, "usage: :exec template_name args...");
    GroundedAction a{w[1], {w.begin() + 2, w.end()}};
    for (const auto& e : s.execute(a)) std::cout << "  [" << to_json(e).dump() << "]\n";
  } else if (cmd == ":remove") {
    if (w.size() != 2) throw Error(Errc::argument, "usage: :remove id");
    s.alter_scene(static_cast<std::int64_t>(number(w[1])), RemoveObject{});
  } else if (cmd == ":place") {
    if (w.size() != 4) throw Error(Errc::argument, "usage: :place id x y");
    s.alter_scene(static_cast<std::int64_t>(number(w[1])), MoveObject{{number(w[2]), number(w[3])}});
  } else if (cmd == ":q") {
    print_explanation(s.query(rest()), "text");
  } else if (cmd == ":r") {
    print_recovery(s.rebuttal(rest()));
  } else if (cmd[0] == ':') {
    throw Error(Errc::argument, "unknown command " + cmd + " (try :help)");
  } else {
    std::string first = w[0];
    for (auto& c : first) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    if (s.phase() == Phase::explained && first != "why") {
      print_recovery(s.rebuttal(line));
    } else {
      print_explanation(s.query(line), "text");
    }
  }
}

int cmd_repl(const std::string& scenario, const Options& o) {
  Session s(load_scenario_file(scenario), make_engine(o));
  std::cout << "scenario " << s.scenario_name() << " (:help for commands)\n";
  std::string line;
  while (true) {
    std::cout << "[" << to_string(s.phase()) << "] > " << std::flush;
    if (!std::getline(std::cin, line)) break;
    if (line == ":quit" || line == ":exit") break;
    try {
      repl_line(s, line);
    } catch (const Error& e) {
      std::cout << "error (" << to_string(e.code()) << "): " << e.what() << "\n";
    }
  }
  std::cout << "\n";
  return kOk;
}

int cmd_classify(const std::string& scenario, const std::string& query, const Options& o) {
  Session s(load_scenario_file(scenario), make_engine(o));
  print_explanation(s.query(query), o.format);
  return kOk;
}

int cmd_dump(const std::string& scenario, const Options& o) {
  auto sc = load_scenario_file(scenario);
  auto g = derive_graph(sc.models);
  if (o.format == "json") {
    std::cout << to_json(g).dump(2) << "\n";
  } else {
    std::cout << dump_blocked(g) << "\n";
  }
  return kOk;
}

std::map<std::string, const Episode*> index(const Dataset& ds) {
  std::map<std::string, const Episode*> out;
  for (const auto& e : ds.episodes) out[e.id] = &e;
  return out;
}

std::atomic<bool> g_interrupted{false};

void on_signal(int) { g_interrupted = true; }

int exit_code(const Error& e) {
  switch (e.code()) {
    case Errc::unparseable:
    case Errc::argument:
    case Errc::syntax:
    case Errc::clarification: return kUsage;
    default: return kRuntime;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"recon: explain and repair mismatches between a robot's world model and the user's view"};
  app.require_subcommand(1);
  Options o;
  auto* g = app.add_option_group("backend");
  g->add_option("--matcher", o.matcher, "object matcher")->check(CLI::IsMember({"det", "llm"}));
  g->add_option("--render", o.render, "explanation wording")->check(CLI::IsMember({"template", "llm"}));
  g->add_flag("--llm-parsing", o.llm_parsing, "parse queries and rebuttals through the LLM");
  g->add_flag("--no-llm", o.no_llm, "force the deterministic backend");
  g->add_flag("--no-glosses", o.no_glosses, "ignore object-database glosses when matching");
  g->add_option("--llm-endpoint", o.llm_endpoint, "OpenAI-compatible endpoint")->envname("RECON_LLM_ENDPOINT");
  g->add_option("--llm-model", o.llm_model, "model identifier")->envname("RECON_LLM_MODEL");
  g->add_option("--llm-cache", o.llm_cache, "directory of cached LLM replies");
  app.add_option("--format", o.format, "output format")->check(CLI::IsMember({"text", "json"}));
  app.add_flag("-v,--verbose", o.verbose, "debug logging");

  std::string scenario, query, dataset, transcripts_path = "transcripts.jsonl", labels_path = "labels.jsonl",
                                        baseline_path, out_path, judge = "scripted", rater = "judge";
  int runs = 3;

  auto* repl = app.add_subcommand("repl", "interactive reconciliation dialogue");
  repl->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);

  auto* classify = app.add_subcommand("classify", "classify one query");
  classify->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);
  classify->add_option("query", query, "question for the robot")->required();

  auto* graph = app.add_subcommand("actiongraph", "action graph tools");
  graph->require_subcommand(1);
  auto* dump = graph->add_subcommand("dump", "print the blocked dictionary");
  dump->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);

  auto* show = app.add_subcommand("scenario", "print a scenario after validation");
  show->add_option("--scenario", scenario, "scenario file")->required()->check(CLI::ExistingFile);

  auto* eval = app.add_subcommand("eval", "evaluation harness");
  eval->require_subcommand(1);
  auto* run = eval->add_subcommand("run", "run every episode and write transcripts");
  run->add_option("--dataset", dataset, "dataset directory")->required()->check(CLI::ExistingDirectory);
  run->add_option("--runs", runs, "runs per episode")->check(CLI::PositiveNumber);
  run->add_option("--out", transcripts_path, "transcript file (JSON lines)");
  auto* judge_cmd = eval->add_subcommand("judge", "label transcripts");
  judge_cmd->add_option("--dataset", dataset, "dataset directory")->required()->check(CLI::ExistingDirectory);
  judge_cmd->add_option("--transcripts", transcripts_path, "transcript file")->check(CLI::ExistingFile);
  judge_cmd->add_option("--labels", labels_path, "label file to append to");
  judge_cmd->add_option("--judge", judge, "judge backend")->check(CLI::IsMember({"scripted", "llm"}));
  judge_cmd->add_option("--rater", rater, "rater name stored with each label");
  auto* rep = eval->add_subcommand("report", "per-unit accuracy and agreement");
  rep->add_option("--transcripts", transcripts_path, "transcript file")->check(CLI::ExistingFile);
  rep->add_option("--labels", labels_path, "label file")->check(CLI::ExistingFile);
  rep->add_option("--baseline", baseline_path, "labels of a baseline run")->check(CLI::ExistingFile);
  rep->add_option("--out", out_path, "write the JSON report here");

  ServiceConfig svc;
  std::string static_dir;
  auto* serve = app.add_subcommand("serve", "HTTP session service");
  serve->add_option("--host", svc.host, "bind address");
  serve->add_option("--port", svc.port, "port (0 picks a free one)");
  serve->add_option("--scenarios", svc.scenario_dir, "scenario directory")->check(CLI::ExistingDirectory);
  serve->add_option("--static", static_dir, "cockpit assets")->check(CLI::ExistingDirectory);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kOk : kUsage;
  }
  spdlog::set_level(o.verbose ? spdlog::level::debug : spdlog::level::warn);
  spdlog::set_default_logger(spdlog::default_logger()->clone("recon"));

  try {
    if (repl->parsed()) return cmd_repl(scenario, o);
    if (classify->parsed()) return cmd_classify(scenario, query, o);
    if (dump->parsed()) return cmd_dump(scenario, o);
    if (show->parsed()) {
      std::cout << to_json(load_scenario_file(scenario)).dump(2) << "\n";
      return kOk;
    }
    if (run->parsed()) {
      auto ds = load_dataset(dataset);
      auto ts = run_episodes(ds, {make_engine(o), runs, true});
      write_transcripts(transcripts_path, ts);
      int failed = 0;
      for (const auto& t : ts) failed += t.error.empty() ? 0 : 1;
      std::cout << "wrote " << ts.size() << " transcripts (" << ds.episodes.size() << " episodes x " << runs
                << " runs, " << failed << " with errors) to " << transcripts_path << "\n";
      return kOk;
    }
    if (judge_cmd->parsed()) {
      auto ds = load_dataset(dataset);
      auto episodes = index(ds);
      JudgeOptions jo;
      jo.backend = judge == "llm" ? JudgeBackend::llm : JudgeBackend::scripted;
      jo.rater = rater;
      if (jo.backend == JudgeBackend::llm) {
        o.render = "llm";  // forces chat construction
        auto cfg = make_engine(o);
        jo.chat = cfg.chat;
        jo.model = cfg.model;
      }
      std::vector<LabelRecord> labels;
      int undecided = 0;
      for (const auto& t : read_transcripts(transcripts_path)) {
        auto it = episodes.find(t.episode);
        if (it == episodes.end()) throw Error(Errc::load, "transcript " + t.key() + " has no episode in the dataset");
        labels.push_back(recon::judge(t, *it->second, jo));
        undecided += labels.back().label ? 0 : 1;
      }
      append_labels(labels_path, labels);
      std::cout << "appended " << labels.size() << " labels by " << rater << " to " << labels_path;
      if (undecided) std::cout << " (" << undecided << " undecided)";
      std::cout << "\n";
      return kOk;
    }
    if (rep->parsed()) {
      auto ts = read_transcripts(transcripts_path);
      auto labels = read_labels(labels_path);
      std::optional<std::vector<LabelRecord>> base;
      if (!baseline_path.empty()) base = read_labels(baseline_path);
      auto r = report(ts, labels, base ? &*base : nullptr);
      if (!out_path.empty()) std::ofstream(out_path) << r.document.dump(2) << "\n";
      std::cout << (o.format == "json" ? r.document.dump(2) + "\n" : r.table);
      return kOk;
    }
    if (serve->parsed()) {
      svc.engine = make_engine(o);
      if (!static_dir.empty()) svc.static_dir = static_dir;
      HttpService http(svc);
      const int port = http.bind();
      std::cout << "listening on http://" << svc.host << ":" << port << std::endl;
      std::signal(SIGINT, on_signal);
      std::signal(SIGTERM, on_signal);
      std::atomic<bool> done{false};
      std::thread watcher([&] {
        while (!done && !g_interrupted) std::this_thread::sleep_for(std::chrono::milliseconds(200));
        if (g_interrupted) {
          http.core().shutdown();
          http.stop_listening();
        }
      });
      http.listen();
      done = true;
      watcher.join();
      return kOk;
    }
  } catch (const UsageError& e) {
    std::cerr << "recon: " << e.what() << "\n";
    return kUsage;
  } catch (const Error& e) {
    std::cerr << "recon: " << to_string(e.code()) << ": " << e.what() << "\n";
    return exit_code(e);
  } catch (const std::exception& e) {
    std::cerr << "recon: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
