#pragma once

// Batch orchestration of the whole evaluation: qualify prompts, gather chat
// responses, extract command scripts, convert to level XML, judge
// stability, render captures, classify letters, and score the competition.
//
// Every stage is resumable: items whose artifact already exists are
// skipped, so re-running a completed stage writes nothing. Artifacts live
// under runs/<run-id>/<team>/<letter>/<trial>.* with score CSVs in
// runs/<run-id>/scores/. A failed trial keeps its failure reason in the run
// manifest and scores worst (st 0, si 1/26).

#include <json.hpp>

#include <algorithm>
#include <array>
#include <atomic>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "dropeval/chat.hpp"
#include "dropeval/extract.hpp"
#include "dropeval/grid.hpp"
#include "dropeval/qualify.hpp"
#include "dropeval/raster.hpp"
#include "dropeval/scoring.hpp"
#include "dropeval/similarity.hpp"
#include "dropeval/stability.hpp"
#include "dropeval/xml_export.hpp"

namespace dropeval {

enum class Stage { Qualify, Gather, Extract, Convert, Stability, Render, Classify, Score };

inline constexpr std::array<Stage, 8> kAllStages = {
    Stage::Qualify, Stage::Gather,    Stage::Extract, Stage::Convert,
    Stage::Stability, Stage::Render, Stage::Classify, Stage::Score};

inline std::string_view to_string(Stage s) {
  switch (s) {
    case Stage::Qualify: return "qualify";
    case Stage::Gather: return "gather";
    case Stage::Extract: return "extract";
    case Stage::Convert: return "convert";
    case Stage::Stability: return "stability";
    case Stage::Render: return "render";
    case Stage::Classify: return "classify";
    case Stage::Score: return "score";
  }
  return "?";
}

inline std::optional<Stage> parse_stage(std::string_view name) {
  for (const Stage s : kAllStages)
    if (to_string(s) == name) return s;
  return std::nullopt;
}

class MissingArtifactError : public std::runtime_error {
 public:
  explicit MissingArtifactError(const std::filesystem::path& path)
      : std::runtime_error("missing artifact: " + path.string()) {}
};

class TrialExhaustedError : public std::runtime_error {
 public:
  TrialExhaustedError(const std::string& item, const std::string& reason)
      : std::runtime_error("trial " + item + " exhausted retries: " + reason) {}
};

struct PipelineOptions {
  std::filesystem::path prompts_dir;
  std::filesystem::path runs_dir = "runs";
  std::string run_id = "run";
  std::string letters{kLetters};  // evaluation set, e.g. "ILU"
  int trials = 10;
  int max_words = kDefaultMaxWords;
  bool strict_convert = false;  // lenient: skip bad drops and keep going
  int parallelism = 1;
  GridConfig grid{};
  XmlExportConfig xml{};

  std::shared_ptr<ChatTransport> chat;            // required for gather
  std::shared_ptr<ClassifierBackend> classifier;  // default: built-in templates
  std::filesystem::path physics_ingest_dir;       // non-empty: external moving sets
  std::filesystem::path frozen_weights_csv;       // non-empty: reference-pool weights
  ChatClientConfig chat_config;
};

struct TeamEntry {
  std::string id;
  std::filesystem::path prompt_file;
  std::string prompt_text;  // line endings normalized to \n
  bool qualified = false;
  int word_count = 0;
  std::vector<std::string> violations;
};

namespace detail {

inline std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingArtifactError(path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  // Normalize CRLF so Windows-authored prompts and responses behave the same.
  std::string out;
  out.reserve(text.size());
  for (std::size_t i = 0; i < text.size(); ++i) {
    if (text[i] == '\r' && i + 1 < text.size() && text[i + 1] == '\n') continue;
    out.push_back(text[i]);
  }
  return out;
}

inline void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

/// Leaves the file untouched when it already holds exactly `text`.
inline void write_text_file_if_changed(const std::filesystem::path& path, std::string_view text) {
  if (std::filesystem::exists(path)) {
    std::ifstream in(path, std::ios::binary);
    const std::string current((std::istreambuf_iterator<char>(in)),
                              std::istreambuf_iterator<char>());
    if (current == text) return;
  }
  write_text_file(path, text);
}

inline std::string timestamp_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
  return buf;
}

}  // namespace detail

/// Persistent record of a run: teams, qualification, per-trial statuses,
/// stage completion. Saved only when something changed.
class RunManifest {
 public:
  RunManifest() { doc_ = nlohmann::json::object(); }

  /// Binds the manifest to its file, loading existing state when present.
  void attach(const std::filesystem::path& path) {
    path_ = path;
    if (std::filesystem::exists(path)) {
      std::ifstream in(path);
      doc_ = nlohmann::json::parse(in);
    }
  }

  void describe_run(const std::string& run_id, const std::string& letters, int trials,
                    const std::string& chat_id, const std::string& classifier_id,
                    const std::string& physics) {
    nlohmann::json meta{{"run_id", run_id},
                        {"letters", letters},
                        {"trials", trials},
                        {"chat", chat_id},
                        {"classifier", classifier_id},
                        {"physics", physics}};
    // Stage-by-stage invocations may omit the chat transport; keep the one
    // recorded by the gather run instead of flapping the manifest.
    if (chat_id == "none" && doc_.contains("run") && doc_["run"].contains("chat"))
      meta["chat"] = doc_["run"]["chat"];
    if (!doc_.contains("run") || doc_["run"] != meta) {
      doc_["run"] = meta;
      dirty_ = true;
    }
  }

  void set_teams(const std::vector<TeamEntry>& teams) {
    nlohmann::json arr = nlohmann::json::array();
    for (const TeamEntry& t : teams) {
      arr.push_back({{"id", t.id},
                     {"prompt_file", t.prompt_file.string()},
                     {"qualified", t.qualified},
                     {"word_count", t.word_count},
                     {"violations", t.violations}});
    }
    if (!doc_.contains("teams") || doc_["teams"] != arr) {
      doc_["teams"] = arr;
      dirty_ = true;
    }
  }

  bool has_teams() const { return doc_.contains("teams"); }

  std::vector<TeamEntry> teams() const {
    std::vector<TeamEntry> out;
    if (!doc_.contains("teams")) return out;
    for (const auto& t : doc_["teams"]) {
      TeamEntry e;
      e.id = t.at("id").get<std::string>();
      e.prompt_file = t.at("prompt_file").get<std::string>();
      e.qualified = t.at("qualified").get<bool>();
      e.word_count = t.at("word_count").get<int>();
      for (const auto& v : t.at("violations")) e.violations.push_back(v.get<std::string>());
      out.push_back(std::move(e));
    }
    return out;
  }

  void set_item_status(const std::string& key, const std::string& status,
                       const std::string& reason = "", int ignored_lines = -1) {
    std::lock_guard<std::mutex> lock(mutex_);
    nlohmann::json entry{{"status", status}};
    if (!reason.empty()) entry["reason"] = reason;
    if (ignored_lines >= 0) entry["ignored_lines"] = ignored_lines;
    if (!doc_["items"].contains(key) || doc_["items"][key] != entry) {
      doc_["items"][key] = entry;
      dirty_ = true;
    }
  }

  std::string item_status(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!doc_.contains("items") || !doc_["items"].contains(key)) return "";
    return doc_["items"][key].value("status", "");
  }

  std::string item_reason(const std::string& key) const {
    std::lock_guard<std::mutex> lock(mutex_);
    if (!doc_.contains("items") || !doc_["items"].contains(key)) return "";
    return doc_["items"][key].value("reason", "");
  }

  void mark_stage_complete(Stage stage) {
    const std::string name(to_string(stage));
    if (!doc_["stages"].contains(name)) {
      doc_["stages"][name] = {{"completed_at", detail::timestamp_now()}};
      dirty_ = true;
    }
  }

  bool stage_complete(Stage stage) const {
    return doc_.contains("stages") && doc_["stages"].contains(std::string(to_string(stage)));
  }

  void save() {
    if (!dirty_ || path_.empty()) return;
    detail::write_text_file(path_, doc_.dump(2) + "\n");
    dirty_ = false;
  }

  const nlohmann::json& json() const { return doc_; }

 private:
  std::filesystem::path path_;
  nlohmann::json doc_;
  bool dirty_ = false;
  mutable std::mutex mutex_;
};

class Pipeline {
 public:
  explicit Pipeline(PipelineOptions options) : options_(std::move(options)) {
    if (options_.trials < 0) throw std::invalid_argument("trials must be >= 0");
    if (options_.letters.empty()) throw std::invalid_argument("letters must not be empty");
    for (const char c : options_.letters)
      if (c < 'A' || c > 'Z') throw std::invalid_argument("letters must be A-Z");
    if (std::set<char>(options_.letters.begin(), options_.letters.end()).size() !=
        options_.letters.size())
      throw std::invalid_argument("letters must not repeat");
    if (!options_.classifier) options_.classifier = std::make_shared<TemplateClassifier>();
    std::filesystem::create_directories(run_dir());
    manifest_.attach(run_dir() / "manifest.json");
    manifest_.describe_run(options_.run_id, options_.letters, options_.trials,
                           options_.chat ? options_.chat->id() : "none",
                           options_.classifier->id(),
                           options_.physics_ingest_dir.empty()
                               ? "builtin"
                               : "ingest:" + options_.physics_ingest_dir.string());
  }

  std::filesystem::path run_dir() const { return options_.runs_dir / options_.run_id; }
  std::filesystem::path scores_dir() const { return run_dir() / "scores"; }

  std::filesystem::path trial_path(const std::string& team, char letter, int trial,
                                   const char* extension) const {
    return run_dir() / team / std::string(1, letter) / (std::to_string(trial) + extension);
  }

  static std::string item_key(const std::string& team, char letter, int trial) {
    return team + "/" + std::string(1, letter) + "/" + std::to_string(trial);
  }

  RunManifest& manifest() { return manifest_; }
  const PipelineOptions& options() const { return options_; }

  /// Executes one stage over all pending items, then persists the manifest.
  void run_stage(Stage stage) {
    switch (stage) {
      case Stage::Qualify: stage_qualify(); break;
      case Stage::Gather: stage_gather(); break;
      case Stage::Extract: stage_extract(); break;
      case Stage::Convert: stage_convert(); break;
      case Stage::Stability: stage_stability(); break;
      case Stage::Render: stage_render(); break;
      case Stage::Classify: stage_classify(); break;
      case Stage::Score: stage_score(); break;
    }
    manifest_.mark_stage_complete(stage);
    manifest_.save();
  }

  /// All stages in order; returns the final scoring result.
  CompetitionResult run_all() {
    for (const Stage stage : kAllStages) run_stage(stage);
    return last_result_;
  }

  const CompetitionResult& last_result() const { return last_result_; }

 private:
  struct Item {
    std::string team;
    char letter;
    int trial;
    std::string key;
  };

  // -- qualify ---------------------------------------------------------

  void stage_qualify() {
    const std::filesystem::path csv = run_dir() / "qualification.csv";
    if (manifest_.has_teams() && std::filesystem::exists(csv)) return;

    std::vector<TeamEntry> teams;
    if (!std::filesystem::is_directory(options_.prompts_dir))
      throw MissingArtifactError(options_.prompts_dir);
    std::vector<std::filesystem::path> files;
    for (const auto& entry : std::filesystem::directory_iterator(options_.prompts_dir))
      if (entry.is_regular_file() && entry.path().extension() == ".txt")
        files.push_back(entry.path());
    std::sort(files.begin(), files.end());

    for (const std::filesystem::path& file : files) {
      TeamEntry team;
      team.id = file.stem().string();
      team.prompt_file = file;
      team.prompt_text = detail::read_text_file(file);
      const QualificationReport report = qualify(team.prompt_text, options_.max_words);
      team.qualified = report.qualified;
      team.word_count = count_words(team.prompt_text);
      for (const Violation& v : report.violations) team.violations.push_back(describe(v));
      teams.push_back(std::move(team));
    }

    std::string out = "team,qualified,word_count,violations\n";
    for (const TeamEntry& t : teams) {
      std::string joined;
      for (const std::string& v : t.violations) {
        if (!joined.empty()) joined += "; ";
        joined += v;
      }
      out += t.id + "," + (t.qualified ? "yes" : "no") + "," + std::to_string(t.word_count) +
             "," + joined + "\n";
    }
    detail::write_text_file(csv, out);
    manifest_.set_teams(teams);
  }

  // -- shared helpers --------------------------------------------------

  std::vector<TeamEntry> qualified_teams() {
    if (!manifest_.has_teams())
      throw MissingArtifactError(run_dir() / "qualification.csv");
    std::vector<TeamEntry> teams;
    for (TeamEntry& t : manifest_.teams()) {
      if (!t.qualified) continue;
      t.prompt_text = detail::read_text_file(t.prompt_file);
      teams.push_back(std::move(t));
    }
    return teams;
  }

  std::vector<Item> all_items(const std::vector<TeamEntry>& teams) const {
    std::vector<Item> items;
    for (const TeamEntry& t : teams)
      for (const char letter : options_.letters)
        for (int i = 0; i < options_.trials; ++i)
          items.push_back(Item{t.id, letter, i, item_key(t.id, letter, i)});
    return items;
  }

  template <typename Fn>
  void for_each_item(const std::vector<Item>& items, Fn&& fn) {
    const int workers = std::max(1, options_.parallelism);
    if (workers == 1 || items.size() <= 1) {
      for (const Item& item : items) fn(item);
      return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    std::mutex error_mutex;
    std::exception_ptr first_error;
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          const std::size_t i = next.fetch_add(1);
          if (i >= items.size()) return;
          try {
            fn(items[i]);
          } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
          }
        }
      });
    }
    for (std::thread& t : pool) t.join();
    if (first_error) std::rethrow_exception(first_error);
  }

  bool item_failed(const std::string& key) const {
    return manifest_.item_status(key) == "failed";
  }

  // Layout reconstruction shared by convert, stability, and render.
  LevelLayout layout_for(const Item& item) {
    const auto commands_path = trial_path(item.team, item.letter, item.trial, ".commands");
    if (!std::filesystem::exists(commands_path)) throw MissingArtifactError(commands_path);
    const CommandScript script = parse_drop_commands(detail::read_text_file(commands_path));
    return build_level(options_.grid, script.commands, /*strict=*/false);
  }

  // -- gather ----------------------------------------------------------

  void stage_gather() {
    const std::vector<TeamEntry> teams = qualified_teams();
    if (options_.trials > 0 && !options_.chat)
      throw TransportError("no chat transport configured for gather");

    std::map<std::string, std::string> prompts;
    for (const TeamEntry& t : teams) prompts[t.id] = t.prompt_text;

    for_each_item(all_items(teams), [&](const Item& item) {
      const auto response_path = trial_path(item.team, item.letter, item.trial, ".md");
      if (std::filesystem::exists(response_path)) return;

      // Every trial is a fresh single-turn conversation.
      const std::string message = substitute_object(prompts.at(item.team), item.letter);
      const ChatRequest request{options_.chat_config.model, options_.chat_config.temperature,
                                message};
      std::string last_reason;
      std::string response;
      bool have_response = false;
      const int attempts = 1 + std::max(0, options_.chat_config.max_retries);
      for (int attempt = 0; attempt < attempts; ++attempt) {
        try {
          response = options_.chat->complete(request);
          have_response = true;
          // Re-request when extraction (or strict conversion) fails.
          const CommandScript script = extract_commands(response);
          build_level(options_.grid, script.commands, options_.strict_convert);
          detail::write_text_file(response_path, response);
          manifest_.set_item_status(item.key,
                                    attempt == 0 ? "ok" : "retried " + std::to_string(attempt));
          return;
        } catch (const std::exception& e) {
          last_reason = e.what();
        }
      }
      if (have_response) detail::write_text_file(response_path, response);
      manifest_.set_item_status(item.key, "failed",
                                TrialExhaustedError(item.key, last_reason).what());
    });
  }

  // -- extract ---------------------------------------------------------

  void stage_extract() {
    const std::vector<TeamEntry> teams = qualified_teams();
    for_each_item(all_items(teams), [&](const Item& item) {
      const auto commands_path = trial_path(item.team, item.letter, item.trial, ".commands");
      if (std::filesystem::exists(commands_path)) return;
      if (item_failed(item.key)) return;

      const auto response_path = trial_path(item.team, item.letter, item.trial, ".md");
      if (!std::filesystem::exists(response_path)) throw MissingArtifactError(response_path);
      try {
        const CommandScript script = extract_commands(detail::read_text_file(response_path));
        detail::write_text_file(commands_path, format_commands(script.commands));
        manifest_.set_item_status(item.key, "ok", "", script.ignored_lines);
      } catch (const std::exception& e) {
        manifest_.set_item_status(item.key, "failed", std::string("extract: ") + e.what());
      }
    });
  }

  // -- convert ---------------------------------------------------------

  void stage_convert() {
    const std::vector<TeamEntry> teams = qualified_teams();
    for_each_item(all_items(teams), [&](const Item& item) {
      const auto xml_path = trial_path(item.team, item.letter, item.trial, ".xml");
      if (std::filesystem::exists(xml_path)) return;
      if (item_failed(item.key)) return;

      try {
        const auto commands_path = trial_path(item.team, item.letter, item.trial, ".commands");
        if (!std::filesystem::exists(commands_path)) throw MissingArtifactError(commands_path);
        const CommandScript script = parse_drop_commands(detail::read_text_file(commands_path));
        const LevelLayout layout =
            build_level(options_.grid, script.commands, options_.strict_convert);
        detail::write_text_file(xml_path, export_xml(layout, options_.xml));
      } catch (const MissingArtifactError&) {
        throw;
      } catch (const std::exception& e) {
        manifest_.set_item_status(item.key, "failed", std::string("convert: ") + e.what());
      }
    });
  }

  // -- stability -------------------------------------------------------

  void stage_stability() {
    const std::vector<TeamEntry> teams = qualified_teams();
    for_each_item(all_items(teams), [&](const Item& item) {
      const auto moving_path = trial_path(item.team, item.letter, item.trial, ".moving.txt");
      if (std::filesystem::exists(moving_path)) return;
      if (item_failed(item.key)) return;

      const LevelLayout layout = layout_for(item);
      std::vector<int> moving;
      if (options_.physics_ingest_dir.empty()) {
        moving = compute_moving_set(layout);
      } else {
        // External physics evaluator output overrides the internal analysis.
        const auto ingest = options_.physics_ingest_dir / item.team /
                            std::string(1, item.letter) /
                            (std::to_string(item.trial) + ".moving.txt");
        if (!std::filesystem::exists(ingest)) throw MissingArtifactError(ingest);
        moving = read_moving_file(ingest, static_cast<int>(layout.blocks().size()));
      }
      std::string out;
      for (const int id : moving) out += std::to_string(id) + "\n";
      detail::write_text_file(moving_path, out);
    });
  }

  static std::vector<int> read_moving_file(const std::filesystem::path& path, int total_blocks) {
    std::set<int> ids;
    std::istringstream in(detail::read_text_file(path));
    std::string line;
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      int id = -1;
      try {
        id = std::stoi(line);
      } catch (const std::exception&) {
        throw std::runtime_error("malformed moving block id '" + line + "' in " + path.string());
      }
      if (id < 0 || id >= total_blocks)
        throw std::runtime_error("moving block id out of range in " + path.string());
      ids.insert(id);
    }
    return {ids.begin(), ids.end()};
  }

  // -- render ----------------------------------------------------------

  void stage_render() {
    const std::vector<TeamEntry> teams = qualified_teams();
    for_each_item(all_items(teams), [&](const Item& item) {
      const auto png_path = trial_path(item.team, item.letter, item.trial, ".png");
      if (std::filesystem::exists(png_path)) return;
      if (item_failed(item.key)) return;

      const auto moving_path = trial_path(item.team, item.letter, item.trial, ".moving.txt");
      if (!std::filesystem::exists(moving_path)) throw MissingArtifactError(moving_path);
      const LevelLayout layout = layout_for(item);
      const std::vector<int> moving =
          read_moving_file(moving_path, static_cast<int>(layout.blocks().size()));
      std::filesystem::create_directories(png_path.parent_path());
      write_image(render(layout, moving), png_path);
    });
  }

  // -- classify --------------------------------------------------------

  void stage_classify() {
    const std::vector<TeamEntry> teams = qualified_teams();
    for_each_item(all_items(teams), [&](const Item& item) {
      const auto sim_path = trial_path(item.team, item.letter, item.trial, ".similarity.csv");
      if (std::filesystem::exists(sim_path)) return;
      if (item_failed(item.key)) return;

      const auto png_path = trial_path(item.team, item.letter, item.trial, ".png");
      if (!std::filesystem::exists(png_path)) throw MissingArtifactError(png_path);
      const SimilarityResult result = classify(read_image(png_path), *options_.classifier);
      std::string out = "letter,prob\n";
      for (int i = 0; i < kLetterCount; ++i)
        out += std::string(1, kLetters[i]) + "," + csv::format_double(result.probs[i]) + "\n";
      detail::write_text_file(sim_path, out);
    });
  }

  static std::array<double, kLetterCount> read_similarity_file(const std::filesystem::path& path) {
    std::array<double, kLetterCount> probs{};
    std::istringstream in(detail::read_text_file(path));
    std::string line;
    std::getline(in, line);  // header
    while (std::getline(in, line)) {
      if (line.size() < 3) continue;
      probs[letter_index(line[0])] = std::stod(line.substr(2));
    }
    return probs;
  }

  // -- score -----------------------------------------------------------

  void stage_score() {
    const std::vector<TeamEntry> teams = qualified_teams();
    std::filesystem::create_directories(scores_dir());

    std::vector<TrialRecord> records;
    for (const TeamEntry& team : teams) {
      for (const char letter : options_.letters) {
        for (int i = 0; i < options_.trials; ++i) {
          const Item item{team.id, letter, i, item_key(team.id, letter, i)};
          TrialRecord record;
          record.prompt_id = team.id;
          record.letter = letter;
          record.trial = i;
          if (item_failed(item.key)) {
            // Unusable trial scores worst: empty level, uniform similarity.
            record.st = 0.0;
            record.si = 1.0 / kLetterCount;
          } else {
            const LevelLayout layout = layout_for(item);
            const auto moving_path = trial_path(team.id, letter, i, ".moving.txt");
            if (!std::filesystem::exists(moving_path)) throw MissingArtifactError(moving_path);
            const StabilityReport stability = stability_score(
                layout, read_moving_file(moving_path, static_cast<int>(layout.blocks().size())));
            const auto sim_path = trial_path(team.id, letter, i, ".similarity.csv");
            if (!std::filesystem::exists(sim_path)) throw MissingArtifactError(sim_path);
            record.st = stability.st;
            record.si = read_similarity_file(sim_path)[letter_index(letter)];
          }
          records.push_back(std::move(record));
        }
      }
    }

    detail::write_text_file_if_changed(scores_dir() / "records.csv", records_csv(records));

    if (teams.empty() || options_.trials == 0) {
      detail::write_text_file_if_changed(scores_dir() / "summary.md",
                                         "# Evaluation summary\n\nNothing to score.\n");
      last_result_ = CompetitionResult{};
      return;
    }

    CompetitionConfig cfg;
    cfg.trials = options_.trials;
    for (const char c : options_.letters) cfg.characters.push_back(c);
    for (const TeamEntry& t : teams) cfg.prompts.push_back(t.id);

    if (options_.frozen_weights_csv.empty()) {
      last_result_ = score_competition(records, cfg);
    } else {
      const auto frozen = align_weights(read_weights_csv(options_.frozen_weights_csv), cfg);
      last_result_ = aggregate(records, frozen, cfg);
    }
    detail::write_text_file_if_changed(scores_dir() / "weights.csv",
                                       weights_csv(last_result_.weights));
    detail::write_text_file_if_changed(scores_dir() / "characters.csv",
                                       characters_csv(last_result_.characters));

    std::map<std::string, int> word_counts;
    for (const TeamEntry& t : teams) word_counts[t.id] = t.word_count;
    const std::vector<Standing> standings = rank(last_result_, word_counts);
    detail::write_text_file_if_changed(scores_dir() / "standings.csv", standings_csv(standings));
    detail::write_text_file_if_changed(scores_dir() / "summary.md", summary_markdown(standings));
  }

  static std::string fixed(double v, const char* format) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), format, v);
    return buf;
  }

  std::string summary_markdown(const std::vector<Standing>& standings) {
    std::string out = "# Evaluation summary\n\n";
    out += "## Standings\n\n";
    out += "| rank | prompt | norm score | words |\n";
    out += "|-----:|--------|-----------:|------:|\n";
    for (const Standing& s : standings) {
      out += "| " + std::to_string(s.rank) + " | " + s.prompt_id + " | " +
             fixed(s.norm_prompt, "%.2f") + " | " + std::to_string(s.word_count) + " |\n";
    }
    out += "\n## Character weights\n\n";
    out += "| letter | w_st | w_si | weight |\n";
    out += "|-------:|-----:|-----:|-------:|\n";
    for (const CharacterWeight& w : last_result_.weights) {
      out += std::string("| ") + w.letter + " | " + fixed(w.w_st, "%.3f") + " | " +
             fixed(w.w_si, "%.3f") + " | " + fixed(w.weight, "%.3f") + " |\n";
    }
    out += "\n## Disqualified prompts\n\n";
    bool any = false;
    for (const TeamEntry& t : manifest_.teams()) {
      if (t.qualified) continue;
      any = true;
      out += "- " + t.id + ": ";
      for (std::size_t i = 0; i < t.violations.size(); ++i) {
        if (i) out += "; ";
        out += t.violations[i];
      }
      out += "\n";
    }
    if (!any) out += "none\n";
    return out;
  }

  PipelineOptions options_;
  RunManifest manifest_;
  CompetitionResult last_result_;
};

}  // namespace dropeval
