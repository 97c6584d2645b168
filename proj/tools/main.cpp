// Command-line front end for the evaluation pipeline.
//
// One subcommand per stage (qualify, gather, extract, convert, stability,
// render, classify, score) plus `all`. Artifacts land under
// <runs-dir>/<run-id>/; see README.md for the directory layout.

#include <CLI11.hpp>

#include <cstdio>
#include <cstdlib>
#include <memory>
#include <string>

#include "dropeval/http_backends.hpp"
#include "dropeval/pipeline.hpp"

namespace {

std::string expand_letters(const std::string& letters) {
  if (letters == "A-Z" || letters == "all") return std::string(dropeval::kLetters);
  return letters;
}

std::shared_ptr<dropeval::ClassifierBackend> make_classifier(const std::string& spec,
                                                             const std::string& templates_dir,
                                                             double temperature) {
  using namespace dropeval;
  if (spec == "builtin" || spec.empty()) {
    TemplateSet templates =
        templates_dir.empty() ? TemplateSet::builtin() : TemplateSet::load_dir(templates_dir);
    return std::make_shared<TemplateClassifier>(std::move(templates), temperature);
  }
  std::string url;
  if (spec.rfind("external:", 0) == 0) {
    url = spec.substr(9);
  } else if (spec == "external") {
    if (const char* env = std::getenv(HttpClassifier::kEndpointEnv)) url = env;
  } else {
    url = spec;  // bare URL
  }
  if (url.empty())
    throw CLI::ValidationError("--classifier",
                               "external classifier needs a URL (flag or " +
                                   std::string(HttpClassifier::kEndpointEnv) + ")");
  return std::make_shared<HttpClassifier>(url);
}

std::shared_ptr<dropeval::ChatTransport> make_chat(const std::string& spec,
                                                   const std::string& mock_rules,
                                                   const dropeval::ChatClientConfig& config) {
  using namespace dropeval;
  if (spec == "none") return nullptr;
  if (spec == "mock") {
    if (!mock_rules.empty()) {
      return std::make_shared<MockChatTransport>(MockChatTransport::load_rules(mock_rules));
    }
    // Deterministic placeholder program for dry runs without rules.
    return std::make_shared<MockChatTransport>(
        std::vector<MockChatTransport::Rule>{},
        "```\nab_drop(b31, 9)\nab_drop(b13, 9)\n```\n");
  }
  if (spec == "http") {
    if (config.endpoint.empty())
      throw CLI::ValidationError("--endpoint", "http chat transport needs --endpoint");
    return std::make_shared<HttpChatTransport>(config);
  }
  throw CLI::ValidationError("--chat", "expected mock, http, or none");
}

}  // namespace

int main(int argc, char** argv) {
  using namespace dropeval;

  CLI::App app{"Evaluation pipeline for ab_drop() level-generation prompts"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string prompts_dir;
  std::string runs_dir = "runs";
  std::string run_id = "run";
  std::string letters = "A-Z";
  int trials = 10;
  bool strict = false;
  int parallelism = 1;
  std::string classifier_spec = "builtin";
  std::string physics_spec = "builtin";
  std::string templates_dir;
  double tau = kDefaultTemperature;

  std::string chat_spec = "none";
  std::string mock_rules;
  ChatClientConfig chat_config;

  std::string records_file;
  std::string score_out_dir = ".";
  std::string freeze_weights;

  app.add_option("--prompts", prompts_dir, "Directory of <team>.txt prompt files");
  app.add_option("--runs-dir", runs_dir, "Base directory for run artifacts")
      ->capture_default_str();
  app.add_option("--run-id", run_id, "Run identifier")->capture_default_str();
  app.add_option("--letters", letters, "Target letters, e.g. ILU (default all of A-Z)")
      ->capture_default_str();
  app.add_option("--trials", trials, "Trials per letter")->capture_default_str();
  app.add_flag("--strict", strict, "Abort a trial on the first invalid drop command");
  app.add_option("--parallelism", parallelism, "Concurrent trials per stage")
      ->capture_default_str();
  app.add_option("--classifier", classifier_spec,
                 "builtin, external:<url>, or external (uses $DROPEVAL_CLASSIFIER_URL)")
      ->capture_default_str();
  app.add_option("--physics", physics_spec,
                 "builtin, or ingest:<dir> of external moving-set files")
      ->capture_default_str();
  app.add_option("--templates", templates_dir,
                 "Directory of A.png..Z.png classifier templates (default: built-in glyphs)");
  app.add_option("--tau", tau, "Softmax temperature of the built-in classifier")
      ->capture_default_str();

  XmlExportConfig xml;
  app.add_option("--xml-cell", xml.cell_size, "World units per grid cell in exported XML")
      ->capture_default_str();
  app.add_option("--xml-ground", xml.ground_y, "World y of the grid floor in exported XML")
      ->capture_default_str();
  app.add_option("--xml-square", xml.square_type, "Block type name for b11")
      ->capture_default_str();
  app.add_option("--xml-rect", xml.rect_type, "Block type name for b13/b31")
      ->capture_default_str();
  app.add_option("--xml-material", xml.material, "Block material attribute")
      ->capture_default_str();

  app.add_option("--chat", chat_spec, "Chat transport: mock, http, or none")
      ->capture_default_str();
  app.add_option("--mock-rules", mock_rules, "JSON rules file for the mock transport");
  app.add_option("--endpoint", chat_config.endpoint, "Chat completion endpoint URL");
  app.add_option("--model", chat_config.model, "Model name")->capture_default_str();
  app.add_option("--temperature", chat_config.temperature, "Sampling temperature")
      ->capture_default_str();
  app.add_option("--timeout", chat_config.timeout_seconds, "Request timeout in seconds")
      ->capture_default_str();
  app.add_option("--retries", chat_config.max_retries, "Retries per trial")
      ->capture_default_str();

  CLI::App* score_cmd = nullptr;
  std::vector<std::pair<CLI::App*, Stage>> stage_commands;
  for (const Stage stage : kAllStages) {
    CLI::App* cmd = app.add_subcommand(std::string(to_string(stage)),
                                       "Run the " + std::string(to_string(stage)) + " stage");
    stage_commands.emplace_back(cmd, stage);
    if (stage == Stage::Score) score_cmd = cmd;
  }
  CLI::App* all_cmd = app.add_subcommand("all", "Run every stage in order");
  score_cmd->add_option("--records", records_file,
                        "Score a standalone records CSV instead of a run directory");
  score_cmd->add_option("--out", score_out_dir, "Output directory for standalone scoring")
      ->capture_default_str();
  score_cmd->add_option("--freeze-weights", freeze_weights,
                        "Weights CSV from a reference pool, used instead of deriving "
                        "weights from the scored records");

  CLI11_PARSE(app, argc, argv);

  try {
    // Standalone scoring from a records CSV needs no run directory.
    if (score_cmd->parsed() && !records_file.empty()) {
      const auto records = read_records_csv(records_file);
      CompetitionConfig cfg;
      std::set<std::string> prompt_ids;
      std::set<char> chars;
      for (const TrialRecord& r : records) {
        prompt_ids.insert(r.prompt_id);
        chars.insert(r.letter);
        cfg.trials = std::max(cfg.trials, r.trial + 1);
      }
      cfg.prompts.assign(prompt_ids.begin(), prompt_ids.end());
      cfg.characters.assign(chars.begin(), chars.end());
      const CompetitionResult result =
          freeze_weights.empty()
              ? score_competition(records, cfg)
              : aggregate(records, align_weights(read_weights_csv(freeze_weights), cfg), cfg);
      const std::filesystem::path out(score_out_dir);
      std::filesystem::create_directories(out);
      write_weights_csv(out / "weights.csv", result.weights);
      write_characters_csv(out / "characters.csv", result.characters);
      const auto standings = rank(result, {});
      write_standings_csv(out / "standings.csv", standings);
      for (const Standing& s : standings)
        std::printf("%d. %s  norm=%.2f\n", s.rank, s.prompt_id.c_str(), s.norm_prompt);
      return 0;
    }

    PipelineOptions options;
    options.prompts_dir = prompts_dir;
    options.runs_dir = runs_dir;
    options.run_id = run_id;
    options.letters = expand_letters(letters);
    options.trials = trials;
    options.strict_convert = strict;
    options.parallelism = parallelism;
    options.xml = xml;
    options.chat_config = chat_config;
    options.chat = make_chat(chat_spec, mock_rules, chat_config);
    options.classifier = make_classifier(classifier_spec, templates_dir, tau);
    if (physics_spec.rfind("ingest:", 0) == 0)
      options.physics_ingest_dir = physics_spec.substr(7);
    else if (physics_spec != "builtin")
      throw CLI::ValidationError("--physics", "expected builtin or ingest:<dir>");
    options.frozen_weights_csv = freeze_weights;

    Pipeline pipeline(options);
    if (all_cmd->parsed()) {
      pipeline.run_all();
      std::printf("run complete; scores in %s\n", pipeline.scores_dir().string().c_str());
      for (const auto& entry : pipeline.manifest().teams())
        if (!entry.qualified)
          std::printf("disqualified: %s (%zu violation(s))\n", entry.id.c_str(),
                      entry.violations.size());
      return 0;
    }
    for (const auto& [cmd, stage] : stage_commands) {
      if (cmd->parsed()) {
        pipeline.run_stage(stage);
        std::printf("%s stage complete\n", std::string(to_string(stage)).c_str());
        return 0;
      }
    }
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
