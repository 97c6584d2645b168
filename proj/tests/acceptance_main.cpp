// Acceptance runner: one pass/fail line per criterion, nonzero exit when
// anything fails. Runs fully offline against the mock chat transport.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include "dropeval/extract.hpp"
#include "dropeval/grid.hpp"
#include "dropeval/pipeline.hpp"
#include "dropeval/qualify.hpp"
#include "dropeval/raster.hpp"
#include "dropeval/scoring.hpp"
#include "dropeval/similarity.hpp"
#include "dropeval/stability.hpp"
#include "dropeval/xml_export.hpp"
#include "stability_oracle.hpp"

using namespace dropeval;
namespace fs = std::filesystem;

namespace {

struct CheckFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

void expect(bool condition, const std::string& message) {
  if (!condition) throw CheckFailure(message);
}

void expect_near(double actual, double wanted, double tolerance, const std::string& what) {
  if (std::abs(actual - wanted) > tolerance) {
    std::ostringstream os;
    os << what << ": got " << actual << ", wanted " << wanted << " +/- " << tolerance;
    throw CheckFailure(os.str());
  }
}

// ---------------------------------------------------------------- 1
void drop_semantics() {
  const LevelLayout layout = drop_block(LevelLayout({20, 16}), {BlockType::b31, 4});
  expect(layout.blocks().size() == 1, "one block placed");
  for (const int x : {3, 4, 5})
    expect(layout.block_at(x, 0) == 0, "cell (" + std::to_string(x) + ",0) occupied");
  int covered = 0;
  for (const auto c : occupancy(layout)) covered += c;
  expect(covered == 3, "exactly three cells occupied");
}

// ---------------------------------------------------------------- 2
struct VariantRow {
  const char* id;
  double st[3];
  double si[3];
};

constexpr VariantRow kExperiment[] = {
    {"v1", {1.00, 0.84, 0.90}, {0.18, 0.53, 0.22}},
    {"v2", {0.96, 0.80, 1.00}, {0.22, 0.24, 0.02}},
    {"v3", {0.97, 0.75, 0.94}, {0.03, 0.65, 0.01}},
    {"v4", {1.00, 0.93, 1.00}, {0.17, 0.60, 0.03}},
    {"v5", {0.96, 0.90, 1.00}, {0.28, 0.43, 0.01}},
};

std::vector<TrialRecord> experiment_records() {
  std::vector<TrialRecord> records;
  const char letters[3] = {'I', 'L', 'U'};
  for (const VariantRow& row : kExperiment)
    for (int j = 0; j < 3; ++j)
      records.push_back(TrialRecord{row.id, letters[j], 0, row.st[j], row.si[j]});
  return records;
}

CompetitionConfig experiment_config() {
  CompetitionConfig cfg;
  cfg.trials = 1;
  cfg.characters = {'I', 'L', 'U'};
  cfg.prompts = {"v1", "v2", "v3", "v4", "v5"};
  return cfg;
}

void weight_reproduction() {
  const auto weights = char_weights(experiment_records(), experiment_config());
  expect(weights.size() == 3, "three characters weighted");
  for (const CharacterWeight& w : weights)
    expect(std::round(w.w_st * 1000.0) / 1000.0 == 0.333, "w_st rounds to 0.333");

  const double wanted_w_si[3] = {0.823, 0.510, 0.944};
  const double wanted_weight[3] = {0.274, 0.170, 0.315};
  for (int j = 0; j < 3; ++j) {
    expect_near(weights[j].w_si, wanted_w_si[j], 0.005,
                std::string("w_si for ") + weights[j].letter);
    expect_near(weights[j].weight, wanted_weight[j], 0.005,
                std::string("weight for ") + weights[j].letter);
  }
}

// ---------------------------------------------------------------- 3
void normalization_property() {
  std::mt19937 rng(20230707);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> small(1, 5);
  for (int round = 0; round < 1000; ++round) {
    CompetitionConfig cfg;
    cfg.trials = small(rng);
    const int c = small(rng);
    for (int j = 0; j < c; ++j) cfg.characters.push_back(static_cast<char>('A' + j));
    const int p = small(rng);
    for (int k = 0; k < p; ++k) cfg.prompts.push_back("p" + std::to_string(k));
    std::vector<TrialRecord> records;
    for (const std::string& pid : cfg.prompts)
      for (const char letter : cfg.characters)
        for (int i = 0; i < cfg.trials; ++i)
          records.push_back({pid, letter, i, 0.01 + 0.99 * unit(rng), 0.01 + 0.99 * unit(rng)});
    const CompetitionResult result = score_competition(records, cfg);
    expect(!result.zero_competition, "nonzero pool");
    double sum = 0.0;
    for (const PromptScore& ps : result.prompts) sum += ps.norm_prompt;
    expect_near(sum, 100.0, 1e-6, "norm scores sum");
  }

  const double published[] = {30.40, 13.26, 13.36, 23.08, 19.90};
  double sum = 0.0;
  for (const double v : published) sum += v;
  expect_near(sum, 100.0, 1e-9, "published norm scores sum");
}

// ---------------------------------------------------------------- 4
void ranking_reproduction() {
  CompetitionResult result;
  const char* ids[] = {"v1", "v2", "v3", "v4", "v5"};
  const double norms[] = {30.40, 13.26, 13.36, 23.08, 19.90};
  for (int k = 0; k < 5; ++k) {
    PromptScore ps;
    ps.prompt_id = ids[k];
    ps.norm_prompt = norms[k];
    result.prompts.push_back(ps);
  }
  const auto standings = rank(result, {});
  const char* wanted[] = {"v1", "v4", "v5", "v3", "v2"};
  for (int k = 0; k < 5; ++k)
    expect(standings[k].prompt_id == wanted[k],
           "rank " + std::to_string(k + 1) + " is " + wanted[k] + " (got " +
               standings[k].prompt_id + ")");
}

// ---------------------------------------------------------------- 5
void stability_oracle_equivalence() {
  const GridConfig cfg{6, 6};
  std::vector<DropCommand> commands;
  for (const BlockType type : {BlockType::b11, BlockType::b13, BlockType::b31}) {
    const int half = footprint(type).width / 2;
    for (int x = half; x < cfg.width - half; ++x) commands.push_back({type, x});
  }
  expect(commands.size() == 16, "command alphabet size");

  std::unordered_set<std::string> seen;
  long layouts = 0, mismatches = 0;
  std::string first_mismatch;

  std::function<void(LevelLayout&, int)> recurse = [&](LevelLayout& layout, int depth) {
    std::string key;
    for (const PlacedBlock& b : layout.blocks())
      key += std::to_string(static_cast<int>(b.type)) + ":" + std::to_string(b.x) + ":" +
             std::to_string(b.y) + ";";
    if (seen.insert(key).second && !layout.blocks().empty()) {
      ++layouts;
      const auto fast = compute_moving_set(layout);
      const auto slow = oracle::moving_set(layout);
      if (fast != slow) {
        ++mismatches;
        if (first_mismatch.empty()) first_mismatch = key;
      }
    }
    if (depth == 4) return;
    for (const DropCommand& cmd : commands) {
      LevelLayout next = layout;
      if (next.try_drop(cmd)) continue;  // out of bounds / overflow: skip
      recurse(next, depth + 1);
    }
  };
  LevelLayout empty(cfg);
  recurse(empty, 0);

  expect(layouts > 10000, "enumerated a substantial layout corpus");
  expect(mismatches == 0, "oracle mismatches on " + std::to_string(mismatches) + " of " +
                              std::to_string(layouts) + " layouts; first: " + first_mismatch);
}

// ---------------------------------------------------------------- 6
void stability_formula() {
  std::mt19937 rng(31337);
  std::uniform_int_distribution<int> x_dist(0, 19);
  std::uniform_int_distribution<int> type_dist(0, 2);
  std::uniform_int_distribution<int> len_dist(0, 30);
  for (int round = 0; round < 200; ++round) {
    std::vector<DropCommand> cmds;
    const int n = len_dist(rng);
    for (int i = 0; i < n; ++i)
      cmds.push_back({static_cast<BlockType>(type_dist(rng)), x_dist(rng)});
    const LevelLayout layout = build_level(GridConfig{20, 16}, cmds);
    const StabilityReport report = stability_score(layout);
    const int total = static_cast<int>(layout.blocks().size());
    expect(report.total_blocks == total, "total recount");
    const double recount =
        total == 0 ? 0.0 : static_cast<double>(total - static_cast<int>(report.moving.size())) / total;
    expect(report.st == recount, "st equals direct recount");
    expect(report.st >= 0.0 && report.st <= 1.0, "st in [0,1]");
  }
}

// ---------------------------------------------------------------- 7
void classifier_self_recognition() {
  TemplateClassifier backend;
  int hits = 0;
  for (int i = 0; i < kLetterCount; ++i) {
    const char letter = kLetters[i];
    std::vector<PlacedBlock> blocks;
    int id = 0;
    const auto& rows = kGlyphStrokes[i];
    for (int r = 0; r < kGlyphRows; ++r)
      for (int c = 0; c < kGlyphCols; ++c)
        if (rows[r][c] == '#')
          blocks.push_back(PlacedBlock{id++, BlockType::b11, 2 + c, kGlyphRows - 1 - r});
    const LevelLayout layout = LevelLayout::from_blocks(GridConfig{20, 16}, blocks);
    const SimilarityResult result = classify(render(layout), backend);
    if (result.argmax() == letter) ++hits;
  }
  expect(hits == 26, "self-recognition " + std::to_string(hits) + "/26");
}

// ---------------------------------------------------------------- 8
void raster_contract() {
  std::mt19937 rng(777);
  std::uniform_int_distribution<int> x_dist(0, 19);
  std::uniform_int_distribution<int> type_dist(0, 2);
  std::uniform_int_distribution<int> len_dist(0, 24);
  for (int round = 0; round < 100; ++round) {
    std::vector<DropCommand> cmds;
    const int n = len_dist(rng);
    for (int i = 0; i < n; ++i)
      cmds.push_back({static_cast<BlockType>(type_dist(rng)), x_dist(rng)});
    const LevelLayout layout = build_level(GridConfig{20, 16}, cmds);
    const RasterImage img = render(layout);

    for (int i = 0; i < RasterImage::kSize; ++i) {
      for (int m = 0; m < RasterImage::kMargin; ++m) {
        expect(img.at(i, m) == 255 && img.at(i, RasterImage::kSize - 1 - m) == 255 &&
                   img.at(m, i) == 255 && img.at(RasterImage::kSize - 1 - m, i) == 255,
               "margin bands pure white");
      }
    }
    for (const std::uint8_t p : img.pixels)
      expect(p == 0 || p == 255, "pixels bilevel");

    const double s = raster_scale(layout.config());
    double area_cells = 0.0, perimeter_cells = 0.0;
    for (const PlacedBlock& b : layout.blocks()) {
      const Footprint fp = b.extent();
      area_cells += fp.width * fp.height;
      perimeter_cells += 2.0 * (fp.width + fp.height);
    }
    const double diff = std::abs(static_cast<double>(img.black_count()) - s * s * area_cells);
    expect(diff <= 2.0 * perimeter_cells * s,
           "black pixel count within rounding band (diff " + std::to_string(diff) + ")");
  }
}

// ---------------------------------------------------------------- 9
void extraction_corpus() {
  const auto cmds = [](std::string_view code) { return parse_drop_commands(code).commands; };
  using BT = BlockType;

  // 1-3: fence selection worked examples.
  expect(extract_last_code_fence("text ```a()``` more ```b()```") == "b()", "case 1");
  try {
    extract_last_code_fence("no fences at all");
    throw CheckFailure("case 2: NoCodeFence expected");
  } catch (const NoCodeFenceError&) {}
  expect(extract_last_code_fence("```python\nab_drop(b11,3)\n```") == "ab_drop(b11,3)\n",
         "case 3");
  // 4: plain command list.
  expect(cmds("ab_drop(b31, 4)\nab_drop(b11, 4)") ==
             std::vector<DropCommand>{{BT::b31, 4}, {BT::b11, 4}},
         "case 4");
  // 5: loops are never expanded.
  try {
    cmds("for i in range(3):\n  ab_drop(b11, i)");
    throw CheckFailure("case 5: EmptyScript expected");
  } catch (const EmptyScriptError&) {}
  // 6-9: argument tolerance.
  expect(cmds("ab_drop('b13', 10)") == std::vector<DropCommand>{{BT::b13, 10}}, "case 6");
  expect(cmds("ab_drop(\"b31\", 7)") == std::vector<DropCommand>{{BT::b31, 7}}, "case 7");
  expect(cmds("ab_drop(B13, 2);") == std::vector<DropCommand>{{BT::b13, 2}}, "case 8");
  expect(cmds("  ab_drop( b11 ,  9 ) ; ") == std::vector<DropCommand>{{BT::b11, 9}}, "case 9");
  // 10-11: signed literals.
  expect(cmds("ab_drop(b11, -1)") == std::vector<DropCommand>{{BT::b11, -1}}, "case 10");
  expect(cmds("ab_drop(b11, +5)") == std::vector<DropCommand>{{BT::b11, 5}}, "case 11");
  // 12-13: non-literal arguments and unknown blocks are rejected.
  try {
    cmds("ab_drop(b11, 2+3)");
    throw CheckFailure("case 12: EmptyScript expected");
  } catch (const EmptyScriptError&) {}
  try {
    cmds("ab_drop(b12, 3)");
    throw CheckFailure("case 13: EmptyScript expected");
  } catch (const EmptyScriptError&) {}
  // 14: ignored-line accounting.
  {
    const CommandScript s = parse_drop_commands("# plan\n\nab_drop(b31, 4)\nprint('x')\nab_drop(b11, 4)\n");
    expect(s.commands.size() == 2 && s.ignored_lines == 3, "case 14");
  }
  // 15: trailing prose does not change extraction.
  {
    const std::string base = "intro\n```\nab_drop(b31, 4)\n```";
    expect(extract_last_code_fence(base) == "ab_drop(b31, 4)\n" &&
               extract_last_code_fence(base + "\nclosing remarks.") == "ab_drop(b31, 4)\n",
           "case 15");
  }
  // 16: unbalanced trailing fence marker is ignored.
  expect(extract_last_code_fence("```a``` mid ```b``` tail ```") == "b", "case 16");
  // 17: code on the opening fence line is kept.
  expect(cmds(extract_last_code_fence("```ab_drop(b11, 3)```")) ==
             std::vector<DropCommand>{{BT::b11, 3}},
         "case 17");
  // 18: full path to canonical output.
  expect(format_commands(
             extract_commands("Sure!\n```python\nab_drop(b31, 10)\nab_drop(b13, 10)\n```\n").commands) ==
             "ab_drop(b31, 10)\nab_drop(b13, 10)\n",
         "case 18");
  // 19: mismatched quotes are rejected.
  try {
    cmds("ab_drop('b11\", 3)");
    throw CheckFailure("case 19: EmptyScript expected");
  } catch (const EmptyScriptError&) {}
  // 20: out-of-range integer literals are rejected.
  try {
    cmds("ab_drop(b11, 99999999999999999999)");
    throw CheckFailure("case 20: EmptyScript expected");
  } catch (const EmptyScriptError&) {}
}

// ---------------------------------------------------------------- 10
void qualification_boundaries() {
  auto words = [](int n) {
    std::string out;
    for (int i = 0; i < n; ++i) {
      if (i) out += ' ';
      out += "w";
    }
    return out;
  };
  expect(qualify(words(899) + " <OBJECT>").qualified, "900 words pass");
  expect(!qualify(words(900) + " <OBJECT>").qualified, "901 words fail");

  // 30 characters outside the whitelist, in their UTF-8 encodings.
  const char* probes[30] = {
      "\xC2\xA1",          // inverted exclamation
      "\xC2\xA3",          // pound sign
      "\xC2\xA5",          // yen sign
      "\xC2\xA7",          // section sign
      "\xC2\xA9",          // copyright
      "\xC2\xAE",          // registered
      "\xC2\xB0",          // degree
      "\xC2\xB1",          // plus-minus
      "\xC2\xB5",          // micro
      "\xC2\xB6",          // pilcrow
      "\xC2\xBF",          // inverted question mark
      "\xC3\x97",          // multiplication sign
      "\xC3\xB7",          // division sign
      "\xC3\xB8",          // o with stroke
      "\xC3\xBC",          // u with diaeresis
      "\xCE\xB1",          // alpha
      "\xCE\xB2",          // beta
      "\xE2\x80\x94",      // em dash
      "\xE2\x80\xA2",      // bullet
      "\xE2\x80\xA6",      // ellipsis
      "\xE2\x82\xAC",      // euro sign
      "\xE2\x84\xA2",      // trademark
      "\xE2\x86\x92",      // right arrow
      "\xE2\x88\x9A",      // square root
      "\xE2\x88\x9E",      // infinity
      "\xE2\x89\x88",      // almost equal
      "\xE2\x89\xA4",      // less-or-equal
      "\xE4\xB8\xAD",      // CJK
      "\xED\x95\x9C",      // Hangul
      "\xF0\x9F\x98\x80",  // emoji
  };
  for (const char* probe : probes) {
    const auto violations = check_characters(std::string("ok ") + probe + " ok");
    expect(violations.size() == 1, std::string("probe flagged: ") + probe);
    const auto report = qualify(std::string("<OBJECT> ") + probe);
    expect(!report.qualified, std::string("probe disqualifies: ") + probe);
  }

  const auto missing = qualify("a fine prompt without the marker");
  expect(!missing.qualified, "missing marker fails");
  bool has_marker_violation = false;
  for (const Violation& v : missing.violations)
    has_marker_violation = has_marker_violation || std::holds_alternative<MissingObjectMarker>(v);
  expect(has_marker_violation, "MissingObjectMarker reported");
}

// ---------------------------------------------------------------- 11
void end_to_end_determinism() {
  const fs::path base = fs::temp_directory_path() / "dropeval_acceptance_e2e";
  fs::remove_all(base);
  fs::create_directories(base / "prompts");
  {
    std::ofstream(base / "prompts" / "alpha.txt")
        << "Use ab_drop() to build a stable structure shaped like the <OBJECT>. Lower parts first.";
    std::ofstream(base / "prompts" / "beta.txt")
        << "Construct the letter <OBJECT> from b11, b13 and b31 blocks via ab_drop().";
  }

  auto transport = [] {
    std::vector<MockChatTransport::Rule> rules = {
        {"the I", "```\nab_drop(b13, 9)\nab_drop(b13, 9)\n```\n"},
        {"the L", "```\nab_drop(b13, 8)\nab_drop(b11, 9)\n```\n"},
        {"the U", "```\nab_drop(b13, 7)\nab_drop(b11, 8)\nab_drop(b13, 9)\n```\n"},
    };
    return std::make_shared<MockChatTransport>(rules, std::string("```\nab_drop(b31, 9)\n```\n"));
  };

  auto run_once = [&](const std::string& run_id) {
    PipelineOptions opt;
    opt.prompts_dir = base / "prompts";
    opt.runs_dir = base / "runs";
    opt.run_id = run_id;
    opt.letters = "ILU";
    opt.trials = 2;
    opt.chat = transport();
    opt.chat_config.model = "mock";
    Pipeline pipeline(opt);
    pipeline.run_all();
    std::map<std::string, std::string> outputs;
    for (const auto& entry : fs::directory_iterator(pipeline.scores_dir())) {
      std::ifstream in(entry.path(), std::ios::binary);
      outputs[entry.path().filename().string()] =
          std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    }
    return outputs;
  };

  const auto first = run_once("one");
  const auto second = run_once("two");
  expect(first.size() >= 4, "score files produced");
  expect(first == second, "score outputs byte-identical across runs");
  fs::remove_all(base);
}

struct Criterion {
  const char* name;
  std::function<void()> run;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {"1. drop semantics: (b31, 4) occupies (3,0) (4,0) (5,0)", drop_semantics},
      {"2. character weight reproduction from published averages", weight_reproduction},
      {"3. normalized prompt scores sum to 100", normalization_property},
      {"4. standings order v1, v4, v5, v3, v2", ranking_reproduction},
      {"5. moving-set oracle equivalence, exhaustive depth-4 on 6x6", stability_oracle_equivalence},
      {"6. stability score formula on randomized layouts", stability_formula},
      {"7. classifier self-recognition 26/26", classifier_self_recognition},
      {"8. raster contract: margins, bilevel, black-area band", raster_contract},
      {"9. extraction golden corpus (20 cases)", extraction_corpus},
      {"10. qualification boundaries and probe characters", qualification_boundaries},
      {"11. end-to-end determinism with the mock transport", end_to_end_determinism},
  };

  int failures = 0;
  for (const Criterion& criterion : criteria) {
    const auto start = std::chrono::steady_clock::now();
    std::string error;
    try {
      criterion.run();
    } catch (const std::exception& e) {
      error = e.what();
    }
    const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                        std::chrono::steady_clock::now() - start)
                        .count();
    if (error.empty()) {
      std::printf("[PASS] %s (%lld ms)\n", criterion.name, static_cast<long long>(ms));
    } else {
      ++failures;
      std::printf("[FAIL] %s (%lld ms): %s\n", criterion.name, static_cast<long long>(ms),
                  error.c_str());
    }
  }
  if (failures) std::printf("%d criterion(s) failed\n", failures);
  return failures == 0 ? 0 : 1;
}
