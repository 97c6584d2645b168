#pragma once

// Competition scoring and ranking. Character weights are inversely tied to
// fleet-wide average stability/similarity and floored at 1/C; weighted
// trial scores average up through characters to prompts; prompt scores are
// normalized to a 100-point pool that decides the standings, with ties
// broken by shorter prompts.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace dropeval {

struct TrialRecord {
  std::string prompt_id;
  char letter = 'A';
  int trial = 0;  // 0-based
  double st = 0.0;
  double si = 0.0;
};

struct CompetitionConfig {
  int trials = 0;                   // T
  std::vector<char> characters;     // size C
  std::vector<std::string> prompts; // size P, ranking display order

  int character_count() const { return static_cast<int>(characters.size()); }
  int prompt_count() const { return static_cast<int>(prompts.size()); }

  bool valid() const {
    return trials >= 1 && !characters.empty() && !prompts.empty();
  }
};

struct CharacterWeight {
  char letter = 'A';
  double w_st = 0.0;
  double w_si = 0.0;
  double weight = 0.0;  // w_st * w_si
};

class IncompleteRecordsError : public std::runtime_error {
 public:
  explicit IncompleteRecordsError(const std::string& what)
      : std::runtime_error("incomplete trial records: " + what) {}
};

namespace detail {

// records indexed as [prompt][character][trial]; throws when any slot is
// missing or duplicated.
inline std::vector<std::vector<std::vector<const TrialRecord*>>> index_records(
    const std::vector<TrialRecord>& records, const CompetitionConfig& cfg) {
  if (!cfg.valid()) throw std::invalid_argument("competition config requires T, C, P >= 1");
  std::map<std::string, int> prompt_of;
  for (int k = 0; k < cfg.prompt_count(); ++k) prompt_of[cfg.prompts[k]] = k;
  std::map<char, int> char_of;
  for (int j = 0; j < cfg.character_count(); ++j) char_of[cfg.characters[j]] = j;

  std::vector<std::vector<std::vector<const TrialRecord*>>> idx(
      cfg.prompt_count(),
      std::vector<std::vector<const TrialRecord*>>(cfg.character_count(),
                                                   std::vector<const TrialRecord*>(cfg.trials)));
  for (const TrialRecord& r : records) {
    const auto kp = prompt_of.find(r.prompt_id);
    const auto jp = char_of.find(r.letter);
    if (kp == prompt_of.end() || jp == char_of.end() || r.trial < 0 || r.trial >= cfg.trials)
      throw IncompleteRecordsError("record outside configured (prompt, letter, trial) space: " +
                                   r.prompt_id + "/" + std::string(1, r.letter) + "/" +
                                   std::to_string(r.trial));
    auto& slot = idx[kp->second][jp->second][r.trial];
    if (slot != nullptr)
      throw IncompleteRecordsError("duplicate record " + r.prompt_id + "/" +
                                   std::string(1, r.letter) + "/" + std::to_string(r.trial));
    slot = &r;
  }
  for (int k = 0; k < cfg.prompt_count(); ++k)
    for (int j = 0; j < cfg.character_count(); ++j)
      for (int i = 0; i < cfg.trials; ++i)
        if (idx[k][j][i] == nullptr)
          throw IncompleteRecordsError("missing record " + cfg.prompts[k] + "/" +
                                       std::string(1, cfg.characters[j]) + "/" +
                                       std::to_string(i));
  return idx;
}

}  // namespace detail

/// Per-character weights over the full record pool:
/// w_st_j = max(1 - sum st / (P*T), 1/C), w_si_j analogous, weight = product.
inline std::vector<CharacterWeight> char_weights(const std::vector<TrialRecord>& records,
                                                 const CompetitionConfig& cfg) {
  const auto idx = detail::index_records(records, cfg);
  const double floor = 1.0 / cfg.character_count();
  const double denom = static_cast<double>(cfg.prompt_count()) * cfg.trials;

  std::vector<CharacterWeight> weights;
  weights.reserve(cfg.character_count());
  for (int j = 0; j < cfg.character_count(); ++j) {
    double st_sum = 0.0, si_sum = 0.0;
    for (int k = 0; k < cfg.prompt_count(); ++k) {
      for (int i = 0; i < cfg.trials; ++i) {
        st_sum += idx[k][j][i]->st;
        si_sum += idx[k][j][i]->si;
      }
    }
    CharacterWeight w;
    w.letter = cfg.characters[j];
    w.w_st = std::max(1.0 - st_sum / denom, floor);
    w.w_si = std::max(1.0 - si_sum / denom, floor);
    w.weight = w.w_st * w.w_si;
    weights.push_back(w);
  }
  return weights;
}

inline double trial_score(double weight, double st, double si) { return weight * st * si; }

struct CharacterScore {
  std::string prompt_id;
  char letter = 'A';
  double score = 0.0;  // mean weighted trial score
};

struct PromptScore {
  std::string prompt_id;
  double prompt = 0.0;       // mean character score
  double norm_prompt = 0.0;  // 100 * prompt / competition, 0 when pool is empty
};

struct CompetitionResult {
  std::vector<CharacterWeight> weights;
  std::vector<CharacterScore> characters;  // prompt-major, configured order
  std::vector<PromptScore> prompts;        // configured order
  double competition = 0.0;                // sum of prompt scores
  bool zero_competition = false;           // all-zero pool: norms defined as 0
};

/// Full aggregation: char_jk -> prompt_k -> normalized prompt scores.
inline CompetitionResult aggregate(const std::vector<TrialRecord>& records,
                                   const std::vector<CharacterWeight>& weights,
                                   const CompetitionConfig& cfg) {
  const auto idx = detail::index_records(records, cfg);
  if (static_cast<int>(weights.size()) != cfg.character_count())
    throw std::invalid_argument("weights do not cover the character set");

  CompetitionResult result;
  result.weights = weights;
  for (int k = 0; k < cfg.prompt_count(); ++k) {
    double char_sum = 0.0;
    for (int j = 0; j < cfg.character_count(); ++j) {
      double trial_sum = 0.0;
      for (int i = 0; i < cfg.trials; ++i)
        trial_sum += trial_score(weights[j].weight, idx[k][j][i]->st, idx[k][j][i]->si);
      const double char_jk = trial_sum / cfg.trials;
      result.characters.push_back(CharacterScore{cfg.prompts[k], cfg.characters[j], char_jk});
      char_sum += char_jk;
    }
    PromptScore ps;
    ps.prompt_id = cfg.prompts[k];
    ps.prompt = char_sum / cfg.character_count();
    result.prompts.push_back(ps);
    result.competition += ps.prompt;
  }

  if (result.competition > 0.0) {
    for (PromptScore& ps : result.prompts)
      ps.norm_prompt = 100.0 * ps.prompt / result.competition;
  } else {
    result.zero_competition = true;  // norms stay 0; rank falls back to length
  }
  return result;
}

/// Convenience path: weights derived from the same record pool being scored.
inline CompetitionResult score_competition(const std::vector<TrialRecord>& records,
                                           const CompetitionConfig& cfg) {
  return aggregate(records, char_weights(records, cfg), cfg);
}

struct Standing {
  int rank = 0;  // 1-based; equal (norm, words) share a rank
  std::string prompt_id;
  double norm_prompt = 0.0;
  double prompt = 0.0;
  int word_count = 0;
};

/// Standings: descending normalized score, ties broken by ascending word
/// count; prompts tied on both are co-ranked.
inline std::vector<Standing> rank(const CompetitionResult& result,
                                  const std::map<std::string, int>& prompt_word_counts) {
  std::vector<Standing> standings;
  standings.reserve(result.prompts.size());
  for (const PromptScore& ps : result.prompts) {
    Standing s;
    s.prompt_id = ps.prompt_id;
    s.norm_prompt = ps.norm_prompt;
    s.prompt = ps.prompt;
    if (const auto it = prompt_word_counts.find(ps.prompt_id); it != prompt_word_counts.end())
      s.word_count = it->second;
    standings.push_back(s);
  }
  std::stable_sort(standings.begin(), standings.end(), [](const Standing& a, const Standing& b) {
    if (a.norm_prompt != b.norm_prompt) return a.norm_prompt > b.norm_prompt;
    return a.word_count < b.word_count;
  });
  for (std::size_t i = 0; i < standings.size(); ++i) {
    if (i > 0 && standings[i].norm_prompt == standings[i - 1].norm_prompt &&
        standings[i].word_count == standings[i - 1].word_count) {
      standings[i].rank = standings[i - 1].rank;
    } else {
      standings[i].rank = static_cast<int>(i) + 1;
    }
  }
  return standings;
}

// ---------------------------------------------------------------------------
// CSV interchange. Fields never contain commas: prompt ids are validated on
// write and parsed records reject embedded separators.

namespace csv {

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream in(line);
  while (std::getline(in, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

}  // namespace csv

inline std::string records_csv(const std::vector<TrialRecord>& records) {
  std::string out = "prompt_id,letter,trial,st,si\n";
  for (const TrialRecord& r : records) {
    if (r.prompt_id.find(',') != std::string::npos)
      throw std::invalid_argument("prompt id must not contain a comma: " + r.prompt_id);
    out += r.prompt_id + ',' + r.letter + ',' + std::to_string(r.trial) + ',' +
           csv::format_double(r.st) + ',' + csv::format_double(r.si) + '\n';
  }
  return out;
}

inline void write_records_csv(const std::filesystem::path& path,
                              const std::vector<TrialRecord>& records) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << records_csv(records);
}

inline std::vector<TrialRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<TrialRecord> records;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("prompt_id,", 0) == 0) continue;  // header
    }
    const auto fields = csv::split_line(line);
    if (fields.size() != 5 || fields[1].size() != 1)
      throw std::runtime_error("malformed record line: " + line);
    TrialRecord r;
    r.prompt_id = fields[0];
    r.letter = fields[1][0];
    r.trial = std::stoi(fields[2]);
    r.st = std::stod(fields[3]);
    r.si = std::stod(fields[4]);
    records.push_back(std::move(r));
  }
  return records;
}

inline std::string weights_csv(const std::vector<CharacterWeight>& weights) {
  std::string out = "letter,w_st,w_si,weight\n";
  for (const CharacterWeight& w : weights)
    out += w.letter + (',' + csv::format_double(w.w_st)) + ',' + csv::format_double(w.w_si) +
           ',' + csv::format_double(w.weight) + '\n';
  return out;
}

inline void write_weights_csv(const std::filesystem::path& path,
                              const std::vector<CharacterWeight>& weights) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << weights_csv(weights);
}

/// Reads a weights CSV (letter,w_st,w_si,weight), e.g. to freeze weights
/// from a reference pool instead of deriving them from the scored records.
inline std::vector<CharacterWeight> read_weights_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::vector<CharacterWeight> weights;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (first) {
      first = false;
      if (line.rfind("letter,", 0) == 0) continue;
    }
    const auto fields = csv::split_line(line);
    if (fields.size() != 4 || fields[0].size() != 1)
      throw std::runtime_error("malformed weights line: " + line);
    CharacterWeight w;
    w.letter = fields[0][0];
    w.w_st = std::stod(fields[1]);
    w.w_si = std::stod(fields[2]);
    w.weight = std::stod(fields[3]);
    weights.push_back(w);
  }
  return weights;
}

/// Reorders `weights` to cover exactly cfg.characters; throws when a
/// character has no weight.
inline std::vector<CharacterWeight> align_weights(const std::vector<CharacterWeight>& weights,
                                                  const CompetitionConfig& cfg) {
  std::vector<CharacterWeight> out;
  for (const char c : cfg.characters) {
    const auto it = std::find_if(weights.begin(), weights.end(),
                                 [&](const CharacterWeight& w) { return w.letter == c; });
    if (it == weights.end())
      throw std::invalid_argument(std::string("no frozen weight for letter ") + c);
    out.push_back(*it);
  }
  return out;
}

inline std::string characters_csv(const std::vector<CharacterScore>& characters) {
  std::string out = "prompt_id,letter,char_score\n";
  for (const CharacterScore& c : characters)
    out += c.prompt_id + ',' + c.letter + ',' + csv::format_double(c.score) + '\n';
  return out;
}

inline void write_characters_csv(const std::filesystem::path& path,
                                 const std::vector<CharacterScore>& characters) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << characters_csv(characters);
}

inline std::string standings_csv(const std::vector<Standing>& standings) {
  std::string out = "rank,prompt_id,norm_prompt,prompt_score,word_count\n";
  for (const Standing& s : standings)
    out += std::to_string(s.rank) + ',' + s.prompt_id + ',' + csv::format_double(s.norm_prompt) +
           ',' + csv::format_double(s.prompt) + ',' + std::to_string(s.word_count) + '\n';
  return out;
}

inline void write_standings_csv(const std::filesystem::path& path,
                                const std::vector<Standing>& standings) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << standings_csv(standings);
}

}  // namespace dropeval
