#pragma once

// Prompt qualification: character whitelist, word limit, <OBJECT> marker
// presence, and target-character substitution.
//
// Prompts are UTF-8 text. The whitelist admits ASCII letters and digits,
// whitespace (space, tab, newline), and a fixed symbol set that includes the
// curly quote characters and the en dash.

#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace dropeval {

inline constexpr int kDefaultMaxWords = 900;
inline constexpr std::string_view kObjectMarker = "<OBJECT>";

struct Utf8Char {
  std::uint32_t codepoint = 0;
  std::size_t position = 0;  // codepoint index, 0-based
  std::string utf8;          // raw bytes of this scalar value
};

/// Decodes UTF-8 into scalar values. Malformed bytes decode as U+FFFD one
/// byte at a time so positions stay monotone.
inline std::vector<Utf8Char> decode_utf8(std::string_view text) {
  std::vector<Utf8Char> out;
  std::size_t i = 0, pos = 0;
  while (i < text.size()) {
    const auto b0 = static_cast<unsigned char>(text[i]);
    std::size_t len = 1;
    std::uint32_t cp = 0xFFFD;
    if (b0 < 0x80) {
      cp = b0;
    } else if ((b0 & 0xE0) == 0xC0) {
      len = 2;
    } else if ((b0 & 0xF0) == 0xE0) {
      len = 3;
    } else if ((b0 & 0xF8) == 0xF0) {
      len = 4;
    }
    if (len > 1) {
      if (i + len <= text.size()) {
        cp = b0 & (0x7F >> len);
        bool ok = true;
        for (std::size_t k = 1; k < len; ++k) {
          const auto bk = static_cast<unsigned char>(text[i + k]);
          if ((bk & 0xC0) != 0x80) {
            ok = false;
            break;
          }
          cp = (cp << 6) | (bk & 0x3F);
        }
        if (!ok) {
          cp = 0xFFFD;
          len = 1;
        }
      } else {
        cp = 0xFFFD;
        len = 1;
      }
    }
    out.push_back(Utf8Char{cp, pos, std::string(text.substr(i, len))});
    i += len;
    ++pos;
  }
  return out;
}

inline bool is_prompt_whitespace(std::uint32_t cp) noexcept {
  return cp == ' ' || cp == '\n' || cp == '\t' || cp == '\r';
}

/// Whitelist check for a single scalar value.
inline bool is_allowed_prompt_char(std::uint32_t cp) noexcept {
  if (is_prompt_whitespace(cp)) return true;
  if (cp >= 'A' && cp <= 'Z') return true;
  if (cp >= 'a' && cp <= 'z') return true;
  if (cp >= '0' && cp <= '9') return true;
  switch (cp) {
    case '~': case '/': case '\\': case '+': case '-': case '*':
    case '`': case '\'': case '"':
    case '.': case ':': case ';': case '?': case ',': case '!':
    case '@': case '#': case '$': case '%': case '^': case '&':
    case '(': case ')': case '_': case '=':
    case '[': case ']': case '{': case '}': case '|': case '<': case '>':
      return true;
    case 0x201C:  // left double curly quote
    case 0x201D:  // right double curly quote
    case 0x2018:  // left single curly quote
    case 0x2019:  // right single curly quote
    case 0x2013:  // en dash
      return true;
    default:
      return false;
  }
}

struct DisallowedCharacter {
  std::size_t position = 0;  // codepoint index
  std::uint32_t codepoint = 0;
  std::string utf8;

  friend bool operator==(const DisallowedCharacter&, const DisallowedCharacter&) = default;
};

struct WordLimitExceeded {
  int count = 0;
  int limit = kDefaultMaxWords;

  friend bool operator==(const WordLimitExceeded&, const WordLimitExceeded&) = default;
};

struct MissingObjectMarker {
  friend bool operator==(const MissingObjectMarker&, const MissingObjectMarker&) = default;
};

using Violation = std::variant<DisallowedCharacter, WordLimitExceeded, MissingObjectMarker>;

struct QualificationReport {
  bool qualified = false;
  std::vector<Violation> violations;
};

inline std::string describe(const Violation& v) {
  if (const auto* c = std::get_if<DisallowedCharacter>(&v)) {
    char buf[16];
    std::snprintf(buf, sizeof(buf), "U+%04X", c->codepoint);
    return "disallowed character " + std::string(buf) + " at position " +
           std::to_string(c->position);
  }
  if (const auto* w = std::get_if<WordLimitExceeded>(&v))
    return "word limit exceeded: " + std::to_string(w->count) + " > " +
           std::to_string(w->limit);
  return "missing <OBJECT> marker";
}

inline std::vector<DisallowedCharacter> check_characters(std::string_view prompt) {
  std::vector<DisallowedCharacter> out;
  for (const Utf8Char& c : decode_utf8(prompt))
    if (!is_allowed_prompt_char(c.codepoint))
      out.push_back(DisallowedCharacter{c.position, c.codepoint, c.utf8});
  return out;
}

/// Number of maximal nonempty runs separated by whitespace.
inline int count_words(std::string_view prompt) {
  int words = 0;
  bool in_word = false;
  for (const Utf8Char& c : decode_utf8(prompt)) {
    if (is_prompt_whitespace(c.codepoint)) {
      in_word = false;
    } else if (!in_word) {
      in_word = true;
      ++words;
    }
  }
  return words;
}

inline bool contains_object_marker(std::string_view prompt) {
  return prompt.find(kObjectMarker) != std::string_view::npos;
}

/// Runs all three rule checks. qualified iff no violations.
inline QualificationReport qualify(std::string_view prompt, int max_words = kDefaultMaxWords) {
  QualificationReport report;
  for (DisallowedCharacter& c : check_characters(prompt))
    report.violations.emplace_back(std::move(c));
  if (const int words = count_words(prompt); words > max_words)
    report.violations.emplace_back(WordLimitExceeded{words, max_words});
  if (!contains_object_marker(prompt))
    report.violations.emplace_back(MissingObjectMarker{});
  report.qualified = report.violations.empty();
  return report;
}

class MissingObjectMarkerError : public std::runtime_error {
 public:
  MissingObjectMarkerError() : std::runtime_error("prompt contains no <OBJECT> marker") {}
};

/// Replaces every literal <OBJECT> with the target character (replace-all).
/// Throws MissingObjectMarkerError when the marker does not occur.
inline std::string substitute_object(std::string_view prompt, char target) {
  if (!contains_object_marker(prompt)) throw MissingObjectMarkerError();
  std::string out;
  out.reserve(prompt.size());
  std::size_t i = 0;
  while (i < prompt.size()) {
    if (prompt.compare(i, kObjectMarker.size(), kObjectMarker) == 0) {
      out.push_back(target);
      i += kObjectMarker.size();
    } else {
      out.push_back(prompt[i]);
      ++i;
    }
  }
  return out;
}

}  // namespace dropeval
