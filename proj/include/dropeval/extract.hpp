#pragma once

// Code extraction: pulls the content of the last complete triple-backtick
// fence out of a chat response, then collects literal ab_drop() calls from
// it line by line.
//
// Only literal calls are collected. Loop constructs are never expanded:
// a line like "ab_drop(b11, i)" is ignored because the position is not an
// integer literal.

#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <optional>
#include <regex>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dropeval/grid.hpp"

namespace dropeval {

class NoCodeFenceError : public std::runtime_error {
 public:
  NoCodeFenceError() : std::runtime_error("response contains no complete ``` fence pair") {}
};

class EmptyScriptError : public std::runtime_error {
 public:
  EmptyScriptError() : std::runtime_error("no ab_drop() commands found in code block") {}
};

struct CommandScript {
  std::vector<DropCommand> commands;  // source order
  int ignored_lines = 0;              // lines that produced no command
};

namespace detail {

// A fence opener may carry a language tag on its own line ("```python").
// The tag line is dropped when it is a bare word; code on the same line as
// the fence ("```a()```") is kept.
inline bool is_language_tag_line(std::string_view line) {
  for (char ch : line) {
    const auto c = static_cast<unsigned char>(ch);
    if (!(std::isalnum(c) || ch == '_' || ch == '+' || ch == '-' || ch == '.')) return false;
  }
  return true;  // includes the empty line after a bare ``` opener
}

}  // namespace detail

/// Returns the text strictly between the last complete pair of ``` markers.
/// Markers are paired greedily in document order; an unbalanced trailing
/// marker is ignored. Throws NoCodeFenceError when fewer than two markers
/// exist.
inline std::string extract_last_code_fence(std::string_view response) {
  std::vector<std::size_t> marks;
  for (std::size_t pos = response.find("```"); pos != std::string_view::npos;
       pos = response.find("```", pos + 3)) {
    marks.push_back(pos);
  }
  if (marks.size() < 2) throw NoCodeFenceError();

  const std::size_t pairs = marks.size() / 2;
  const std::size_t open = marks[2 * (pairs - 1)];
  const std::size_t close = marks[2 * (pairs - 1) + 1];
  std::string_view body = response.substr(open + 3, close - (open + 3));

  // Strip a language tag (or blank remainder) on the opening fence line.
  if (const std::size_t nl = body.find('\n'); nl != std::string_view::npos) {
    std::string_view first = body.substr(0, nl);
    if (!first.empty() && first.back() == '\r') first.remove_suffix(1);
    if (detail::is_language_tag_line(first)) body.remove_prefix(nl + 1);
  }
  return std::string(body);
}

/// Parses one line; returns the command if the line contains a literal call
/// of the shape ab_drop(<block>, <integer>).
inline std::optional<DropCommand> parse_drop_line(const std::string& line) {
  // Block name may be quoted (matching quotes) and is case-insensitive;
  // a trailing semicolon is tolerated. Position must be an integer literal.
  static const std::regex call_re(
      R"(ab_drop\s*\(\s*(['"]?)([bB][0-9]{2})\1\s*,\s*([+-]?[0-9]+)\s*\)\s*;?)",
      std::regex::optimize);
  std::smatch m;
  if (!std::regex_search(line, m, call_re)) return std::nullopt;
  const auto block = parse_block_type(m[2].str());
  if (!block) return std::nullopt;
  errno = 0;
  const long long value = std::strtoll(m[3].str().c_str(), nullptr, 10);
  if (errno == ERANGE || value < INT32_MIN || value > INT32_MAX) return std::nullopt;
  return DropCommand{*block, static_cast<int>(value)};
}

/// Scans code line by line and collects literal ab_drop() calls in order.
/// Every line that yields no command counts as ignored. Throws
/// EmptyScriptError when nothing matched.
inline CommandScript parse_drop_commands(std::string_view code) {
  CommandScript script;
  std::size_t start = 0;
  while (start <= code.size()) {
    std::size_t end = code.find('\n', start);
    const bool last = end == std::string_view::npos;
    std::string line(code.substr(start, last ? code.size() - start : end - start));
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (last && line.empty()) break;  // no trailing pseudo-line after final \n
    if (auto cmd = parse_drop_line(line))
      script.commands.push_back(*cmd);
    else
      ++script.ignored_lines;
    if (last) break;
    start = end + 1;
  }
  if (script.commands.empty()) throw EmptyScriptError();
  return script;
}

/// Canonical one-command-per-line form: "ab_drop(bXY, N)".
inline std::string format_commands(std::span<const DropCommand> commands) {
  std::string out;
  for (const DropCommand& cmd : commands) {
    out += "ab_drop(";
    out += block_name(cmd.type);
    out += ", ";
    out += std::to_string(cmd.x_position);
    out += ")\n";
  }
  return out;
}

/// Full extraction path: last fence, then command parse.
inline CommandScript extract_commands(std::string_view response) {
  return parse_drop_commands(extract_last_code_fence(response));
}

}  // namespace dropeval
