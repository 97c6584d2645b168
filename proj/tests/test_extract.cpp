#include <catch2/catch.hpp>

#include <random>
#include <string>

#include "dropeval/extract.hpp"

using namespace dropeval;

TEST_CASE("extract_last_code_fence picks the last complete pair") {
  CHECK(extract_last_code_fence("text ```a()``` more ```b()```") == "b()");
  CHECK(extract_last_code_fence("```only()```") == "only()");
}

TEST_CASE("extract_last_code_fence needs a complete pair") {
  CHECK_THROWS_AS(extract_last_code_fence("no fences at all"), NoCodeFenceError);
  CHECK_THROWS_AS(extract_last_code_fence("one ``` marker"), NoCodeFenceError);
}

TEST_CASE("extract_last_code_fence strips a language tag on the opening line") {
  CHECK(extract_last_code_fence("```python\nab_drop(b11,3)\n```") == "ab_drop(b11,3)\n");
  CHECK(extract_last_code_fence("```\nab_drop(b11,3)\n```") == "ab_drop(b11,3)\n");
  // Code on the opening fence line is kept.
  CHECK(extract_last_code_fence("```ab_drop(b11, 3)```") == "ab_drop(b11, 3)");
}

TEST_CASE("extract_last_code_fence ignores an unbalanced trailing marker") {
  CHECK(extract_last_code_fence("```a``` then ```b``` and a stray ```") == "b");
}

TEST_CASE("extraction is invariant to trailing prose") {
  const std::string base = "intro\n```\nab_drop(b31, 4)\n```";
  CHECK(extract_last_code_fence(base) == extract_last_code_fence(base + "\nclosing remarks."));
}

TEST_CASE("parse_drop_commands collects literal calls in source order") {
  const CommandScript script = parse_drop_commands("ab_drop(b31, 4)\nab_drop(b11, 4)");
  REQUIRE(script.commands.size() == 2);
  CHECK(script.commands[0] == DropCommand{BlockType::b31, 4});
  CHECK(script.commands[1] == DropCommand{BlockType::b11, 4});
  CHECK(script.ignored_lines == 0);
}

TEST_CASE("parse_drop_commands never expands loops") {
  // The loop header is ignored and the body is rejected because the
  // position is not an integer literal.
  CHECK_THROWS_AS(parse_drop_commands("for i in range(3):\n  ab_drop(b11, i)"), EmptyScriptError);

  SECTION("literal lines around a loop still parse") {
    const CommandScript script =
        parse_drop_commands("ab_drop(b31, 4)\nfor i in range(3):\n  ab_drop(b11, i)\n");
    REQUIRE(script.commands.size() == 1);
    CHECK(script.ignored_lines == 2);
  }
}

TEST_CASE("parse_drop_commands tolerates quotes, case, and semicolons") {
  CHECK(parse_drop_commands("ab_drop('b13', 10)").commands[0] == DropCommand{BlockType::b13, 10});
  CHECK(parse_drop_commands("ab_drop(\"b31\", 7)").commands[0] == DropCommand{BlockType::b31, 7});
  CHECK(parse_drop_commands("ab_drop(B13, 2);").commands[0] == DropCommand{BlockType::b13, 2});
  CHECK(parse_drop_commands("  ab_drop( b11 ,  9 ) ; ").commands[0] ==
        DropCommand{BlockType::b11, 9});
  SECTION("mismatched quotes are rejected") {
    CHECK_THROWS_AS(parse_drop_commands("ab_drop('b11\", 3)"), EmptyScriptError);
  }
}

TEST_CASE("parse_drop_commands accepts signed integer literals only") {
  CHECK(parse_drop_commands("ab_drop(b11, -1)").commands[0] == DropCommand{BlockType::b11, -1});
  CHECK(parse_drop_commands("ab_drop(b11, +5)").commands[0] == DropCommand{BlockType::b11, 5});
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(b11, 2+3)"), EmptyScriptError);
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(b11, x)"), EmptyScriptError);
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(b11, 99999999999999999999)"), EmptyScriptError);
}

TEST_CASE("parse_drop_commands rejects unknown block names") {
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(b12, 3)"), EmptyScriptError);
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(block, 3)"), EmptyScriptError);
}

TEST_CASE("parse_drop_commands counts every non-matching line") {
  const CommandScript script =
      parse_drop_commands("# plan\n\nab_drop(b31, 4)\nprint('done')\nab_drop(b11, 4)\n");
  CHECK(script.commands.size() == 2);
  CHECK(script.ignored_lines == 3);
}

TEST_CASE("format_commands emits the canonical form") {
  const CommandScript script = parse_drop_commands("ab_drop( 'B31' , 4 );\nab_drop(b11,4)");
  CHECK(format_commands(script.commands) == "ab_drop(b31, 4)\nab_drop(b11, 4)\n");
}

TEST_CASE("extract_commands runs the full path") {
  const CommandScript script = extract_commands(
      "Sure! Here is the level:\n```python\nab_drop(b31, 10)\nab_drop(b13, 10)\n```\nEnjoy!");
  REQUIRE(script.commands.size() == 2);
  CHECK(script.commands[0] == DropCommand{BlockType::b31, 10});
  CHECK(script.commands[1] == DropCommand{BlockType::b13, 10});
}

TEST_CASE("canonical form round-trips through the parser") {
  std::mt19937 rng(2024);
  std::uniform_int_distribution<int> type_dist(0, 2);
  std::uniform_int_distribution<int> x_dist(-3, 25);
  std::uniform_int_distribution<int> len_dist(1, 30);
  for (int round = 0; round < 100; ++round) {
    std::vector<DropCommand> commands;
    const int len = len_dist(rng);
    for (int i = 0; i < len; ++i)
      commands.push_back({static_cast<BlockType>(type_dist(rng)), x_dist(rng)});
    const CommandScript script = parse_drop_commands(format_commands(commands));
    REQUIRE(script.commands == commands);
    REQUIRE(script.ignored_lines == 0);
  }
}

TEST_CASE("parser totality: arbitrary junk only ever raises EmptyScript") {
  CHECK_THROWS_AS(parse_drop_commands(""), EmptyScriptError);
  CHECK_THROWS_AS(parse_drop_commands("((((((\x01\x02\xff"), EmptyScriptError);
  CHECK_THROWS_AS(parse_drop_commands("ab_drop(((("), EmptyScriptError);
}
