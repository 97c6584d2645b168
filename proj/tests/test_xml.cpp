#include <catch2/catch.hpp>

#include "dropeval/grid.hpp"
#include "dropeval/xml_export.hpp"

using namespace dropeval;

TEST_CASE("empty layout exports a Level with an empty GameObjects element") {
  const std::string xml = export_xml(LevelLayout({20, 16}));
  CHECK(xml.find("<Level width=\"20\">") != std::string::npos);
  CHECK(xml.find("<GameObjects>") != std::string::npos);
  CHECK(xml.find("<Block") == std::string::npos);
  CHECK(parse_level_xml(xml).empty());
}

TEST_CASE("world mapping for a centered b11") {
  const LevelLayout layout = drop_block(LevelLayout({20, 16}), {BlockType::b11, 10});
  const auto blocks = parse_level_xml(export_xml(layout));
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].type == "SquareSmall");
  CHECK(blocks[0].material == "stone");
  CHECK(blocks[0].x == Approx(0.215));
  CHECK(blocks[0].y == Approx(0.5 * 0.43 - 3.5));
  CHECK(blocks[0].rotation == 0);
}

TEST_CASE("column blocks export rotated rectangles") {
  const LevelLayout layout = drop_block(LevelLayout({20, 16}), {BlockType::b13, 4});
  const auto blocks = parse_level_xml(export_xml(layout));
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].type == "RectMedium");
  CHECK(blocks[0].rotation == 90);
  CHECK(blocks[0].y == Approx(1.5 * 0.43 - 3.5));
}

TEST_CASE("export/parse round trip preserves count, order, and types") {
  const LevelLayout layout = build_level(
      GridConfig{20, 16},
      {{BlockType::b31, 4}, {BlockType::b13, 4}, {BlockType::b11, 10}, {BlockType::b31, 10}});
  const auto blocks = parse_level_xml(export_xml(layout));
  REQUIRE(blocks.size() == layout.blocks().size());
  CHECK(blocks[0].type == "RectMedium");
  CHECK(blocks[0].rotation == 0);
  CHECK(blocks[1].type == "RectMedium");
  CHECK(blocks[1].rotation == 90);
  CHECK(blocks[2].type == "SquareSmall");
  CHECK(blocks[3].type == "RectMedium");
  for (const XmlBlock& b : blocks) {
    CHECK(!b.type.empty());
    CHECK(b.material == "stone");
  }
}

TEST_CASE("export constants are configurable") {
  XmlExportConfig cfg;
  cfg.cell_size = 1.0;
  cfg.ground_y = 0.0;
  cfg.square_type = "Box";
  const LevelLayout layout = drop_block(LevelLayout({20, 16}), {BlockType::b11, 0});
  const auto blocks = parse_level_xml(export_xml(layout, cfg));
  REQUIRE(blocks.size() == 1);
  CHECK(blocks[0].type == "Box");
  CHECK(blocks[0].x == Approx(-9.5));
  CHECK(blocks[0].y == Approx(0.5));
}
