#pragma once

// Science Birds level interop: serializes a placed layout into the level
// description XML consumed by the game, plus a small reader used to verify
// round trips. Block type names and world-unit constants are configurable;
// the defaults target the standard stone block set.

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "dropeval/grid.hpp"

namespace dropeval {

struct XmlExportConfig {
  double cell_size = 0.43;   // world units per grid cell
  double ground_y = -3.5;    // world y of the grid floor
  std::string square_type = "SquareSmall";
  std::string rect_type = "RectMedium";
  std::string material = "stone";
};

namespace detail {

inline std::string format_world(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace detail

/// One <Block .../> element as written or parsed.
struct XmlBlock {
  std::string type;
  std::string material;
  double x = 0.0;
  double y = 0.0;
  int rotation = 0;
};

inline XmlBlock to_xml_block(const PlacedBlock& block, const GridConfig& grid,
                             const XmlExportConfig& cfg = {}) {
  const Footprint fp = block.extent();
  XmlBlock out;
  out.type = block.type == BlockType::b11 ? cfg.square_type : cfg.rect_type;
  out.material = cfg.material;
  // World origin sits at the horizontal center of the grid on the ground.
  out.x = (block.x - grid.width / 2.0 + fp.width / 2.0) * cfg.cell_size;
  out.y = (block.y + fp.height / 2.0) * cfg.cell_size + cfg.ground_y;
  out.rotation = block.type == BlockType::b13 ? 90 : 0;
  return out;
}

/// Level document: <Level width><GameObjects><Block .../>...</GameObjects>.
inline std::string export_xml(const LevelLayout& layout, const XmlExportConfig& cfg = {}) {
  std::string out = "<?xml version=\"1.0\" encoding=\"utf-8\"?>\n";
  out += "<Level width=\"" + std::to_string(layout.config().width) + "\">\n";
  out += "  <GameObjects>\n";
  for (const PlacedBlock& block : layout.blocks()) {
    const XmlBlock b = to_xml_block(block, layout.config(), cfg);
    out += "    <Block type=\"" + b.type + "\" material=\"" + b.material + "\" x=\"" +
           detail::format_world(b.x) + "\" y=\"" + detail::format_world(b.y) + "\" rotation=\"" +
           std::to_string(b.rotation) + "\"/>\n";
  }
  out += "  </GameObjects>\n";
  out += "</Level>\n";
  return out;
}

class XmlParseError : public std::runtime_error {
 public:
  explicit XmlParseError(const std::string& what) : std::runtime_error("xml: " + what) {}
};

namespace detail {

inline std::string attribute(std::string_view element, std::string_view name) {
  const std::string needle = std::string(name) + "=\"";
  const std::size_t at = element.find(needle);
  if (at == std::string_view::npos)
    throw XmlParseError("missing attribute " + std::string(name));
  const std::size_t start = at + needle.size();
  const std::size_t end = element.find('"', start);
  if (end == std::string_view::npos) throw XmlParseError("unterminated attribute value");
  return std::string(element.substr(start, end - start));
}

}  // namespace detail

/// Minimal reader for round-trip checks: collects every <Block/> element's
/// attributes in document order.
inline std::vector<XmlBlock> parse_level_xml(std::string_view xml) {
  if (xml.find("<Level") == std::string_view::npos) throw XmlParseError("no Level element");
  std::vector<XmlBlock> blocks;
  std::size_t pos = 0;
  while ((pos = xml.find("<Block", pos)) != std::string_view::npos) {
    const std::size_t end = xml.find('>', pos);
    if (end == std::string_view::npos) throw XmlParseError("unterminated Block element");
    const std::string_view element = xml.substr(pos, end - pos);
    XmlBlock b;
    b.type = detail::attribute(element, "type");
    b.material = detail::attribute(element, "material");
    b.x = std::stod(detail::attribute(element, "x"));
    b.y = std::stod(detail::attribute(element, "y"));
    b.rotation = std::stoi(detail::attribute(element, "rotation"));
    blocks.push_back(std::move(b));
    pos = end + 1;
  }
  return blocks;
}

}  // namespace dropeval
