#pragma once

// Reference glyphs for the 26 uppercase letters as 5x7 stroke bitmaps.
// These are the source of the shipped template fixtures; the template
// pipeline rescales them to the 64x64 classifier cell.

#include <array>
#include <string_view>

namespace dropeval {

inline constexpr int kGlyphCols = 5;
inline constexpr int kGlyphRows = 7;

// clang-format off
inline constexpr std::array<std::array<std::string_view, kGlyphRows>, 26> kGlyphStrokes = {{
    {{" ### ",
      "#   #",
      "#   #",
      "#####",
      "#   #",
      "#   #",
      "#   #"}},  // A
    {{"#### ",
      "#   #",
      "#   #",
      "#### ",
      "#   #",
      "#   #",
      "#### "}},  // B
    {{" ### ",
      "#   #",
      "#    ",
      "#    ",
      "#    ",
      "#   #",
      " ### "}},  // C
    {{"#### ",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      "#### "}},  // D
    {{"#####",
      "#    ",
      "#    ",
      "#### ",
      "#    ",
      "#    ",
      "#####"}},  // E
    {{"#####",
      "#    ",
      "#    ",
      "#### ",
      "#    ",
      "#    ",
      "#    "}},  // F
    {{" ### ",
      "#   #",
      "#    ",
      "# ###",
      "#   #",
      "#   #",
      " ####"}},  // G
    {{"#   #",
      "#   #",
      "#   #",
      "#####",
      "#   #",
      "#   #",
      "#   #"}},  // H
    {{" ### ",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  ",
      " ### "}},  // I
    {{"  ###",
      "   # ",
      "   # ",
      "   # ",
      "   # ",
      "#  # ",
      " ##  "}},  // J
    {{"#   #",
      "#  # ",
      "# #  ",
      "##   ",
      "# #  ",
      "#  # ",
      "#   #"}},  // K
    {{"#    ",
      "#    ",
      "#    ",
      "#    ",
      "#    ",
      "#    ",
      "#####"}},  // L
    {{"#   #",
      "## ##",
      "# # #",
      "# # #",
      "#   #",
      "#   #",
      "#   #"}},  // M
    {{"#   #",
      "#   #",
      "##  #",
      "# # #",
      "#  ##",
      "#   #",
      "#   #"}},  // N
    {{" ### ",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      " ### "}},  // O
    {{"#### ",
      "#   #",
      "#   #",
      "#### ",
      "#    ",
      "#    ",
      "#    "}},  // P
    {{" ### ",
      "#   #",
      "#   #",
      "#   #",
      "# # #",
      "#  # ",
      " ## #"}},  // Q
    {{"#### ",
      "#   #",
      "#   #",
      "#### ",
      "# #  ",
      "#  # ",
      "#   #"}},  // R
    {{" ####",
      "#    ",
      "#    ",
      " ### ",
      "    #",
      "    #",
      "#### "}},  // S
    {{"#####",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  "}},  // T
    {{"#   #",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      " ### "}},  // U
    {{"#   #",
      "#   #",
      "#   #",
      "#   #",
      "#   #",
      " # # ",
      "  #  "}},  // V
    {{"#   #",
      "#   #",
      "#   #",
      "# # #",
      "# # #",
      "## ##",
      "#   #"}},  // W
    {{"#   #",
      "#   #",
      " # # ",
      "  #  ",
      " # # ",
      "#   #",
      "#   #"}},  // X
    {{"#   #",
      "#   #",
      " # # ",
      "  #  ",
      "  #  ",
      "  #  ",
      "  #  "}},  // Y
    {{"#####",
      "    #",
      "   # ",
      "  #  ",
      " #   ",
      "#    ",
      "#####"}},  // Z
}};
// clang-format on

}  // namespace dropeval
