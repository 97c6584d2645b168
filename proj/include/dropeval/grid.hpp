#pragma once

// Grid world and deterministic drop placement for ab_drop() programs.
//
// A level is built by dropping blocks from the top of a W x H cell grid,
// Tetris-style: each block slides down its footprint columns until it hits
// the ground or rests on previously placed blocks. Placement is integral
// and fully deterministic.

#include <cctype>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace dropeval {

enum class BlockType : std::uint8_t { b11, b13, b31 };

struct Footprint {
  int width = 1;
  int height = 1;
};

constexpr Footprint footprint(BlockType type) noexcept {
  switch (type) {
    case BlockType::b11: return {1, 1};
    case BlockType::b13: return {1, 3};
    case BlockType::b31: return {3, 1};
  }
  return {1, 1};
}

constexpr int block_area(BlockType type) noexcept {
  const Footprint fp = footprint(type);
  return fp.width * fp.height;
}

constexpr std::string_view block_name(BlockType type) noexcept {
  switch (type) {
    case BlockType::b11: return "b11";
    case BlockType::b13: return "b13";
    case BlockType::b31: return "b31";
  }
  return "b11";
}

/// Case-insensitive lookup of "b11" / "b13" / "b31".
inline std::optional<BlockType> parse_block_type(std::string_view name) {
  if (name.size() != 3) return std::nullopt;
  const char c0 = static_cast<char>(std::tolower(static_cast<unsigned char>(name[0])));
  if (c0 != 'b') return std::nullopt;
  if (name.substr(1) == "11") return BlockType::b11;
  if (name.substr(1) == "13") return BlockType::b13;
  if (name.substr(1) == "31") return BlockType::b31;
  return std::nullopt;
}

struct GridConfig {
  int width = 20;
  int height = 16;

  bool valid() const noexcept { return width >= 1 && height >= 1; }
};

/// One ab_drop(block_type, x_position) call. x_position is the column of the
/// block's center pivot; validity is checked at placement time.
struct DropCommand {
  BlockType type = BlockType::b11;
  int x_position = 0;

  friend bool operator==(const DropCommand&, const DropCommand&) = default;
};

enum class DropError : std::uint8_t {
  OutOfBounds,   // footprint column outside [0, W)
  GridOverflow,  // resting block would exceed the grid top
};

constexpr std::string_view to_string(DropError e) noexcept {
  switch (e) {
    case DropError::OutOfBounds: return "OutOfBounds";
    case DropError::GridOverflow: return "GridOverflow";
  }
  return "?";
}

class DropException : public std::runtime_error {
 public:
  DropException(DropError error, const DropCommand& cmd)
      : std::runtime_error(std::string(to_string(error)) + ": ab_drop(" +
                           std::string(block_name(cmd.type)) + ", " +
                           std::to_string(cmd.x_position) + ")"),
        error_(error),
        command_(cmd) {}

  DropError error() const noexcept { return error_; }
  const DropCommand& command() const noexcept { return command_; }

 private:
  DropError error_;
  DropCommand command_;
};

/// Inclusive column interval [first, last].
struct ColumnSpan {
  int first = 0;
  int last = 0;
};

/// Columns covered by a block of the given type centered at x_position.
/// Block widths are odd (1 or 3), so the span is symmetric around the pivot.
constexpr ColumnSpan occupied_columns(BlockType type, int x_position) noexcept {
  const int half = footprint(type).width / 2;
  return {x_position - half, x_position + half};
}

/// A block that came to rest. origin is the bottom-left occupied cell.
struct PlacedBlock {
  int id = 0;  // placement sequence number, starting at 0
  BlockType type = BlockType::b11;
  int x = 0;
  int y = 0;

  Footprint extent() const noexcept { return footprint(type); }
  friend bool operator==(const PlacedBlock&, const PlacedBlock&) = default;
};

struct RejectedCommand {
  DropCommand command;
  DropError error;
};

/// Placed blocks plus the cell occupancy they induce. Cells hold the id of
/// the covering block or kEmptyCell; occupancy is maintained incrementally
/// and distinct blocks never share a cell.
class LevelLayout {
 public:
  static constexpr int kEmptyCell = -1;

  explicit LevelLayout(GridConfig config = {}) : config_(config) {
    if (!config_.valid()) throw std::invalid_argument("grid dimensions must be >= 1");
    cells_.assign(static_cast<std::size_t>(config_.width) * config_.height, kEmptyCell);
  }

  const GridConfig& config() const noexcept { return config_; }
  const std::vector<PlacedBlock>& blocks() const noexcept { return blocks_; }
  const std::vector<RejectedCommand>& rejected() const noexcept { return rejected_; }

  int block_at(int x, int y) const noexcept {
    if (x < 0 || x >= config_.width || y < 0 || y >= config_.height) return kEmptyCell;
    return cells_[static_cast<std::size_t>(y) * config_.width + x];
  }

  /// Drops a block; on success appends it and returns nullopt, otherwise
  /// returns the error without touching the layout or the rejected list.
  std::optional<DropError> try_drop(const DropCommand& cmd) {
    const Footprint fp = footprint(cmd.type);
    const ColumnSpan cols = occupied_columns(cmd.type, cmd.x_position);
    if (cols.first < 0 || cols.last >= config_.width) return DropError::OutOfBounds;

    // Resting row: one above the highest occupied cell under the footprint.
    int rest_y = 0;
    for (int c = cols.first; c <= cols.last; ++c) {
      for (int y = config_.height - 1; y >= 0; --y) {
        if (block_at(c, y) != kEmptyCell) {
          if (y + 1 > rest_y) rest_y = y + 1;
          break;
        }
      }
    }
    if (rest_y + fp.height > config_.height) return DropError::GridOverflow;

    const int id = static_cast<int>(blocks_.size());
    blocks_.push_back(PlacedBlock{id, cmd.type, cols.first, rest_y});
    for (int c = cols.first; c <= cols.last; ++c)
      for (int y = rest_y; y < rest_y + fp.height; ++y)
        cells_[static_cast<std::size_t>(y) * config_.width + c] = id;
    return std::nullopt;
  }

  void record_rejection(const DropCommand& cmd, DropError error) {
    rejected_.push_back(RejectedCommand{cmd, error});
  }

  /// Builds a layout from already-resolved blocks (external ingest, tests).
  /// Validates bounds and overlap but not the drop-support invariant.
  static LevelLayout from_blocks(GridConfig config, std::span<const PlacedBlock> blocks) {
    LevelLayout layout(config);
    for (const PlacedBlock& b : blocks) {
      const Footprint fp = footprint(b.type);
      if (b.x < 0 || b.x + fp.width > config.width || b.y < 0 || b.y + fp.height > config.height)
        throw std::invalid_argument("block outside grid");
      const int id = static_cast<int>(layout.blocks_.size());
      for (int c = b.x; c < b.x + fp.width; ++c) {
        for (int y = b.y; y < b.y + fp.height; ++y) {
          auto& cell = layout.cells_[static_cast<std::size_t>(y) * config.width + c];
          if (cell != kEmptyCell) throw std::invalid_argument("overlapping blocks");
          cell = id;
        }
      }
      layout.blocks_.push_back(PlacedBlock{id, b.type, b.x, b.y});
    }
    return layout;
  }

 private:
  GridConfig config_;
  std::vector<PlacedBlock> blocks_;
  std::vector<RejectedCommand> rejected_;
  std::vector<int> cells_;
};

/// Pure drop: returns the layout with the block placed. Throws DropException
/// on invalid placement.
inline LevelLayout drop_block(LevelLayout layout, const DropCommand& cmd) {
  if (auto err = layout.try_drop(cmd)) throw DropException(*err, cmd);
  return layout;
}

/// Folds the command list over an empty grid. In lenient mode (strict=false)
/// erroneous commands are recorded in rejected() and skipped; in strict mode
/// the first error aborts with DropException.
inline LevelLayout build_level(GridConfig config, std::span<const DropCommand> cmds,
                               bool strict = false) {
  LevelLayout layout(config);
  for (const DropCommand& cmd : cmds) {
    if (auto err = layout.try_drop(cmd)) {
      if (strict) throw DropException(*err, cmd);
      layout.record_rejection(cmd, *err);
    }
  }
  return layout;
}

inline LevelLayout build_level(GridConfig config, std::initializer_list<DropCommand> cmds,
                               bool strict = false) {
  return build_level(config, std::span<const DropCommand>(cmds.begin(), cmds.size()), strict);
}

/// Row-major occupancy grid (index y*W + x), true iff a block covers the cell.
inline std::vector<std::uint8_t> occupancy(const LevelLayout& layout) {
  const GridConfig& cfg = layout.config();
  std::vector<std::uint8_t> grid(static_cast<std::size_t>(cfg.width) * cfg.height, 0);
  for (int y = 0; y < cfg.height; ++y)
    for (int x = 0; x < cfg.width; ++x)
      if (layout.block_at(x, y) != LevelLayout::kEmptyCell)
        grid[static_cast<std::size_t>(y) * cfg.width + x] = 1;
  return grid;
}

}  // namespace dropeval
