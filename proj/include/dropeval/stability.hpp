#pragma once

// Deterministic static-equilibrium analysis of a placed layout.
//
// Two rules decide which blocks move, applied as a fixpoint over marks:
//
//   UNSUPPORTED  a block above the ground with no non-moving supporter
//                moves.
//   TOPPLE       a block whose effective x-centroid (own weight plus the
//                load share of everything it carries) lies strictly outside
//                the closed hull of its contact spans with non-moving
//                supporters moves. Ground contact spans the block's own
//                bottom extent, so ground-resting blocks never topple.
//
// Load flows top-down through the support graph: a carried block's
// effective weight is split across its non-moving supporters in proportion
// to contact width. Marks are applied immediately while sweeping blocks in
// decreasing bottom-row order (ties by increasing id), and sweeps repeat
// until no mark changes.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <vector>

#include "dropeval/grid.hpp"

namespace dropeval {

/// Tolerance for the hull containment test. Centroids and span endpoints
/// are small rationals, so anything within 1e-9 of the hull is on it.
inline constexpr double kHullEpsilon = 1e-9;

inline constexpr int kGroundId = -1;

/// Contact between a block and one supporter, as a continuous x-interval
/// [lo, hi) where cell x covers [x, x+1).
struct SupportEdge {
  int supporter = kGroundId;
  double lo = 0.0;
  double hi = 0.0;

  double width() const noexcept { return hi - lo; }
};

struct SupportGraph {
  std::vector<std::vector<SupportEdge>> supporters;  // per block id
  std::vector<std::vector<int>> carried;             // inverse: blocks resting on b
};

/// Builds support edges: GROUND for blocks at y=0, plus every block whose
/// top cells sit directly under the block's bottom cells.
inline SupportGraph build_support_graph(const LevelLayout& layout) {
  const auto& blocks = layout.blocks();
  const int n = static_cast<int>(blocks.size());
  SupportGraph graph;
  graph.supporters.resize(n);
  graph.carried.resize(n);

  for (const PlacedBlock& b : blocks) {
    const Footprint fp = b.extent();
    if (b.y == 0) {
      graph.supporters[b.id].push_back(
          SupportEdge{kGroundId, static_cast<double>(b.x), static_cast<double>(b.x + fp.width)});
      continue;
    }
    // Group contiguous runs of the same supporter under the bottom row.
    int run_start = -1;
    int run_id = LevelLayout::kEmptyCell;
    auto flush = [&](int end_col) {
      if (run_id != LevelLayout::kEmptyCell) {
        graph.supporters[b.id].push_back(
            SupportEdge{run_id, static_cast<double>(run_start), static_cast<double>(end_col)});
        graph.carried[run_id].push_back(b.id);
      }
    };
    for (int c = b.x; c < b.x + fp.width; ++c) {
      const int below = layout.block_at(c, b.y - 1);
      if (below != run_id) {
        flush(c);
        run_id = below;
        run_start = c;
      }
    }
    flush(b.x + fp.width);
  }
  return graph;
}

namespace detail {

struct Load {
  double weight = 0.0;
  double centroid = 0.0;
};

class MovingSetSolver {
 public:
  MovingSetSolver(const LevelLayout& layout, const SupportGraph& graph)
      : blocks_(layout.blocks()), graph_(graph), moving_(blocks_.size(), false) {}

  std::vector<int> solve() {
    const int n = static_cast<int>(blocks_.size());
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](int a, int b) {
      if (blocks_[a].y != blocks_[b].y) return blocks_[a].y > blocks_[b].y;
      return a < b;
    });

    bool changed = true;
    while (changed) {
      changed = false;
      for (int id : order) {
        if (moving_[id]) continue;
        if (violates(id)) {
          moving_[id] = true;
          changed = true;
        }
      }
    }

    std::vector<int> result;
    for (int id = 0; id < n; ++id)
      if (moving_[id]) result.push_back(id);
    return result;
  }

 private:
  bool violates(int id) {
    double hull_lo = std::numeric_limits<double>::infinity();
    double hull_hi = -std::numeric_limits<double>::infinity();
    bool supported = false;
    for (const SupportEdge& e : graph_.supporters[id]) {
      if (e.supporter != kGroundId && moving_[e.supporter]) continue;
      supported = true;
      hull_lo = std::min(hull_lo, e.lo);
      hull_hi = std::max(hull_hi, e.hi);
    }
    if (!supported) return true;  // bottom row > 0 by construction

    // Loads are valid only for the current marks, so the memo lives per call.
    std::vector<Load> memo(blocks_.size());
    std::vector<char> done(blocks_.size(), 0);
    const Load load = effective_load(id, memo, done);
    return load.centroid < hull_lo - kHullEpsilon || load.centroid > hull_hi + kHullEpsilon;
  }

  // Effective weight and x-centroid of a block under the current marks:
  // own area at its geometric center plus the proportional share of every
  // non-moving block it carries. A share enters through its contact patch,
  // so its moment arm is the carried block's centroid clamped into the
  // contact span; a symmetric bridge therefore loads its feet inward, not
  // at the span midpoint of the whole deck.
  Load effective_load(int id, std::vector<Load>& memo, std::vector<char>& done) const {
    if (done[id]) return memo[id];
    const PlacedBlock& b = blocks_[id];
    const Footprint fp = b.extent();
    const double area = static_cast<double>(block_area(b.type));
    double weight = area;
    double moment = area * (b.x + fp.width / 2.0);
    for (int top : graph_.carried[id]) {
      if (moving_[top]) continue;
      const double share = contact_share(top, id);
      if (share <= 0.0) continue;
      const Load inherited = effective_load(top, memo, done);
      const double at = transmission_point(top, id, inherited.centroid);
      weight += share * inherited.weight;
      moment += share * inherited.weight * at;
    }
    done[id] = 1;
    memo[id] = Load{weight, moment / weight};
    return memo[id];
  }

  // Where `top`'s load acts on `supporter`: its effective centroid clamped
  // into the closed contact span between the two blocks.
  double transmission_point(int top, int supporter, double centroid) const {
    for (const SupportEdge& e : graph_.supporters[top]) {
      if (e.supporter != supporter) continue;
      return std::clamp(centroid, e.lo, e.hi);
    }
    return centroid;
  }

  // Fraction of `top`'s weight carried by `supporter`: contact width with
  // `supporter` over total contact width with all non-moving supporters.
  double contact_share(int top, int supporter) const {
    double total = 0.0;
    double onto = 0.0;
    for (const SupportEdge& e : graph_.supporters[top]) {
      if (e.supporter != kGroundId && moving_[e.supporter]) continue;
      total += e.width();
      if (e.supporter == supporter) onto += e.width();
    }
    return total > 0.0 ? onto / total : 0.0;
  }

  const std::vector<PlacedBlock>& blocks_;
  const SupportGraph& graph_;
  std::vector<bool> moving_;
};

}  // namespace detail

/// Ids of blocks judged to move, in ascending id order.
inline std::vector<int> compute_moving_set(const LevelLayout& layout) {
  const SupportGraph graph = build_support_graph(layout);
  return detail::MovingSetSolver(layout, graph).solve();
}

struct StabilityReport {
  int total_blocks = 0;
  std::vector<int> moving;  // ascending block ids
  double st = 0.0;          // (total - moving) / total; 0 for empty layouts
};

/// Score for a precomputed moving set (internal analysis or external ingest).
inline StabilityReport stability_score(const LevelLayout& layout, std::vector<int> moving) {
  StabilityReport report;
  report.total_blocks = static_cast<int>(layout.blocks().size());
  report.moving = std::move(moving);
  if (report.total_blocks > 0) {
    report.st = static_cast<double>(report.total_blocks - static_cast<int>(report.moving.size())) /
                report.total_blocks;
  }
  return report;
}

inline StabilityReport stability_score(const LevelLayout& layout) {
  return stability_score(layout, compute_moving_set(layout));
}

}  // namespace dropeval
