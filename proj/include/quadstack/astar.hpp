#pragma once

#include <optional>
#include <vector>

#include "quadstack/core.hpp"
#include "quadstack/feasibility.hpp"

namespace quadstack {

struct AStarResult {
    std::vector<CellIndex> path;  // start..goal inclusive
    double cost = 0.0;            // 1 per axis move, sqrt(2) per diagonal
};

// 8-connected shortest path over traversable cells. Diagonal moves require
// both adjacent axis cells to be traversable (no corner cutting). Octile
// heuristic; ties broken by smaller heuristic, then row-major order, so the
// expansion order is deterministic. Returns nullopt when the goal is
// unreachable; throws std::invalid_argument on an infeasible start/goal.
std::optional<AStarResult> astar(const FeasibilityMap& fmap, CellIndex start, CellIndex goal);

}  // namespace quadstack
