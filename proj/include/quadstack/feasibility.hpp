#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "quadstack/core.hpp"
#include "quadstack/gait.hpp"
#include "quadstack/heightmap.hpp"

namespace quadstack {

// Boolean traversability grid on the same lattice as its source HeightMap.
struct FeasibilityMap {
    int n_rows = 0;
    int n_cols = 0;
    std::vector<uint8_t> cells;  // row-major, 1 = traversable

    bool traversable(int row, int col) const {
        return cells[static_cast<size_t>(row) * n_cols + col] != 0;
    }
    void set(int row, int col, bool v) {
        cells[static_cast<size_t>(row) * n_cols + col] = v ? 1 : 0;
    }
    std::string to_json() const;
};

// Convex hull of a connected group of suspect cells. Degenerate groups are
// carried explicitly: a single point or a collinear segment.
struct ConvexRegion {
    enum class Kind { point, segment, polygon };
    Kind kind = Kind::point;
    std::vector<Vec2> hull;            // CCW for polygons
    std::vector<CellIndex> cells;      // members, row-major order
    Vec2 centroid{0.0, 0.0};
};

struct ProbeResult {
    bool feasible = false;
    std::string reason;
};
using ProbeOracle = std::function<ProbeResult(const BodyState& start, const BodyState& goal)>;

struct ProbeParams {
    double probe_length = 0.15;  // m, must stay below the 0.2 m micro-trajectory bound
    int n_threads = 1;           // 1 = deterministic serial mode
    double standing_height = 0.30;
};

struct ProbeLabeling {
    std::map<CellIndex, bool> labels;
    std::map<CellIndex, std::string> reasons;  // for cells labeled infeasible
};

// Cells whose 8-neighbor height deviation exceeds the threshold.
std::vector<CellIndex> detect_violations(const HeightMap& map, double threshold);

// 8-connected components of the cell set, each wrapped in the convex hull of
// its member cell centers (monotone chain).
std::vector<ConvexRegion> group_and_hull(const std::vector<CellIndex>& cells,
                                         const HeightMap& map);

// One micro-trajectory probe per cell in the region plus a 1-cell dilation
// ring: start/goal probe_length apart, centered on the cell along the local
// crossing direction. Results are independent of evaluation order and of
// n_threads. Oracle failure labels the cell infeasible with the reason kept.
ProbeLabeling probe_microtrajectories(const ConvexRegion& region, const HeightMap& map,
                                      const ProbeOracle& oracle, const ProbeParams& params);

// Full transform: violations -> regions -> probes -> Boolean map. Unprobed
// cells default to traversable; overlapping labels merge conservatively.
FeasibilityMap build_feasibility_map(const HeightMap& map, double threshold,
                                     const ProbeOracle& oracle, const ProbeParams& params);

// The production oracle: plans a micro gait segment and checks it.
ProbeOracle make_gait_oracle(std::shared_ptr<const HeightMap> terrain, const GaitPattern& pattern,
                             const RobotModel& model, const PlannerParams& planner_params = {});

}  // namespace quadstack
