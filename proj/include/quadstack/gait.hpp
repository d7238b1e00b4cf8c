#pragma once

#include <array>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "quadstack/core.hpp"
#include "quadstack/heightmap.hpp"
#include "quadstack/robot_model.hpp"

namespace quadstack {

struct TrajectoryNode {
    double t = 0.0;  // seconds from plan start
    BodyState base;
    std::array<Vec3, kNumLegs> feet;     // world frame
    std::array<bool, kNumLegs> contact;  // true = stance
};

// Phase layout of one gait cycle. Leg i swings during the phase window
// [swing_start(i), swing_start(i) + swing_fraction()); all legs are in
// stance at the cycle boundaries.
struct GaitPattern {
    double cycle_duration = 2.0;                          // s (one full gait cycle, 0.5 Hz)
    std::array<double, kNumLegs> phase_offset{0.0, 0.5, 0.5, 0.0};  // trot pairs
    double duty_factor = 0.6;                             // stance fraction per leg
    double full_stance_fraction = 0.15;                   // all-stance window at cycle start
    double step_height = 0.05;                            // m swing apex above the ground line

    double swing_fraction() const { return 1.0 - duty_factor; }
    double swing_start(int leg) const {
        return full_stance_fraction + phase_offset[leg] * (1.0 - full_stance_fraction);
    }
    // True iff every leg's swing window fits strictly inside the cycle.
    bool valid() const;
};

struct GaitPlan {
    std::vector<TrajectoryNode> nodes;  // strictly increasing t, t[0] == 0, uniform dt
    double dt = 0.0;                    // node spacing, s
    GaitPattern pattern;
    std::shared_ptr<const HeightMap> terrain;

    double end_time() const { return nodes.empty() ? 0.0 : nodes.back().t; }
};

struct PlannerParams {
    double node_dt = 0.02;               // s between trajectory nodes
    double nominal_stride = 0.3;         // m of base travel per gait cycle
    double nominal_yaw_rate = 0.4;       // rad of yaw change per gait cycle
    double max_step_height = 0.08;       // m foothold-to-foothold height change
    double reach_margin = 0.02;          // m kept inside the leg reach sphere
    double swing_clearance = 0.0;        // m required above terrain mid-swing
    double undercarriage_clearance = 0.05;  // m required under the base
};

struct FeasibilityVerdict {
    bool feasible = true;
    std::vector<std::string> reasons;  // distinct failure categories
    std::string detail;                // first failure, for diagnostics
};

// Phase-based gait generation between SE(3)-ish start and goal states.
// The base interpolates start->goal with smooth time scaling and rides the
// terrain at the model standing height; swing feet target hip projections a
// half-stance ahead. First and last nodes have all feet in stance. When
// initial_feet is given (stitching), the plan starts from those footholds.
GaitPlan plan_gait(const BodyState& start, const BodyState& goal,
                   std::shared_ptr<const HeightMap> terrain, const GaitPattern& pattern,
                   const RobotModel& model, const PlannerParams& params = {},
                   const std::optional<std::array<Vec3, kNumLegs>>& initial_feet = std::nullopt);

// Kinematic feasibility proxy: leg reach, terrain penetration, foothold step
// heights, and undercarriage clearance at every node.
FeasibilityVerdict check_feasibility(const GaitPlan& plan, const RobotModel& model,
                                     const HeightMap& terrain, const PlannerParams& params = {});

// Linear interpolation of base and feet; contact flags from the earlier node.
TrajectoryNode sample(const GaitPlan& plan, double t);

std::vector<double> full_contact_nodes(const GaitPlan& plan);

// CSV: t, base pose (x y z qw qx qy qz), twist (vx vy vz wx wy wz),
// 12 foot coordinates, 4 contact flags.
std::string gait_plan_to_csv(const GaitPlan& plan);
GaitPlan gait_plan_from_csv(std::istream& in);

}  // namespace quadstack
